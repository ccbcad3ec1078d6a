#pragma once

// Ground-truth engines for small instances: a brute-force injection oracle,
// exact execution of plans on explicit bit strings, an exact density-matrix
// check of distillation, and exhaust-state statistics.

#include <cstdint>
#include <optional>
#include <vector>

#include <gmpxx.h>

#include "athermal/core.hpp"
#include "athermal/distill.hpp"
#include "athermal/form.hpp"
#include "athermal/strings.hpp"

namespace athermal {

/// Largest m admitting an injection from bath(g) x resource(r) strings into
/// strings ending in 1^m with the same weight. Built explicitly when
/// ell + n <= 14, counted with a Pascal table up to 24.
Count oracle_max_m(Count ell, Count gibbs_ones, Count n, Count resource_ones);

/// Probability distribution over fixed-length bit strings.
struct StringDistribution {
    int length = 0;
    std::vector<Bits> strings;
    std::vector<double> probs;
    std::vector<mpq_class> exact;  // same order as strings; empty in floating mode

    bool rational() const noexcept { return !exact.empty(); }
    double total() const;
    mpq_class exact_total() const;

    /// Gibbs qubits followed by resource qubits, every string with nonzero weight.
    static StringDistribution product(Count ell, double q, Count n, double p);
    static StringDistribution product(Count ell, const mpq_class& q, Count n, const mpq_class& p);
};

/// A permutation of all strings of one length (image[input] = output).
struct PermutationMap {
    int length = 0;
    std::vector<Bits> image;
    std::vector<bool> planned;  // input is covered by an explicit per-type map

    static PermutationMap identity(int length);
    bool bijective() const;
    bool preserves_weight() const;
};

/// Full permutation for a distillation plan; inputs outside the per-type maps
/// go to unused outputs of the same weight in lexicographic order. ell + n <= 24.
PermutationMap distillation_permutation(const DistillationPlan& plan);

struct Trajectory {
    Bits input = 0;
    Bits output = 0;
    double prob = 0.0;
};

struct ClassicalExecution {
    StringDistribution output;
    std::vector<Trajectory> trajectories;
    int input_length = 0;
    int work_length = 0;  // trailing positions holding the work register
    double success_probability = 0.0;  // work register equal to 1^m (distillation) or consumed (formation)
    std::optional<mpq_class> exact_success;
    double uncovered_mass = 0.0;  // inputs outside every per-type map
    bool ones_conserved = true;
    bool injective = true;
    /// Formation only: probability of each target ones count (index t).
    std::vector<double> target_ones_distribution;
};

ClassicalExecution execute_permutation(const PermutationMap& map, const StringDistribution& input, int work_length);
ClassicalExecution execute_plan_classical(const DistillationPlan& plan, const StringDistribution& input);
/// Bath strings (ell symbols) are extended with m work ones; the target type is
/// drawn with the plan's Birkhoff weights.
ClassicalExecution execute_plan_classical(const FormationPlan& plan, const StringDistribution& bath);

struct QuantumReport {
    int total_qubits = 0;
    Count m = 0;
    bool commutes = false;           // every rotation and permutation stays inside one energy shell
    bool bijective = false;
    bool trace_preserving = false;
    double output_trace = 0.0;
    double rotation_unitarity_error = 0.0;
    double work_trace_distance = 0.0;  // half trace norm against |1..1><1..1|
    double work_error_bound = 0.0;
    double failure_mass = 0.0;
    bool within_bound = false;
};

inline constexpr int kMaxQuantumQubits = 14;

/// Exact execution on gamma^ell (x) rho^n. Diagonal plans use rho = diag(1 - p, p).
QuantumReport execute_plan_quantum(const DistillationPlan& plan);
QuantumReport execute_plan_quantum(const DistillationPlan& plan, const DensityMatrix& rho);

struct ExhaustReport {
    Count block_size = 0;
    Count exhaust_length = 0;
    std::vector<DensityMatrix> reduced_states;
    std::vector<double> rel_entropies;          // D(block || gamma^L), nats
    std::vector<double> pinsker_bounds;         // sqrt(2 D)
    std::vector<double> measured_trace_norms;   // || block - gamma^L ||_1
    double total_rel_entropy = 0.0;             // D(pi_k || gamma^k)
    double per_system_rel_entropy = 0.0;        // total / k
    bool subadditive = false;                   // sum over blocks <= total
    bool pinsker_holds = false;
};

/// Exhaust of a distillation plan run on its own product input. ell + n <= 24, k <= 22.
ExhaustReport exhaust_analysis(const DistillationPlan& plan, Count block_size = 1);

struct WorkLedgerAudit {
    std::size_t trajectories = 0;
    bool balanced = false;
    Count max_imbalance = 0;
    double expected_work = 0.0;  // energy gained by the work positions, energy units
};

/// Energy in equals energy out on every trajectory; throws AuditFailure otherwise.
WorkLedgerAudit work_balance_audit(const ClassicalExecution& run);

}  // namespace athermal
