#pragma once

// Finite-n work distillation from two-level resources: n copies of the
// resource plus ell Gibbs qubits are permuted within energy shells so that
// m trailing qubits end up excited.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "athermal/core.hpp"
#include "athermal/strings.hpp"
#include "athermal/typeclass.hpp"

namespace athermal {

/// Stores at most this many per-type records in a plan; larger plans keep the windows only.
inline constexpr std::size_t kMaxStoredRecords = 65536;

/// (R_limit n)^{3/2} rounded up.
Count bath_size_for(double rate, Count n);

/// Largest m with C(ell, gibbs_ones) C(n, resource_ones) <= C(ell + n - m, gibbs_ones + resource_ones - m).
Count solve_single_type(Count ell, Count gibbs_ones, Count n, Count resource_ones,
                        Count exact_limit = kDefaultExactLimit);

/// (h(q) - h(p) + beta (p - q)) / (h(q) + beta (1 - q)).
double rate_limit(double p, double beta);

struct DistillationRecord {
    TypeDescriptor bath;      // (ell - g, g)
    TypeDescriptor resource;  // (n - r, r)
    TypeDescriptor exhaust;   // (k - e, e) with e = g + r - m
    double log_input_count = 0.0;
    double log_exhaust_count = 0.0;
    std::optional<BigCount> input_count;
    std::optional<BigCount> exhaust_count;
    /// First exhaust-string rank used by this composite type inside its shell.
    std::optional<BigCount> shell_offset;
};

/// One resource energy block of a coherent plan (ones count r).
struct EnergyBlock {
    Count energy = 0;
    double probability = 0.0;
    double log_dimension = 0.0;  // ln C(n, r)
    double log_rank_cap = 0.0;   // ln of strings kept after in-block diagonalisation
    std::optional<BigCount> rank_cap;
};

struct DistillationPlan {
    Count n = 0;
    Count ell = 0;
    Count m = 0;
    Count k = 0;
    double p = 0.0;  // excited population (mean energy for coherent inputs)
    double beta = 0.0;
    double q = 0.0;
    double width = kDefaultWidth;
    double rate_limit = 0.0;
    double achieved_rate = 0.0;
    double epsilon = 0.0;  // n / ell, +inf when ell = 0
    double failure_mass = 0.0;
    double resource_mass = 1.0;
    double bath_mass = 1.0;
    bool no_resource = false;
    bool exact_counting = false;

    CountRange bath_window;
    CountRange resource_window;

    /// Smallest single-type solution over the window (the count inequality alone).
    Count m_per_type_bound = 0;
    std::pair<Count, Count> binding_type{0, 0};  // (g, r) achieving m_per_type_bound
    /// Shell g + r whose joint packing fixes m.
    Count binding_shell = 0;

    std::vector<DistillationRecord> records;
    bool records_elided = false;
    std::size_t record_count = 0;

    // Coherent inputs (block-diagonalised first).
    bool coherent = false;
    double entropy = 0.0;
    std::vector<EnergyBlock> blocks;
    double energy_mass = 1.0;
    double eigen_mass = 1.0;
    double minor_eigenvalue = 0.0;
    CountRange eigen_window;  // counts of the minor eigenvector kept in the typical subspace

    /// Number of resource strings of weight r fed into the permutation.
    BigCount resource_capacity(Count r) const;
    double log_resource_capacity(Count r) const;
    /// Bound on the work-register trace distance from |1..1>: failure_mass for
    /// diagonal inputs, sqrt(failure_mass) for coherent ones.
    double work_error_bound() const;
    const DistillationRecord* find(Count gibbs_ones, Count resource_ones) const;
};

/// Plan for rho = (1-p)|0><0| + p|1><1| with ell = ceil((R n)^{3/2}).
DistillationPlan plan_distillation(Count n, double p, double beta, double width = kDefaultWidth,
                                   Count exact_limit = kDefaultExactLimit);

/// Same construction with an explicit bath size.
DistillationPlan plan_distillation_with_bath(Count n, Count ell, double p, double beta,
                                             double width = kDefaultWidth,
                                             Count exact_limit = kDefaultExactLimit);

/// Plan for an arbitrary qubit state: rotate within resource energy blocks onto
/// at most e^{n S + O(sqrt n)} strings, then distil as above.
DistillationPlan plan_distillation_general(const DensityMatrix& rho, Count n, double beta,
                                           double width = kDefaultWidth,
                                           Count exact_limit = kDefaultExactLimit);
DistillationPlan plan_distillation_general_with_bath(const DensityMatrix& rho, Count n, Count ell, double beta,
                                                     double width = kDefaultWidth,
                                                     Count exact_limit = kDefaultExactLimit);

/// Explicit injection for one composite type, inputs in lexicographic order.
struct StringMap {
    int input_length = 0;  // ell + n; bath symbols first
    int exhaust_length = 0;
    int work_length = 0;
    std::vector<std::pair<Bits, Bits>> pairs;
};

/// Requires ell + n <= 62 and at most 2^22 strings.
StringMap build_string_map(const DistillationPlan& plan, Count gibbs_ones, Count resource_ones);

}  // namespace athermal
