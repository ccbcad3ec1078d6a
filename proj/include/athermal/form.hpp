#pragma once

// Finite-n formation of two-level quasiclassical states: m excited qubits and
// ell Gibbs qubits are mapped onto n target qubits of a fixed type plus an
// exhaust, with the target type chosen by a Birkhoff mixing stage.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "athermal/strings.hpp"
#include "athermal/typeclass.hpp"

namespace athermal {

/// Smallest m with k = m + ell - n >= 0, e = g + m - t in [0, k] and
/// C(ell, g) <= C(k, e) C(n, t). Throws Infeasible when ell - g < n - t.
Count solve_formation_single_type(Count n, Count target_ones, Count ell, Count gibbs_ones,
                                  Count exact_limit = kDefaultExactLimit);

struct BirkhoffPartition {
    /// Explicit index sets (empty when built over grouped weight classes).
    std::vector<std::vector<std::size_t>> sets;
    /// Grouped form: strings of weight class w assigned to set j, class_counts[j][w].
    std::vector<std::vector<std::uint64_t>> class_counts;
    std::vector<double> class_weights;  // per-string probability of each class
    std::vector<std::uint64_t> class_sizes;
    std::vector<double> target_weights;
    std::vector<double> achieved_weights;
    double max_deviation = 0.0;
    double total_deviation = 0.0;  // sum of |achieved - target|
    double tolerance = 0.0;
    double max_weight = 0.0;
    bool best_effort = false;  // tolerance below the largest single weight
    bool grouped = false;
    int bath_bits = 0;
};

/// Greedy assignment (heaviest first, each to the set with the largest remaining deficit).
BirkhoffPartition birkhoff_partition(std::span<const double> weights, std::span<const double> targets,
                                     double tolerance);

/// Same greedy over an ell-qubit Gibbs register whose strings are grouped by weight.
BirkhoffPartition birkhoff_partition_gibbs(int bath_bits, double q, std::span<const double> targets,
                                           double tolerance);

/// Gibbs register size whose largest string weight is below tolerance.
int birkhoff_bath_bits(double q, double tolerance);

/// Renormalised binomial probabilities over the window.
std::vector<double> type_distribution(Count n, double p, std::span<const TypeDescriptor> window);
std::vector<double> type_distribution(Count n, double p, CountRange ones);

struct FormationRecord {
    TypeDescriptor bath;     // (ell - g, g)
    TypeDescriptor target;   // (n - t, t)
    TypeDescriptor exhaust;  // (k - e, e) with e = g + m - t
    double log_input_count = 0.0;
    double log_output_count = 0.0;  // ln C(k, e) C(n, t)
    std::optional<BigCount> input_count;
    std::optional<BigCount> exhaust_count;
    std::optional<BigCount> target_count;
    /// Exhaust strings per target string: floor and ceil of inputs / targets.
    std::optional<BigCount> exhaust_per_target_min;
    std::optional<BigCount> exhaust_per_target_max;
};

inline constexpr double kDefaultBirkhoffTolerance = 1e-6;

struct FormationPlan {
    Count n = 0;
    Count ell = 0;
    Count m = 0;
    Count k = 0;
    double p = 0.0;
    double beta = 0.0;
    double q = 0.0;
    double width = kDefaultWidth;
    double rate_limit = 0.0;
    /// Excited qubits consumed per target copy (m / n).
    double cost_rate = 0.0;
    /// Target copies per excited qubit (n / m), +inf when m = 0.
    double formation_rate = 0.0;
    Count m_nominal = 0;
    Count ell_min = 0;
    int register_bits = 0;
    bool exact_counting = false;
    bool free_target = false;

    CountRange bath_window;
    CountRange target_window;
    double bath_mass = 1.0;
    double target_mass = 1.0;
    double failure_mass = 0.0;
    std::pair<Count, Count> binding_type{0, 0};  // (g, t) needing the largest m
    double entropy_cost = 0.0;                   // ln(number of typical target types)

    std::vector<double> target_distribution;
    BirkhoffPartition birkhoff;

    std::vector<FormationRecord> records;
    bool records_elided = false;
    std::size_t record_count = 0;

    const FormationRecord* find(Count gibbs_ones, Count target_ones) const;
};

FormationPlan plan_formation(Count n, double p, double beta, double width = kDefaultWidth,
                             Count exact_limit = kDefaultExactLimit,
                             double birkhoff_tolerance = kDefaultBirkhoffTolerance);

/// Formation with explicit bath size; throws Infeasible if some typical pair has ell - g < n - t.
FormationPlan plan_formation_with_bath(Count n, Count ell, double p, double beta, double width = kDefaultWidth,
                                       Count exact_limit = kDefaultExactLimit,
                                       double birkhoff_tolerance = kDefaultBirkhoffTolerance);

/// Round-robin assignment for one (g, t): input i -> (target i mod T, exhaust offset + i div T).
struct FormationMap {
    int bath_length = 0;
    int work_length = 0;
    int target_length = 0;
    int exhaust_length = 0;
    /// input = bath string then m work ones; output = target string then exhaust string.
    std::vector<std::pair<Bits, Bits>> pairs;
};

FormationMap build_formation_map(const FormationPlan& plan, Count gibbs_ones, Count target_ones);

}  // namespace athermal
