#include "athermal/form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "athermal/core.hpp"
#include "athermal/distill.hpp"
#include "athermal/error.hpp"

namespace athermal {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kAmbiguity = 1e-8;

double lnc(Count n, Count k) {
    if (k < 0 || k > n) return kNegInf;
    return log_binomial(n, k, 0);
}

mpz_class choose(Count n, Count k) { return binomial(n, k).value(); }

CountRange one_window(Count n, double p, double width) {
    if (n == 0) return {0, 0};
    return typical_ranges(n, FrequencyVector::binary(p), width)[1];
}

// Feasibility of one m for every (g, t) pair in the windows.
bool all_pairs_fit(Count n, Count ell, Count m, CountRange gw, CountRange tw, bool exact,
                   std::pair<Count, Count>* failing) {
    const Count k = m + ell - n;
    if (k < 0) return false;
    const Count e_lo = gw.lo + m - tw.hi;
    const Count e_hi = gw.hi + m - tw.lo;
    if (e_lo < 0 || e_hi > k) {
        if (failing) *failing = e_lo < 0 ? std::pair{gw.lo, tw.hi} : std::pair{gw.hi, tw.lo};
        return false;
    }
    std::vector<double> supply(static_cast<std::size_t>(e_hi - e_lo + 1));
    for (Count e = e_lo; e <= e_hi; ++e) supply[static_cast<std::size_t>(e - e_lo)] = lnc(k, e);
    std::vector<double> target(static_cast<std::size_t>(tw.size()));
    for (Count t = tw.lo; t <= tw.hi; ++t) target[static_cast<std::size_t>(t - tw.lo)] = lnc(n, t);
    for (Count g = gw.lo; g <= gw.hi; ++g) {
        const double demand = lnc(ell, g);
        for (Count t = tw.lo; t <= tw.hi; ++t) {
            const double have = supply[static_cast<std::size_t>(g + m - t - e_lo)] + target[static_cast<std::size_t>(t - tw.lo)];
            const double margin = have - demand;
            bool ok = margin >= 0.0;
            if (exact && std::abs(margin) < kAmbiguity * std::max(1.0, demand))
                ok = choose(ell, g) <= choose(k, g + m - t) * choose(n, t);
            if (!ok) {
                if (failing) *failing = {g, t};
                return false;
            }
        }
    }
    return true;
}

Count smallest_fitting_m(Count n, Count ell, CountRange gw, CountRange tw, bool exact) {
    // With k - e = (ell - g) - (n - t) fixed, C(k, e) grows without bound in m
    // unless that difference is zero; those pairs never gain room.
    for (Count g = gw.lo; g <= gw.hi; ++g) {
        const Count t = n - ell + g;
        if (!tw.contains(t)) continue;
        const bool fits = exact ? choose(ell, g) <= choose(n, t) : lnc(ell, g) <= lnc(n, t) + kAmbiguity;
        require(fits, ErrorCode::Infeasible, "bath type with as many zeros as the target type has more strings");
    }
    Count lo = std::max<Count>({0, n - ell, tw.hi - gw.lo});
    if (all_pairs_fit(n, ell, lo, gw, tw, exact, nullptr)) return lo;
    Count step = 1;
    Count hi = lo + step;
    while (!all_pairs_fit(n, ell, hi, gw, tw, exact, nullptr)) {
        lo = hi;
        step *= 2;
        hi = lo + step;
        require(hi <= (Count{1} << 40), ErrorCode::UnsupportedSize, "formation needs more than 2^40 work qubits");
    }
    // Invariant: lo infeasible, hi feasible.
    while (hi - lo > 1) {
        const Count mid = lo + (hi - lo) / 2;
        if (all_pairs_fit(n, ell, mid, gw, tw, exact, nullptr))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// Largest remaining deficit; ties go to the lowest index.
std::size_t argmax_deficit(const std::vector<long double>& deficit) {
    return static_cast<std::size_t>(std::max_element(deficit.begin(), deficit.end()) - deficit.begin());
}

void finish_partition(BirkhoffPartition& bp) {
    bp.max_deviation = 0.0;
    bp.total_deviation = 0.0;
    for (std::size_t j = 0; j < bp.target_weights.size(); ++j) {
        const double dev = std::abs(bp.achieved_weights[j] - bp.target_weights[j]);
        bp.max_deviation = std::max(bp.max_deviation, dev);
        bp.total_deviation += dev;
    }
    bp.best_effort = bp.tolerance < bp.max_weight;
}

void check_distribution(std::span<const double> v, const char* what) {
    require(!v.empty(), ErrorCode::InvalidParameter, std::string(what) + " is empty");
    double s = 0.0;
    for (double x : v) {
        require(x >= 0.0 && std::isfinite(x), ErrorCode::InvalidParameter, std::string(what) + " has a negative entry");
        s += x;
    }
    require(std::abs(s - 1.0) <= 1e-9, ErrorCode::InvalidParameter, std::string(what) + " must sum to 1");
}

}  // namespace

Count solve_formation_single_type(Count n, Count target_ones, Count ell, Count gibbs_ones, Count exact_limit) {
    require(n >= 0 && ell >= 0, ErrorCode::InvalidParameter, "sizes must be nonnegative");
    require(0 <= target_ones && target_ones <= n, ErrorCode::InvalidParameter, "targetOnes outside [0, n]");
    require(0 <= gibbs_ones && gibbs_ones <= ell, ErrorCode::InvalidParameter, "gibbsOnes outside [0, ell]");
    require(ell - gibbs_ones >= n - target_ones, ErrorCode::Infeasible,
            "bath has fewer zeros than the target type needs");
    const bool exact = ell + n <= exact_limit;
    return smallest_fitting_m(n, ell, {gibbs_ones, gibbs_ones}, {target_ones, target_ones}, exact);
}

int birkhoff_bath_bits(double q, double tolerance) {
    require(tolerance > 0.0 && tolerance < 1.0, ErrorCode::InvalidParameter, "tolerance must lie in (0,1)");
    const double top = std::max(q, 1.0 - q);
    require(top < 1.0, ErrorCode::InvalidParameter, "a pure Gibbs register cannot randomise");
    const int bits = static_cast<int>(std::ceil(std::log(tolerance) / std::log(top)));
    require(bits <= 62, ErrorCode::UnsupportedSize, "Birkhoff register would exceed 62 qubits");
    return std::max(1, bits);
}

BirkhoffPartition birkhoff_partition(std::span<const double> weights, std::span<const double> targets,
                                     double tolerance) {
    check_distribution(weights, "weights");
    check_distribution(targets, "targets");
    require(tolerance > 0.0, ErrorCode::InvalidParameter, "tolerance must be positive");
    BirkhoffPartition bp;
    bp.tolerance = tolerance;
    bp.target_weights.assign(targets.begin(), targets.end());
    bp.sets.assign(targets.size(), {});
    bp.max_weight = *std::max_element(weights.begin(), weights.end());

    std::vector<std::size_t> order(weights.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
    std::vector<long double> deficit(targets.begin(), targets.end());
    for (std::size_t i : order) {
        const std::size_t j = argmax_deficit(deficit);
        bp.sets[j].push_back(i);
        deficit[j] -= weights[i];
    }
    bp.achieved_weights.assign(targets.size(), 0.0);
    for (std::size_t j = 0; j < bp.sets.size(); ++j) {
        std::sort(bp.sets[j].begin(), bp.sets[j].end());
        long double s = 0.0L;
        for (std::size_t i : bp.sets[j]) s += weights[i];
        bp.achieved_weights[j] = static_cast<double>(s);
    }
    finish_partition(bp);
    return bp;
}

BirkhoffPartition birkhoff_partition_gibbs(int bath_bits, double q, std::span<const double> targets,
                                           double tolerance) {
    check_distribution(targets, "targets");
    require(bath_bits >= 1 && bath_bits <= 62, ErrorCode::UnsupportedSize, "register must have 1..62 qubits");
    require(q >= 0.0 && q <= 1.0, ErrorCode::InvalidParameter, "q must lie in [0,1]");
    BirkhoffPartition bp;
    bp.grouped = true;
    bp.bath_bits = bath_bits;
    bp.tolerance = tolerance;
    bp.target_weights.assign(targets.begin(), targets.end());
    const std::size_t sets = targets.size();
    const int classes = bath_bits + 1;
    bp.class_counts.assign(sets, std::vector<std::uint64_t>(static_cast<std::size_t>(classes), 0));
    for (int w = 0; w < classes; ++w) {
        bp.class_weights.push_back(std::pow(q, w) * std::pow(1.0 - q, bath_bits - w));
        bp.class_sizes.push_back(binomial(bath_bits, w).value().get_ui());
    }
    bp.max_weight = *std::max_element(bp.class_weights.begin(), bp.class_weights.end());

    std::vector<int> order(static_cast<std::size_t>(classes));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return bp.class_weights[static_cast<std::size_t>(a)] > bp.class_weights[static_cast<std::size_t>(b)];
    });

    std::vector<long double> deficit(targets.begin(), targets.end());
    for (int w : order) {
        const long double x = bp.class_weights[static_cast<std::size_t>(w)];
        std::uint64_t left = bp.class_sizes[static_cast<std::size_t>(w)];
        if (x <= 0.0L) {
            // Zero-probability strings go to the first set; they change nothing.
            bp.class_counts[0][static_cast<std::size_t>(w)] += left;
            continue;
        }
        // Assigning one string at a time to the largest deficit hands out the
        // `left` largest bids d_j - i x. Take every bid above a threshold in one
        // step, then finish the remaining ties one by one.
        auto bids_above = [&](long double level) {
            long double total = 0.0L;
            for (long double d : deficit)
                if (d > level) total += std::ceil((d - level) / x);
            return total;
        };
        long double hi = *std::max_element(deficit.begin(), deficit.end());
        long double lo = hi - (static_cast<long double>(left) + 1.0L) * x;
        if (bids_above(lo) > static_cast<long double>(left)) {
            for (int it = 0; it < 200; ++it) {
                const long double mid = 0.5L * (lo + hi);
                if (bids_above(mid) > static_cast<long double>(left))
                    lo = mid;
                else
                    hi = mid;
            }
        } else {
            hi = lo;
        }
        for (std::size_t j = 0; j < sets; ++j) {
            if (deficit[j] <= hi) continue;
            const auto take = static_cast<std::uint64_t>(std::ceil((deficit[j] - hi) / x));
            const std::uint64_t given = std::min(take, left);
            bp.class_counts[j][static_cast<std::size_t>(w)] += given;
            deficit[j] -= static_cast<long double>(given) * x;
            left -= given;
        }
        for (; left > 0; --left) {
            const std::size_t j = argmax_deficit(deficit);
            bp.class_counts[j][static_cast<std::size_t>(w)] += 1;
            deficit[j] -= x;
        }
    }
    bp.achieved_weights.assign(sets, 0.0);
    for (std::size_t j = 0; j < sets; ++j) {
        long double s = 0.0L;
        for (int w = 0; w < classes; ++w)
            s += static_cast<long double>(bp.class_counts[j][static_cast<std::size_t>(w)]) *
                 bp.class_weights[static_cast<std::size_t>(w)];
        bp.achieved_weights[j] = static_cast<double>(s);
    }
    finish_partition(bp);
    return bp;
}

std::vector<double> type_distribution(Count n, double p, CountRange ones) {
    require(ones.lo <= ones.hi, ErrorCode::InvalidParameter, "empty window");
    const auto f = FrequencyVector::binary(p);
    std::vector<double> logs;
    for (Count t = ones.lo; t <= ones.hi; ++t) logs.push_back(log_type_probability(TypeDescriptor::binary(n, t), f));
    const double z = log_sum_exp(logs);
    require(std::isfinite(z), ErrorCode::InvalidParameter, "window has zero probability");
    std::vector<double> out;
    out.reserve(logs.size());
    for (double l : logs) out.push_back(std::exp(l - z));
    return out;
}

std::vector<double> type_distribution(Count n, double p, std::span<const TypeDescriptor> window) {
    require(!window.empty(), ErrorCode::InvalidParameter, "empty window");
    const auto f = FrequencyVector::binary(p);
    std::vector<double> logs;
    for (const auto& t : window) {
        require(t.dimension() == 2 && t.total() == n, ErrorCode::InvalidParameter, "window types must be binary of size n");
        logs.push_back(log_type_probability(t, f));
    }
    const double z = log_sum_exp(logs);
    require(std::isfinite(z), ErrorCode::InvalidParameter, "window has zero probability");
    std::vector<double> out;
    for (double l : logs) out.push_back(std::exp(l - z));
    return out;
}

const FormationRecord* FormationPlan::find(Count gibbs_ones, Count target_ones) const {
    for (const auto& r : records)
        if (r.bath.ones() == gibbs_ones && r.target.ones() == target_ones) return &r;
    return nullptr;
}

FormationPlan plan_formation_with_bath(Count n, Count ell, double p, double beta, double width, Count exact_limit,
                                       double birkhoff_tolerance) {
    require(n >= 1, ErrorCode::InvalidParameter, "n must be at least 1");
    require(ell >= 0, ErrorCode::InvalidParameter, "ell must be nonnegative");
    require(beta > 0.0 && std::isfinite(beta), ErrorCode::InvalidParameter, "beta must be positive and finite");
    require(width > 0.0 && std::isfinite(width), ErrorCode::InvalidParameter, "width must be positive");
    FormationPlan plan;
    plan.n = n;
    plan.ell = ell;
    plan.p = p;
    plan.beta = beta;
    plan.width = width;
    plan.q = two_level_excitation(beta);
    plan.rate_limit = rate_limit(p, beta);
    plan.free_target = plan.rate_limit == 0.0;
    plan.m_nominal = static_cast<Count>(std::ceil(static_cast<double>(n) * plan.rate_limit * (1.0 - 1e-13)));
    plan.exact_counting = ell + n <= exact_limit;

    plan.bath_window = one_window(ell, plan.q, width);
    plan.target_window = one_window(n, p, width);
    require(ell - plan.bath_window.hi >= n - plan.target_window.lo, ErrorCode::Infeasible,
            "bath too small: some typical Gibbs type has fewer zeros than a target type needs");
    plan.bath_mass = ell == 0 ? 1.0 : binomial_window_mass(ell, plan.q, plan.bath_window);
    plan.target_mass = binomial_window_mass(n, p, plan.target_window);
    plan.failure_mass = std::max(0.0, 1.0 - plan.bath_mass * plan.target_mass);

    plan.m = smallest_fitting_m(n, ell, plan.bath_window, plan.target_window, plan.exact_counting);
    if (plan.m > std::max<Count>({0, n - ell, plan.target_window.hi - plan.bath_window.lo})) {
        std::pair<Count, Count> failing{0, 0};
        all_pairs_fit(n, ell, plan.m - 1, plan.bath_window, plan.target_window, plan.exact_counting, &failing);
        plan.binding_type = failing;
    } else {
        plan.binding_type = {plan.bath_window.lo, plan.target_window.hi};
    }
    plan.k = plan.m + ell - n;
    plan.cost_rate = static_cast<double>(plan.m) / static_cast<double>(n);
    plan.formation_rate = plan.m == 0 ? kInfinity : static_cast<double>(n) / static_cast<double>(plan.m);
    plan.register_bits = static_cast<int>(std::ceil(std::log2(static_cast<double>(plan.bath_window.size()))));
    plan.entropy_cost = std::log(static_cast<double>(plan.target_window.size()));

    plan.target_distribution = type_distribution(n, p, plan.target_window);
    if (plan.target_distribution.size() == 1) {
        plan.birkhoff.target_weights = plan.target_distribution;
        plan.birkhoff.achieved_weights = plan.target_distribution;
        plan.birkhoff.tolerance = birkhoff_tolerance;
    } else {
        plan.birkhoff = birkhoff_partition_gibbs(birkhoff_bath_bits(plan.q, birkhoff_tolerance), plan.q,
                                                 plan.target_distribution, birkhoff_tolerance);
    }

    const std::size_t count = static_cast<std::size_t>(plan.bath_window.size() * plan.target_window.size());
    plan.record_count = count;
    plan.records_elided = count > kMaxStoredRecords;
    if (!plan.records_elided) {
        for (Count g = plan.bath_window.lo; g <= plan.bath_window.hi; ++g) {
            for (Count t = plan.target_window.lo; t <= plan.target_window.hi; ++t) {
                FormationRecord rec;
                const Count e = g + plan.m - t;
                rec.bath = TypeDescriptor::binary(ell, g);
                rec.target = TypeDescriptor::binary(n, t);
                rec.exhaust = TypeDescriptor::binary(plan.k, e);
                rec.log_input_count = lnc(ell, g);
                rec.log_output_count = lnc(plan.k, e) + lnc(n, t);
                if (plan.exact_counting) {
                    const mpz_class in = choose(ell, g);
                    const mpz_class targets = choose(n, t);
                    rec.input_count = BigCount(in);
                    rec.exhaust_count = BigCount(choose(plan.k, e));
                    rec.target_count = BigCount(targets);
                    mpz_class lo = in / targets;
                    mpz_class hi = lo + ((in % targets) != 0 ? 1 : 0);
                    rec.exhaust_per_target_min = BigCount(in < targets ? mpz_class(0) : lo);
                    rec.exhaust_per_target_max = BigCount(hi);
                }
                plan.records.push_back(std::move(rec));
            }
        }
    }
    return plan;
}

FormationPlan plan_formation(Count n, double p, double beta, double width, Count exact_limit,
                             double birkhoff_tolerance) {
    require(n >= 1, ErrorCode::InvalidParameter, "n must be at least 1");
    require(beta > 0.0 && std::isfinite(beta), ErrorCode::InvalidParameter, "beta must be positive and finite");
    const double rate = rate_limit(p, beta);
    const Count m_nominal = static_cast<Count>(std::ceil(static_cast<double>(n) * rate * (1.0 - 1e-13)));
    const Count ell0 = bath_size_for(1.0, rate > 0.0 ? m_nominal : n);
    const double q = two_level_excitation(beta);
    const Count t_lo = one_window(n, p, width).lo;
    // Twice the target's zeros keeps C(k, e) growing with m for every typical pair.
    auto enough = [&](Count ell) { return ell - one_window(ell, q, width).hi >= 2 * (n - t_lo); };
    Count ell = ell0;
    if (!enough(ell)) {
        Count lo = ell;
        Count hi = std::max<Count>(1, 2 * ell);
        while (!enough(hi)) {
            lo = hi;
            hi *= 2;
        }
        while (hi - lo > 1) {
            const Count mid = lo + (hi - lo) / 2;
            if (enough(mid))
                hi = mid;
            else
                lo = mid;
        }
        ell = hi;
        while (!enough(ell)) ++ell;
    }
    FormationPlan plan = plan_formation_with_bath(n, ell, p, beta, width, exact_limit, birkhoff_tolerance);
    plan.ell_min = ell;
    plan.m_nominal = m_nominal;
    return plan;
}

FormationMap build_formation_map(const FormationPlan& plan, Count gibbs_ones, Count target_ones) {
    require(plan.bath_window.contains(gibbs_ones) && plan.target_window.contains(target_ones),
            ErrorCode::InvalidParameter, "type pair is not covered by the plan");
    require(plan.ell + plan.m <= 62 && plan.n + plan.k <= 62, ErrorCode::UnsupportedSize,
            "formation maps need at most 62 qubits");
    const mpz_class inputs = choose(plan.ell, gibbs_ones);
    require(inputs <= mpz_class(1UL << 22), ErrorCode::UnsupportedSize, "formation map too large to materialise");
    const Count e = gibbs_ones + plan.m - target_ones;
    const auto bath = enumerate_fixed_weight(static_cast<int>(plan.ell), static_cast<int>(gibbs_ones));
    const auto targets = enumerate_fixed_weight(static_cast<int>(plan.n), static_cast<int>(target_ones));
    const mpz_class exhausts = choose(plan.k, e);
    require(mpz_class(static_cast<unsigned long>((bath.size() + targets.size() - 1) / targets.size())) <= exhausts,
            ErrorCode::Internal, "plan violates its counting inequality");

    FormationMap map;
    map.bath_length = static_cast<int>(plan.ell);
    map.work_length = static_cast<int>(plan.m);
    map.target_length = static_cast<int>(plan.n);
    map.exhaust_length = static_cast<int>(plan.k);
    const Bits work = all_ones(map.work_length);
    Bits exhaust = unrank_fixed_weight(map.exhaust_length, static_cast<int>(e), std::uint64_t{0});
    for (std::size_t i = 0; i < bath.size(); ++i) {
        const std::size_t j = i % targets.size();
        if (i > 0 && j == 0) exhaust = next_same_weight(exhaust);
        map.pairs.emplace_back(concat(bath[i], work, map.work_length),
                               concat(targets[j], exhaust, map.exhaust_length));
    }
    return map;
}

}  // namespace athermal
