#include "athermal/distill.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <functional>
#include <map>

#include "athermal/error.hpp"

namespace athermal {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Log-domain comparisons closer than this are settled with exact integers when available.
constexpr double kAmbiguity = 1e-8;

double lnc(Count n, Count k) {
    if (k < 0 || k > n) return kNegInf;
    return log_binomial(n, k, 0);
}

mpz_class choose(Count n, Count k) { return binomial(n, k).value(); }

// Inputs to the shell-packing search. Weights are indexed by ones count
// inside their windows: bath weight C(ell, g), resource weight capacity(r).
struct PackingProblem {
    Count n = 0;
    Count ell = 0;
    CountRange bath;
    CountRange resource;
    std::vector<double> log_bath;
    std::vector<double> log_resource;
    bool exact = false;
    std::function<mpz_class(Count)> exact_bath;
    std::function<mpz_class(Count)> exact_resource;
};

struct PackingResult {
    Count m = 0;
    Count m_per_type = 0;
    std::pair<Count, Count> binding_type{0, 0};
    Count binding_shell = 0;
};

class ShellTable {
public:
    explicit ShellTable(const PackingProblem& pb) : pb_(pb) {
        lo_ = pb.bath.lo + pb.resource.lo;
        hi_ = pb.bath.hi + pb.resource.hi;
        const std::size_t size = static_cast<std::size_t>(hi_ - lo_ + 1);
        log_sum_.assign(size, kNegInf);
        log_max_.assign(size, kNegInf);
        argmax_.assign(size, pb.bath.lo);
        // First pass: per-shell maxima; second pass: sums relative to them.
        for (Count g = pb.bath.lo; g <= pb.bath.hi; ++g) {
            const double lb = pb.log_bath[static_cast<std::size_t>(g - pb.bath.lo)];
            for (Count r = pb.resource.lo; r <= pb.resource.hi; ++r) {
                const double v = lb + pb.log_resource[static_cast<std::size_t>(r - pb.resource.lo)];
                const std::size_t w = static_cast<std::size_t>(g + r - lo_);
                if (v > log_max_[w]) {
                    log_max_[w] = v;
                    argmax_[w] = g;
                }
            }
        }
        std::vector<double> acc(size, 0.0);
        for (Count g = pb.bath.lo; g <= pb.bath.hi; ++g) {
            const double lb = pb.log_bath[static_cast<std::size_t>(g - pb.bath.lo)];
            for (Count r = pb.resource.lo; r <= pb.resource.hi; ++r) {
                const std::size_t w = static_cast<std::size_t>(g + r - lo_);
                acc[w] += std::exp(lb + pb.log_resource[static_cast<std::size_t>(r - pb.resource.lo)] - log_max_[w]);
            }
        }
        for (std::size_t w = 0; w < size; ++w)
            if (std::isfinite(log_max_[w])) log_sum_[w] = log_max_[w] + std::log(acc[w]);
    }

    Count lo() const { return lo_; }
    Count hi() const { return hi_; }
    double log_sum(Count w) const { return log_sum_[static_cast<std::size_t>(w - lo_)]; }
    double log_max(Count w) const { return log_max_[static_cast<std::size_t>(w - lo_)]; }
    Count argmax(Count w) const { return argmax_[static_cast<std::size_t>(w - lo_)]; }

    const mpz_class& exact_sum(Count w) {
        auto it = sum_cache_.find(w);
        if (it != sum_cache_.end()) return it->second;
        mpz_class s = 0;
        for (Count g = std::max(pb_.bath.lo, w - pb_.resource.hi); g <= std::min(pb_.bath.hi, w - pb_.resource.lo); ++g)
            s += pb_.exact_bath(g) * pb_.exact_resource(w - g);
        return sum_cache_.emplace(w, std::move(s)).first->second;
    }

    const mpz_class& exact_max(Count w) {
        auto it = max_cache_.find(w);
        if (it != max_cache_.end()) return it->second;
        mpz_class best = 0;
        for (Count g = std::max(pb_.bath.lo, w - pb_.resource.hi); g <= std::min(pb_.bath.hi, w - pb_.resource.lo); ++g) {
            mpz_class v = pb_.exact_bath(g) * pb_.exact_resource(w - g);
            if (v > best) best = std::move(v);
        }
        return max_cache_.emplace(w, std::move(best)).first->second;
    }

private:
    const PackingProblem& pb_;
    Count lo_ = 0;
    Count hi_ = 0;
    std::vector<double> log_sum_;
    std::vector<double> log_max_;
    std::vector<Count> argmax_;
    std::map<Count, mpz_class> sum_cache_;
    std::map<Count, mpz_class> max_cache_;
};

// True when every shell fits: demand(w) <= C(N - m, w - m). Returns the first failing shell.
bool shells_fit(const PackingProblem& pb, ShellTable& table, Count m, bool joint, Count* failing) {
    const Count total = pb.n + pb.ell;
    for (Count w = table.lo(); w <= table.hi(); ++w) {
        const double demand = joint ? table.log_sum(w) : table.log_max(w);
        if (!std::isfinite(demand)) continue;
        const double supply = lnc(total - m, w - m);
        const double margin = supply - demand;
        bool ok = margin >= 0.0;
        if (std::abs(margin) < kAmbiguity * std::max(1.0, std::abs(demand)) && pb.exact) {
            const mpz_class& need = joint ? table.exact_sum(w) : table.exact_max(w);
            ok = choose(total - m, w - m) >= need;
        }
        if (!ok) {
            if (failing) *failing = w;
            return false;
        }
    }
    return true;
}

Count largest_fitting_m(const PackingProblem& pb, ShellTable& table, bool joint, Count* binding) {
    Count lo = 0;
    Count hi = table.lo();  // every shell needs w - m >= 0
    while (lo < hi) {
        const Count mid = lo + (hi - lo + 1) / 2;
        if (shells_fit(pb, table, mid, joint, nullptr))
            lo = mid;
        else
            hi = mid - 1;
    }
    if (binding) {
        *binding = table.lo();
        Count w = table.lo();
        if (lo < table.lo() && !shells_fit(pb, table, lo + 1, joint, &w)) *binding = w;
    }
    return lo;
}

PackingResult solve_packing(const PackingProblem& pb) {
    ShellTable table(pb);
    PackingResult res;
    res.m = largest_fitting_m(pb, table, true, &res.binding_shell);
    Count shell = 0;
    res.m_per_type = largest_fitting_m(pb, table, false, &shell);
    res.binding_type = {table.argmax(shell), shell - table.argmax(shell)};
    return res;
}

CountRange one_window(Count n, double p, double width) {
    if (n == 0) return {0, 0};
    return typical_ranges(n, FrequencyVector::binary(p), width)[1];
}

double window_mass(Count n, double p, CountRange w) { return n == 0 ? 1.0 : binomial_window_mass(n, p, w); }

std::vector<double> log_binomial_row(Count n, CountRange w) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(w.size()));
    for (Count x = w.lo; x <= w.hi; ++x) v.push_back(lnc(n, x));
    return v;
}

void validate_common(Count n, double beta, double width) {
    require(n >= 1, ErrorCode::InvalidParameter, "n must be at least 1");
    require(beta > 0.0 && std::isfinite(beta), ErrorCode::InvalidParameter, "beta must be positive and finite");
    require(width > 0.0 && std::isfinite(width), ErrorCode::InvalidParameter, "width must be positive");
}

void fill_records(DistillationPlan& plan) {
    const std::size_t count = static_cast<std::size_t>(plan.bath_window.size() * plan.resource_window.size());
    plan.record_count = count;
    plan.records_elided = count > kMaxStoredRecords;
    if (plan.records_elided) return;
    std::map<Count, mpz_class> shell_fill;
    for (Count g = plan.bath_window.lo; g <= plan.bath_window.hi; ++g) {
        for (Count r = plan.resource_window.lo; r <= plan.resource_window.hi; ++r) {
            DistillationRecord rec;
            const Count e = g + r - plan.m;
            rec.bath = TypeDescriptor::binary(plan.ell, g);
            rec.resource = TypeDescriptor::binary(plan.n, r);
            rec.exhaust = TypeDescriptor::binary(plan.k, e);
            rec.log_input_count = lnc(plan.ell, g) + plan.log_resource_capacity(r);
            rec.log_exhaust_count = lnc(plan.k, e);
            if (plan.exact_counting) {
                rec.input_count = binomial(plan.ell, g) * plan.resource_capacity(r);
                rec.exhaust_count = binomial(plan.k, e);
                mpz_class& used = shell_fill[g + r];
                rec.shell_offset = BigCount(used);
                used += rec.input_count->value();
            }
            plan.records.push_back(std::move(rec));
        }
    }
}

void finish_plan(DistillationPlan& plan, const PackingProblem& pb) {
    if (plan.no_resource) {
        plan.m = 0;
        plan.m_per_type_bound = 0;
    } else {
        const PackingResult res = solve_packing(pb);
        plan.m = res.m;
        plan.m_per_type_bound = res.m_per_type;
        plan.binding_type = res.binding_type;
        plan.binding_shell = res.binding_shell;
    }
    plan.k = plan.ell + plan.n - plan.m;
    plan.achieved_rate = static_cast<double>(plan.m) / static_cast<double>(plan.n);
    plan.epsilon = plan.ell == 0 ? kInfinity : static_cast<double>(plan.n) / static_cast<double>(plan.ell);
    fill_records(plan);
}

}  // namespace

Count bath_size_for(double rate, Count n) {
    if (!(rate > 0.0)) return 0;
    const double x = std::pow(rate * static_cast<double>(n), 1.5);
    return static_cast<Count>(std::ceil(x * (1.0 - 1e-13)));
}

Count solve_single_type(Count ell, Count gibbs_ones, Count n, Count resource_ones, Count exact_limit) {
    require(ell >= 0 && n >= 0, ErrorCode::InvalidParameter, "sizes must be nonnegative");
    require(0 <= gibbs_ones && gibbs_ones <= ell, ErrorCode::InvalidParameter, "gibbsOnes outside [0, ell]");
    require(0 <= resource_ones && resource_ones <= n, ErrorCode::InvalidParameter, "resourceOnes outside [0, n]");
    const Count total = ell + n;
    const Count ones = gibbs_ones + resource_ones;
    const bool exact = total <= exact_limit;
    const mpz_class need = exact ? mpz_class(choose(ell, gibbs_ones) * choose(n, resource_ones)) : mpz_class(0);
    const double log_need = lnc(ell, gibbs_ones) + lnc(n, resource_ones);
    auto fits = [&](Count m) {
        if (exact) return choose(total - m, ones - m) >= need;
        return lnc(total - m, ones - m) >= log_need;
    };
    // Feasibility only weakens as m grows: C(k-1, e-1) = C(k, e) e / k.
    Count lo = 0;
    Count hi = ones;
    while (lo < hi) {
        const Count mid = lo + (hi - lo + 1) / 2;
        if (fits(mid))
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

double rate_limit(double p, double beta) {
    require(p >= 0.0 && p <= 1.0, ErrorCode::InvalidParameter, "p must lie in [0,1]");
    require(beta > 0.0 && std::isfinite(beta), ErrorCode::InvalidParameter, "beta must be positive and finite");
    const double q = two_level_excitation(beta);
    const double num = binary_entropy(q) - binary_entropy(p) + beta * (p - q);
    const double den = binary_entropy(q) + beta * (1.0 - q);
    return std::max(0.0, num / den);
}

BigCount DistillationPlan::resource_capacity(Count r) const {
    BigCount full = binomial(n, r);
    if (!coherent) return full;
    for (const auto& b : blocks)
        if (b.energy == r && b.rank_cap) return *b.rank_cap;
    mpz_class typical = 0;
    for (Count s = eigen_window.lo; s <= eigen_window.hi; ++s) typical += choose(n, s);
    return full.value() < typical ? full : BigCount(typical);
}

double DistillationPlan::log_resource_capacity(Count r) const {
    if (!coherent) return lnc(n, r);
    for (const auto& b : blocks)
        if (b.energy == r) return b.log_rank_cap;
    return lnc(n, r);
}

double DistillationPlan::work_error_bound() const {
    return coherent ? std::min(1.0, std::sqrt(failure_mass)) : failure_mass;
}

const DistillationRecord* DistillationPlan::find(Count gibbs_ones, Count resource_ones) const {
    for (const auto& r : records)
        if (r.bath.ones() == gibbs_ones && r.resource.ones() == resource_ones) return &r;
    return nullptr;
}

DistillationPlan plan_distillation_with_bath(Count n, Count ell, double p, double beta, double width,
                                             Count exact_limit) {
    validate_common(n, beta, width);
    require(ell >= 0, ErrorCode::InvalidParameter, "ell must be nonnegative");
    DistillationPlan plan;
    plan.n = n;
    plan.ell = ell;
    plan.p = p;
    plan.beta = beta;
    plan.width = width;
    plan.q = two_level_excitation(beta);
    plan.rate_limit = rate_limit(p, beta);
    plan.no_resource = plan.rate_limit == 0.0 || std::abs(p - plan.q) <= 1e-15;
    plan.exact_counting = n + ell <= exact_limit;

    plan.bath_window = one_window(ell, plan.q, width);
    plan.resource_window = one_window(n, p, width);
    plan.bath_mass = window_mass(ell, plan.q, plan.bath_window);
    plan.resource_mass = window_mass(n, p, plan.resource_window);
    plan.failure_mass = std::max(0.0, 1.0 - plan.resource_mass * plan.bath_mass);

    PackingProblem pb;
    pb.n = n;
    pb.ell = ell;
    pb.bath = plan.bath_window;
    pb.resource = plan.resource_window;
    pb.log_bath = log_binomial_row(ell, pb.bath);
    pb.log_resource = log_binomial_row(n, pb.resource);
    pb.exact = plan.exact_counting;
    pb.exact_bath = [ell](Count g) { return choose(ell, g); };
    pb.exact_resource = [n](Count r) { return choose(n, r); };
    finish_plan(plan, pb);
    return plan;
}

DistillationPlan plan_distillation(Count n, double p, double beta, double width, Count exact_limit) {
    validate_common(n, beta, width);
    const double rate = rate_limit(p, beta);
    return plan_distillation_with_bath(n, bath_size_for(rate, n), p, beta, width, exact_limit);
}

DistillationPlan plan_distillation_general_with_bath(const DensityMatrix& rho, Count n, Count ell, double beta,
                                                     double width, Count exact_limit) {
    require(rho.dimension() == 2, ErrorCode::UnsupportedDimension,
            "coherent distillation is implemented for qubits only");
    validate_common(n, beta, width);
    const double excited = std::clamp(rho(1, 1).real(), 0.0, 1.0);
    if (rho.is_diagonal(1e-14)) return plan_distillation_with_bath(n, ell, excited, beta, width, exact_limit);

    DistillationPlan plan;
    plan.coherent = true;
    plan.n = n;
    plan.ell = ell;
    plan.p = excited;
    plan.beta = beta;
    plan.width = width;
    plan.q = two_level_excitation(beta);
    const GibbsState gamma = gibbs_state(Hamiltonian::two_level(), beta);
    plan.rate_limit = interconversion_rate(rho, DensityMatrix::basis_state(2, 1), gamma);
    plan.no_resource = plan.rate_limit == 0.0;
    plan.entropy = von_neumann_entropy(rho);
    plan.exact_counting = n + ell <= exact_limit;

    const Eigen::VectorXd ev = rho.eigenvalues();
    const double minor = std::clamp(ev(0), 0.0, 1.0);
    const CountRange eigen_window = one_window(n, minor, width);
    plan.eigen_window = eigen_window;
    plan.minor_eigenvalue = minor;
    plan.eigen_mass = window_mass(n, minor, eigen_window);
    std::vector<double> eigen_logs;
    mpz_class eigen_dim = 0;
    for (Count s = eigen_window.lo; s <= eigen_window.hi; ++s) {
        eigen_logs.push_back(lnc(n, s));
        if (plan.exact_counting) eigen_dim += choose(n, s);
    }
    const double log_eigen_dim = log_sum_exp(eigen_logs);

    plan.bath_window = one_window(ell, plan.q, width);
    plan.resource_window = one_window(n, excited, width);
    plan.bath_mass = window_mass(ell, plan.q, plan.bath_window);
    plan.energy_mass = window_mass(n, excited, plan.resource_window);
    plan.resource_mass = std::max(0.0, plan.energy_mass - (1.0 - plan.eigen_mass));
    plan.failure_mass = std::max(0.0, 1.0 - plan.resource_mass * plan.bath_mass);

    const auto energy_dist = FrequencyVector::binary(excited);
    for (Count r = plan.resource_window.lo; r <= plan.resource_window.hi; ++r) {
        EnergyBlock b;
        b.energy = r;
        b.probability = std::exp(log_type_probability(TypeDescriptor::binary(n, r), energy_dist));
        b.log_dimension = lnc(n, r);
        b.log_rank_cap = std::min(b.log_dimension, log_eigen_dim);
        if (plan.exact_counting) {
            mpz_class full = choose(n, r);
            b.rank_cap = BigCount(full < eigen_dim ? full : eigen_dim);
        }
        plan.blocks.push_back(std::move(b));
    }

    PackingProblem pb;
    pb.n = n;
    pb.ell = ell;
    pb.bath = plan.bath_window;
    pb.resource = plan.resource_window;
    pb.log_bath = log_binomial_row(ell, pb.bath);
    for (const auto& b : plan.blocks) pb.log_resource.push_back(b.log_rank_cap);
    pb.exact = plan.exact_counting;
    pb.exact_bath = [ell](Count g) { return choose(ell, g); };
    const DistillationPlan* view = &plan;
    pb.exact_resource = [view](Count r) { return view->resource_capacity(r).value(); };
    finish_plan(plan, pb);
    return plan;
}

DistillationPlan plan_distillation_general(const DensityMatrix& rho, Count n, double beta, double width,
                                           Count exact_limit) {
    require(rho.dimension() == 2, ErrorCode::UnsupportedDimension,
            "coherent distillation is implemented for qubits only");
    validate_common(n, beta, width);
    const GibbsState gamma = gibbs_state(Hamiltonian::two_level(), beta);
    const double rate = interconversion_rate(rho, DensityMatrix::basis_state(2, 1), gamma);
    return plan_distillation_general_with_bath(rho, n, bath_size_for(rate, n), beta, width, exact_limit);
}

StringMap build_string_map(const DistillationPlan& plan, Count gibbs_ones, Count resource_ones) {
    require(plan.bath_window.contains(gibbs_ones) && plan.resource_window.contains(resource_ones),
            ErrorCode::InvalidParameter, "composite type is not covered by the plan");
    require(plan.ell + plan.n <= 62, ErrorCode::UnsupportedSize, "string maps need ell + n <= 62");
    const Count w = gibbs_ones + resource_ones;
    const Count e = w - plan.m;
    // Offset = strings of earlier composite types (smaller g) in the same shell.
    mpz_class offset = 0;
    for (Count g = plan.bath_window.lo; g < gibbs_ones; ++g) {
        const Count r = w - g;
        if (plan.resource_window.contains(r)) offset += choose(plan.ell, g) * plan.resource_capacity(r).value();
    }
    const mpz_class resource_count = plan.resource_capacity(resource_ones).value();
    const mpz_class total = choose(plan.ell, gibbs_ones) * resource_count;
    require(total <= mpz_class(1UL << 22), ErrorCode::UnsupportedSize, "string map too large to materialise");
    require(offset + total <= choose(plan.k, e), ErrorCode::Internal, "plan violates its counting inequality");

    StringMap map;
    map.input_length = static_cast<int>(plan.ell + plan.n);
    map.exhaust_length = static_cast<int>(plan.k);
    map.work_length = static_cast<int>(plan.m);
    const auto bath = enumerate_fixed_weight(static_cast<int>(plan.ell), static_cast<int>(gibbs_ones));
    const unsigned long used = resource_count.get_ui();
    std::vector<Bits> resource = enumerate_fixed_weight(static_cast<int>(plan.n), static_cast<int>(resource_ones));
    resource.resize(std::min<std::size_t>(resource.size(), used));
    const Bits work = all_ones(static_cast<int>(plan.m));
    mpz_class index = offset;
    Bits out = unrank_fixed_weight(map.exhaust_length, static_cast<int>(e), index);
    bool first = true;
    for (Bits b : bath) {
        for (Bits r : resource) {
            if (!first) out = next_same_weight(out);
            first = false;
            map.pairs.emplace_back(concat(b, r, static_cast<int>(plan.n)), concat(out, work, map.work_length));
        }
    }
    return map;
}

}  // namespace athermal
