#include "athermal/multilevel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "athermal/distill.hpp"
#include "athermal/error.hpp"

namespace athermal {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kBoxCap = 4'000'000;
constexpr std::size_t kMaxExactDimension = 6;

double lfact(Count x) { return static_cast<double>(std::lgammal(static_cast<long double>(x) + 1.0L)); }

double log_multinomial(const std::vector<Count>& c) {
    Count total = 0;
    double s = 0.0;
    for (Count x : c) {
        if (x < 0) return kNegInf;
        total += x;
        s -= lfact(x);
    }
    return s + lfact(total);
}

double dot(const std::vector<double>& h, const std::vector<Count>& c) {
    long double e = 0.0L;
    for (std::size_t i = 0; i < c.size(); ++i) e += static_cast<long double>(h[i]) * static_cast<long double>(c[i]);
    return static_cast<double>(e);
}

// Maximiser of ln M(o) - lambda H.o over integer o with sum N (separable concave,
// so pairwise-exchange optimality is global optimality).
std::vector<Count> lagrangian_counts(const std::vector<double>& h, Count total, double lambda) {
    const std::size_t d = h.size();
    const double e0 = *std::min_element(h.begin(), h.end());
    std::vector<double> w(d);
    for (std::size_t i = 0; i < d; ++i) w[i] = std::exp(-lambda * (h[i] - e0));
    const double z = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<Count> o(d);
    Count used = 0;
    for (std::size_t i = 0; i < d; ++i) {
        o[i] = static_cast<Count>(std::floor(static_cast<double>(total) * w[i] / z));
        used += o[i];
    }
    for (Count left = total - used; left > 0; --left) {
        std::size_t best = 0;
        double gain = kNegInf;
        for (std::size_t i = 0; i < d; ++i) {
            const double g = -std::log(static_cast<double>(o[i] + 1)) - lambda * h[i];
            if (g > gain) {
                gain = g;
                best = i;
            }
        }
        ++o[best];
    }
    for (bool improved = true; improved;) {
        improved = false;
        for (std::size_t i = 0; i < d; ++i) {
            if (o[i] == 0) continue;
            for (std::size_t j = 0; j < d; ++j) {
                if (i == j) continue;
                const double loss = -std::log(static_cast<double>(o[i])) - lambda * h[i];
                const double gain = -std::log(static_cast<double>(o[j] + 1)) - lambda * h[j];
                if (gain > loss + 1e-15) {
                    --o[i];
                    ++o[j];
                    improved = true;
                    if (o[i] == 0) break;
                }
            }
        }
    }
    return o;
}

struct Candidate {
    std::vector<Count> counts;
    double energy = 0.0;
    double log_count = 0.0;
};

bool better(const Candidate& a, const Candidate& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.counts > b.counts;  // smaller removal vector lexicographically
}

// Box enumeration around a feasible centre; the largest level absorbs the sum.
Candidate box_search(const std::vector<double>& h, Count total, double min_log, const std::vector<Count>& centre,
                     bool* certified) {
    const std::size_t d = h.size();
    const std::size_t absorb =
        static_cast<std::size_t>(std::max_element(centre.begin(), centre.end()) - centre.begin());
    std::vector<std::size_t> free_levels;
    for (std::size_t i = 0; i < d; ++i)
        if (i != absorb) free_levels.push_back(i);
    const std::size_t f = free_levels.size();
    const double per_axis = std::pow(static_cast<double>(kBoxCap), 1.0 / static_cast<double>(f));
    const Count radius = std::max<Count>(1, static_cast<Count>((per_axis - 1.0) / 2.0));

    // ln(x!) tables over each axis range.
    std::vector<Count> lo(f);
    std::vector<std::vector<double>> table(f);
    for (std::size_t a = 0; a < f; ++a) {
        lo[a] = std::max<Count>(0, centre[free_levels[a]] - radius);
        const Count hi = std::min(total, centre[free_levels[a]] + radius);
        for (Count x = lo[a]; x <= hi; ++x) table[a].push_back(lfact(x));
    }
    const double log_total = lfact(total);

    Candidate best;
    best.energy = std::numeric_limits<double>::infinity();
    bool on_edge = false;
    std::vector<Count> idx(f, 0);
    std::vector<Count> o(d);
    while (true) {
        Count used = 0;
        double lm = log_total;
        double energy = 0.0;
        for (std::size_t a = 0; a < f; ++a) {
            const Count x = lo[a] + idx[a];
            o[free_levels[a]] = x;
            used += x;
            lm -= table[a][static_cast<std::size_t>(idx[a])];
            energy += h[free_levels[a]] * static_cast<double>(x);
        }
        const Count rest = total - used;
        if (rest >= 0) {
            o[absorb] = rest;
            lm -= lfact(rest);
            energy += h[absorb] * static_cast<double>(rest);
            if (lm >= min_log) {
                Candidate c{o, dot(h, o), lm};
                if (better(c, best)) {
                    best = c;
                    on_edge = false;
                    for (std::size_t a = 0; a < f; ++a) {
                        const Count x = lo[a] + idx[a];
                        const bool at_lo = idx[a] == 0 && lo[a] > 0;
                        const bool at_hi = static_cast<std::size_t>(idx[a]) + 1 == table[a].size() && x < total;
                        on_edge = on_edge || at_lo || at_hi;
                    }
                }
            }
        }
        std::size_t a = 0;
        while (a < f) {
            if (static_cast<std::size_t>(++idx[a]) < table[a].size()) break;
            idx[a] = 0;
            ++a;
        }
        if (a == f) break;
    }
    *certified = !on_edge;
    return best;
}

// Greedy descent for large d: accept any count move that lowers energy and stays feasible.
Candidate hill_climb(const std::vector<double>& h, Count total, double min_log, std::vector<Count> o) {
    const std::size_t d = h.size();
    Candidate cur{o, dot(h, o), log_multinomial(o)};
    for (Count step = std::max<Count>(1, total / 4); step >= 1; step /= 2) {
        for (bool moved = true; moved;) {
            moved = false;
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    if (i == j || h[j] >= h[i] || cur.counts[i] < step) continue;
                    auto next = cur.counts;
                    next[i] -= step;
                    next[j] += step;
                    const double lm = log_multinomial(next);
                    if (lm >= min_log) {
                        cur = {next, dot(h, next), lm};
                        moved = true;
                    }
                }
            }
        }
        if (step == 1) break;
    }
    return cur;
}

std::vector<std::vector<Count>> shifted_types(const TypeDescriptor& base, Count n, const FrequencyVector& f,
                                              double width) {
    std::vector<std::vector<Count>> out{base.counts};
    if (n == 0) return out;
    const auto ranges = typical_ranges(n, f, width);
    const std::size_t d = base.dimension();
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            if (i == j || f[i] == 0.0 || f[j] == 0.0) continue;
            const Count s = std::min(base.counts[i] - ranges[i].lo, ranges[j].hi - base.counts[j]);
            if (s <= 0) continue;
            auto c = base.counts;
            c[i] -= s;
            c[j] += s;
            out.push_back(std::move(c));
        }
    }
    return out;
}

}  // namespace

std::vector<double> OccupationShift::x() const {
    std::vector<double> v(delta.size());
    for (std::size_t i = 0; i < delta.size(); ++i) v[i] = static_cast<double>(delta[i]) / static_cast<double>(n);
    return v;
}

double OccupationShift::work(const Hamiltonian& h) const {
    require(h.dimension() == delta.size(), ErrorCode::InvalidParameter, "dimension mismatch");
    return dot(h.energies(), delta);
}

TypeDescriptor round_to_type(Count n, const FrequencyVector& f) {
    const std::size_t d = f.dimension();
    std::vector<Count> c(d);
    std::vector<std::pair<double, std::size_t>> rem;
    Count used = 0;
    for (std::size_t i = 0; i < d; ++i) {
        const double x = static_cast<double>(n) * f[i];
        c[i] = static_cast<Count>(std::floor(x));
        used += c[i];
        if (f[i] > 0.0) rem.emplace_back(x - std::floor(x), i);
    }
    std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; used < n && r < rem.size(); ++r, ++used) ++c[rem[r].second];
    return TypeDescriptor(std::move(c));
}

UnitarityResult unitarity_condition(const TypeDescriptor& resource, const TypeDescriptor& bath,
                                    const OccupationShift& shift, Count exact_limit) {
    const std::size_t d = resource.dimension();
    require(bath.dimension() == d && shift.delta.size() == d, ErrorCode::InvalidParameter, "dimension mismatch");
    require(std::accumulate(shift.delta.begin(), shift.delta.end(), Count{0}) == 0, ErrorCode::InvalidShift,
            "occupation shift must sum to zero");
    std::vector<Count> out(d);
    for (std::size_t i = 0; i < d; ++i) {
        out[i] = resource.counts[i] + bath.counts[i] - shift.delta[i];
        require(out[i] >= 0, ErrorCode::InvalidShift, "shift empties a level below zero");
    }
    const TypeDescriptor after(out);
    UnitarityResult r;
    r.exact = after.total() <= exact_limit;
    if (r.exact) {
        const BigCount lhs = type_cardinality(resource) * type_cardinality(bath);
        const BigCount rhs = type_cardinality(after);
        r.holds = lhs <= rhs;
        r.margin = rhs.log() - lhs.log();
    } else {
        r.margin = log_multinomial(out) - log_multinomial(resource.counts) - log_multinomial(bath.counts);
        r.holds = r.margin >= 0.0;
    }
    return r;
}

UnitarityResult unitarity_condition(const FrequencyVector& f_rho, const FrequencyVector& f_gamma,
                                    const OccupationShift& shift, Count n, Count ell, Count exact_limit) {
    return unitarity_condition(round_to_type(n, f_rho), round_to_type(ell, f_gamma), shift, exact_limit);
}

double asymptotic_margin(const FrequencyVector& f_rho, const FrequencyVector& f_gamma, const std::vector<double>& x) {
    require(f_rho.dimension() == f_gamma.dimension() && x.size() == f_rho.dimension(), ErrorCode::InvalidParameter,
            "dimension mismatch");
    double lhs = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        require(f_gamma[i] > 0.0, ErrorCode::InvalidParameter, "fGamma must have full support");
        lhs -= x[i] * std::log(f_gamma[i]);
    }
    return classical_relative_entropy(f_rho.freqs, f_gamma.freqs) - lhs;
}

bool asymptotic_condition(const FrequencyVector& f_rho, const FrequencyVector& f_gamma, const std::vector<double>& x) {
    return asymptotic_margin(f_rho, f_gamma, x) >= -1e-12;
}

MinEnergyResult min_energy_counts(const Hamiltonian& h, Count total, double min_log_count) {
    const auto& e = h.energies();
    const std::size_t d = e.size();
    MinEnergyResult res;
    // Everything in a ground level already suffices.
    std::vector<Count> ground(d, 0);
    ground[static_cast<std::size_t>(std::min_element(e.begin(), e.end()) - e.begin())] = total;
    if (min_log_count <= 0.0) {
        res.counts = ground;
        res.energy = dot(e, ground);
        res.log_count = 0.0;
        res.certified = true;
        return res;
    }
    auto feasible = [&](double lambda) { return log_multinomial(lagrangian_counts(e, total, lambda)) >= min_log_count; };
    require(feasible(0.0), ErrorCode::Infeasible, "no output type has enough strings");
    const double spread = h.max_energy() - h.min_energy();
    double lo = 0.0;
    double hi = spread > 0.0 ? 1.0 / spread : 1.0;
    while (feasible(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) break;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            lo = mid;
        else
            hi = mid;
    }
    const auto centre = lagrangian_counts(e, total, lo);
    Candidate best;
    if (d <= kMaxExactDimension) {
        best = box_search(e, total, min_log_count, centre, &res.certified);
    } else {
        best = hill_climb(e, total, min_log_count, centre);
        res.certified = false;
    }
    res.counts = best.counts;
    res.energy = best.energy;
    res.log_count = best.log_count;
    return res;
}

WorkLedger max_work(const FrequencyVector& f_rho, const Hamiltonian& h, double beta, Count n, Count ell,
                    double width) {
    require(f_rho.dimension() == h.dimension(), ErrorCode::InvalidParameter, "dimension mismatch");
    require(beta > 0.0 && std::isfinite(beta), ErrorCode::InvalidParameter, "beta must be positive and finite");
    require(n >= 1, ErrorCode::InvalidParameter, "n must be at least 1");
    const GibbsState gamma = gibbs_state(h, beta);
    const FrequencyVector f_gamma(gamma.probs.probs());
    const double divergence = classical_relative_entropy(f_rho.freqs, f_gamma.freqs);
    if (ell == 0) ell = bath_size_for(divergence, n);

    WorkLedger ledger;
    ledger.n = n;
    ledger.ell = ell;
    ledger.limit_per_copy = divergence / beta;
    ledger.exact = true;
    ledger.extracted = std::numeric_limits<double>::infinity();

    const TypeDescriptor res0 = round_to_type(n, f_rho);
    const TypeDescriptor bath0 = ell > 0 ? round_to_type(ell, f_gamma) : TypeDescriptor(std::vector<Count>(h.dimension(), 0));
    const auto resources = shifted_types(res0, n, f_rho, width);
    const auto baths = shifted_types(bath0, ell, f_gamma, width);
    const auto& e = h.energies();
    for (const auto& a : resources) {
        for (const auto& b : baths) {
            ++ledger.candidates;
            std::vector<Count> joint(a.size());
            for (std::size_t i = 0; i < a.size(); ++i) joint[i] = a[i] + b[i];
            const double need = log_multinomial(a) + log_multinomial(b);
            const MinEnergyResult out = min_energy_counts(h, n + ell, need);
            const double work = dot(e, joint) - out.energy;
            ledger.exact = ledger.exact && out.certified;
            if (work < ledger.extracted) {
                ledger.extracted = work;
                ledger.worst_resource = TypeDescriptor(a);
                ledger.worst_bath = TypeDescriptor(b);
                ledger.per_level_delta.assign(a.size(), 0);
                for (std::size_t i = 0; i < a.size(); ++i) ledger.per_level_delta[i] = joint[i] - out.counts[i];
                ledger.feasibility_margin = out.log_count - need;
            }
        }
    }
    ledger.partial_search = !ledger.exact;
    // The empty shift is always feasible, so the worst case never goes below zero.
    if (ledger.extracted < 0.0) {
        ledger.extracted = 0.0;
        ledger.per_level_delta.assign(h.dimension(), 0);
        ledger.feasibility_margin = log_multinomial([&] {
            std::vector<Count> j(h.dimension());
            for (std::size_t i = 0; i < j.size(); ++i) j[i] = ledger.worst_resource.counts[i] + ledger.worst_bath.counts[i];
            return j;
        }()) - log_multinomial(ledger.worst_resource.counts) - log_multinomial(ledger.worst_bath.counts);
    }
    ledger.per_copy = ledger.extracted / static_cast<double>(n);
    OccupationShift shift{ledger.per_level_delta, n};
    double bhx = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) bhx += beta * e[i] * shift.x()[i];
    ledger.asymptotic_margin = divergence - bhx;
    return ledger;
}

}  // namespace athermal
