// Acceptance criteria 1-9: one PASS/FAIL line each, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "athermal/coherent.hpp"
#include "athermal/distill.hpp"
#include "athermal/form.hpp"
#include "athermal/multilevel.hpp"
#include "athermal/properties.hpp"
#include "athermal/simulate.hpp"
#include "oracles.hpp"

using namespace athermal;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::string list(const std::vector<double>& xs, const char* f = "%.4g") {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + fmt(f, xs[i]);
    return s + "]";
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double oracle_rate(double p, double beta) {
    const double q = std::exp(-beta) / (1.0 + std::exp(-beta));
    return (oracle::binary_entropy(q) - oracle::binary_entropy(p) + beta * (p - q)) /
           (oracle::binary_entropy(q) + beta * (1.0 - q));
}

Outcome rate_identity() {
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            const double p = 0.05 + 0.9 * i / 19.0, beta = 0.1 + 4.9 * j / 19.0;
            const auto g = gibbs_state(Hamiltonian::two_level(), beta);
            const double d[2] = {1.0 - p, p};
            const double ratio = relative_entropy(DensityMatrix::diagonal(std::span<const double>(d, 2)), g.density()) /
                                 relative_entropy(DensityMatrix::basis_state(2, 1), g.density());
            worst = std::max({worst, std::abs(rate_limit(p, beta) - ratio), std::abs(oracle_rate(p, beta) - ratio)});
        }
    const double t = seconds_since(t0);
    return {worst <= 1e-12 && t < 1.0, "max |closed form - D ratio| = " + fmt("%.2e", worst) + " over 400 points; " +
                                            fmt("%.3f", t) + " s (budget 1 s)"};
}

Outcome oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    std::size_t cases = 0, mismatches = 0;
    for (Count ell = 0; ell <= 12; ++ell)
        for (Count n = 0; n <= 12; ++n)
            for (Count g = 0; g <= ell; ++g)
                for (Count r = 0; r <= n; ++r) {
                    ++cases;
                    if (solve_single_type(ell, g, n, r) != oracle_max_m(ell, g, n, r)) ++mismatches;
                }
    const double t = seconds_since(t0);
    return {mismatches == 0 && t < 60.0, std::to_string(mismatches) + " mismatches in " + std::to_string(cases) +
                                             " cases; " + fmt("%.2f", t) + " s (budget 60 s)"};
}

Outcome convergence() {
    const auto t0 = std::chrono::steady_clock::now();
    const double limit = oracle_rate(0.75, 1.0);
    std::vector<double> deficits;
    for (Count n : {100, 1000, 10000, 100000}) {
        const auto plan = plan_distillation(n, 0.75, 1.0);
        deficits.push_back(limit - double(plan.m) / double(n));
    }
    bool ok = std::abs(limit - 0.38144) < 5e-6;
    for (std::size_t i = 0; i < deficits.size(); ++i) {
        ok = ok && deficits[i] > 0.0;
        if (i) ok = ok && deficits[i] < deficits[i - 1];
    }
    ok = ok && deficits.back() < 0.05 * limit;
    const double t = seconds_since(t0);
    return {ok && t < 300.0, "R_limit = " + fmt("%.6f", limit) + ", deficits " + list(deficits) + ", bound at 1e5 " +
                                 fmt("%.4g", 0.05 * limit) + "; " + fmt("%.1f", t) + " s (budget 300 s)"};
}

Outcome reversibility() {
    std::vector<double> products;
    for (Count n : {100, 1000, 10000, 100000}) {
        const auto d = plan_distillation(n, 0.75, 1.0);
        const auto f = plan_formation(n, 0.75, 1.0);
        // Copies per excited qubit formed, times excited qubits per copy distilled.
        products.push_back((double(f.n) / double(f.m)) * (double(d.m) / double(d.n)));
    }
    bool increasing = true;
    for (std::size_t i = 1; i < products.size(); ++i) increasing = increasing && products[i] > products[i - 1];
    const double at_1e4 = products[2];
    return {at_1e4 >= 0.85 && at_1e4 <= 1.0 && increasing,
            "product over n = 1e2..1e5: " + list(products) + "; at 1e4 need [0.85, 1]"};
}

Outcome quantum_legality() {
    std::size_t plans = 0, coherent = 0, bad = 0, coherent_above_mass = 0;
    double worst_instance = 0.0, worst_slack = -1.0;
    for (Count ell = 1; ell <= 13; ++ell)
        for (Count n = 1; n + ell <= 14; ++n)
            for (double p : {0.6, 0.9, 1.0})
                for (double width : {0.5, 1.0, 3.0}) {
                    const auto t0 = std::chrono::steady_clock::now();
                    const auto plan = plan_distillation_with_bath(n, ell, p, 1.0, width);
                    const auto rep = execute_plan_quantum(plan);
                    worst_instance = std::max(worst_instance, seconds_since(t0));
                    ++plans;
                    worst_slack = std::max(worst_slack, rep.work_trace_distance - plan.failure_mass);
                    if (!rep.commutes || !rep.trace_preserving || !rep.bijective ||
                        rep.work_trace_distance > plan.failure_mass + 1e-12)
                        ++bad;
                }
    Vector v(2);
    v << std::sqrt(0.2), std::sqrt(0.8);
    const auto rho = DensityMatrix::pure(v);
    for (Count n : {2, 4, 6, 8})
        for (Count ell : {2, 4, 6}) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto plan = plan_distillation_general_with_bath(rho, n, ell, 1.0, 1.0);
            const auto rep = execute_plan_quantum(plan, rho);
            worst_instance = std::max(worst_instance, seconds_since(t0));
            ++coherent;
            if (rep.work_trace_distance > plan.failure_mass + 1e-12) ++coherent_above_mass;
            // Coherent inputs are only block-diagonalised, so the gentle-measurement bound applies.
            if (!rep.commutes || !rep.trace_preserving || rep.work_trace_distance > plan.work_error_bound() + 1e-12) ++bad;
        }
    return {bad == 0 && worst_instance < 120.0,
            std::to_string(plans) + " diagonal + " + std::to_string(coherent) + " coherent plans, " + std::to_string(bad) +
                " illegal; max(T - failureMass) on diagonal plans " + fmt("%.2e", worst_slack) + "; " +
                std::to_string(coherent_above_mass) + " coherent plans exceed failureMass but not sqrt(failureMass); slowest " +
                fmt("%.2f", worst_instance) + " s (budget 120 s)"};
}

Outcome exhaust_structure() {
    std::vector<double> per_system;
    bool pinsker = true;
    for (Count n : {4, 6, 8, 10}) {
        const auto plan = plan_distillation(n, 0.75, 1.0);
        const auto rep = exhaust_analysis(plan, 1);
        for (std::size_t i = 0; i < rep.rel_entropies.size(); ++i)
            pinsker = pinsker && rep.measured_trace_norms[i] <= std::sqrt(2.0 * rep.rel_entropies[i]) + 1e-12;
        per_system.push_back(rep.per_system_rel_entropy);
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < per_system.size(); ++i) decreasing = decreasing && per_system[i] < per_system[i - 1];
    return {pinsker && decreasing, std::string("Pinsker ") + (pinsker ? "holds" : "violated") +
                                       " on every single-system reduction; D/k at n = 4, 6, 8, 10: " + list(per_system)};
}

Outcome coherent_formation() {
    double worst_overlap = 0.0;
    for (int n = 1; n <= 64; ++n)
        for (int delta = 0; delta <= n; ++delta) {
            Eigen::VectorXd a = Eigen::VectorXd::Zero(3 * n), b = Eigen::VectorXd::Zero(3 * n);
            for (int i = 0; i < n; ++i) {
                a(n + i) = 1.0 / std::sqrt(double(n));
                b(n + delta + i) = 1.0 / std::sqrt(double(n));
            }
            worst_overlap = std::max(worst_overlap, std::abs(a.dot(b) - shift_overlap(n, delta)));
        }
    const double h = 1.0 / std::sqrt(2.0);
    std::vector<double> exact, bounds;
    bool below = true;
    for (Count n : {4, 6, 8, 10}) {
        const auto rep = coherent_formation_error(CoherentTarget({h, 0.0}, {h, 0.0}, 1.0, n), true);
        exact.push_back(*rep.trace_distance);
        bounds.push_back(rep.analytic_bound);
        below = below && *rep.trace_distance <= rep.analytic_bound + 1e-12;
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < exact.size(); ++i) decreasing = decreasing && exact[i] < exact[i - 1];
    return {worst_overlap < 1e-12 && below && decreasing,
            "overlap error " + fmt("%.1e", worst_overlap) + " for N <= 64; exact T " + list(exact) + ", bounds " +
                list(bounds) + "; below bound: " + (below ? "yes" : "no") + ", decreasing: " + (decreasing ? "yes" : "no")};
}

Outcome monotone_properties() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto s = run_property_checks(20240601, 10000, 16);
    const double t = seconds_since(t0);
    return {s.violations() == 0 && t < 60.0,
            std::to_string(s.violations()) + " violations in " + std::to_string(s.instances) +
                " instances (affinity " + std::to_string(s.affinity_violations) + ", subextensivity " +
                std::to_string(s.subextensivity_violations) + ", additivity " + std::to_string(s.additivity_violations) +
                ", continuity " + std::to_string(s.continuity_violations) + "); " + fmt("%.2f", t) + " s (budget 60 s)"};
}

Outcome multilevel_work() {
    const Hamiltonian h({0.0, 1.0, 2.0});
    const double limit = 2.0 + std::log(1.0 + std::exp(-1.0) + std::exp(-2.0));
    std::vector<double> per_copy;
    bool never_exceeds = true;
    for (Count n : {10, 100, 1000, 10000}) {
        const auto w = max_work(FrequencyVector({0.0, 0.0, 1.0}), h, 1.0, n);
        per_copy.push_back(w.per_copy);
        never_exceeds = never_exceeds && w.per_copy <= limit;
    }
    const bool close = per_copy.back() >= 0.95 * limit;
    return {close && never_exceeds, "per-copy work " + list(per_copy, "%.5f") + " vs limit " + fmt("%.5f", limit) +
                                        "; need >= " + fmt("%.5f", 0.95 * limit) + " at n = 1e4"};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"rate-formula identity", rate_identity},
        {"oracle equivalence", oracle_equivalence},
        {"finite-size convergence", convergence},
        {"reversibility", reversibility},
        {"exact quantum legality", quantum_legality},
        {"exhaust structure", exhaust_structure},
        {"coherent formation", coherent_formation},
        {"continuity and monotone properties", monotone_properties},
        {"d-level work", multilevel_work},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("criterion %zu %s: %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
