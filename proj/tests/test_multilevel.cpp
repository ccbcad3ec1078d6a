#include <doctest.h>

#include "athermal/distill.hpp"
#include "athermal/multilevel.hpp"
#include "oracles.hpp"

using namespace athermal;
using doctest::Approx;

namespace {
// ln of n! / prod c_i! through lgamma.
double log_multinomial(const std::vector<Count>& c) {
    Count n = 0;
    double s = 0.0;
    for (Count x : c) {
        n += x;
        s -= std::lgamma(double(x) + 1.0);
    }
    return s + std::lgamma(double(n) + 1.0);
}
}  // namespace

TEST_SUITE("multilevel") {
    TEST_CASE("zero shift merges two type classes") {
        const TypeDescriptor res({1, 2, 3}), bath({4, 1, 1});
        const auto r = unitarity_condition(res, bath, OccupationShift{{0, 0, 0}, 6}, 1000);
        CHECK(r.holds);
        CHECK(r.exact);
        const double expected = log_multinomial({5, 3, 4}) - log_multinomial({1, 2, 3}) - log_multinomial({4, 1, 1});
        CHECK(r.margin == Approx(expected).epsilon(1e-12));
        CHECK(r.margin >= 0.0);
    }

    TEST_CASE("collapsing everything to one level fails") {
        const TypeDescriptor res({2, 2, 2}), bath({3, 2, 1});
        // Move every occupant of levels 0 and 1 to level 2 (energy is not conserved, counting fails).
        const auto r = unitarity_condition(res, bath, OccupationShift{{5, 4, -9}, 6}, 1000);
        CHECK_FALSE(r.holds);
    }

    // With a ledger work system all n + ell qubits stay in the output, so the
    // qubit condition C(l+n-m, g+r-m) becomes C(l+n, g+r-m) and never allows less.
    TEST_CASE("two levels reduce to a binomial counting inequality") {
        for (int l = 2; l <= 20; l += 3)
            for (int g = 0; g <= l; ++g)
                for (int n = 1; n <= 8; ++n)
                    for (int r = 0; r <= n; ++r) {
                        const auto need = oracle::choose(l, g) * oracle::choose(n, r);
                        Count ledger = 0;
                        for (int m = 0; m <= g + r; ++m)
                            if (oracle::choose(l + n, g + r - m) >= need) ledger = m;
                        const TypeDescriptor res({n - r, r}), bath({l - g, g});
                        CHECK(unitarity_condition(res, bath, OccupationShift{{-ledger, ledger}, n}).holds);
                        if (ledger + 1 <= g + r)
                            CHECK_FALSE(unitarity_condition(res, bath, OccupationShift{{-(ledger + 1), ledger + 1}, n}).holds);
                        CHECK(ledger >= solve_single_type(l, g, n, r));
                    }
    }

    TEST_CASE("asymptotic condition") {
        const FrequencyVector gamma(oracle::boltzmann({0, 1, 2}, 1.0));
        const FrequencyVector rho({0.1, 0.2, 0.7});
        CHECK(asymptotic_condition(rho, gamma, {0.0, 0.0, 0.0}));
        // Gibbs input: only shifts with -x . ln gamma <= 0 pass.
        CHECK(asymptotic_condition(gamma, gamma, {0.1, 0.0, -0.1}));
        CHECK_FALSE(asymptotic_condition(gamma, gamma, {-0.1, 0.0, 0.1}));

        // A shift saturating the condition releases exactly D / beta of work.
        const double d = oracle::relative_entropy(DensityMatrix::diagonal(rho.freqs).matrix(),
                                                  DensityMatrix::diagonal(gamma.freqs).matrix());
        const double s = d / 2.0;  // x = (-s, 0, s): -x . ln gamma = s (ln g0 - ln g2) = 2 s
        const std::vector<double> x = {-s, 0.0, s};
        CHECK(asymptotic_margin(rho, gamma, x) == Approx(0.0).epsilon(1e-12));
        const double work = 0.0 * x[0] + 1.0 * x[1] + 2.0 * x[2];
        CHECK(1.0 * work == Approx(d).epsilon(1e-12));
    }

    TEST_CASE("rounding to types") {
        CHECK(round_to_type(10, FrequencyVector({0.25, 0.25, 0.5})).counts == std::vector<Count>{3, 2, 5});
        CHECK(round_to_type(7, FrequencyVector({0.0, 0.0, 1.0})).counts == std::vector<Count>{0, 0, 7});
    }

    TEST_CASE("Gibbs input extracts nothing per copy") {
        const auto g = oracle::boltzmann({0, 1, 2}, 1.0);
        const auto w = max_work(FrequencyVector(g), Hamiltonian({0, 1, 2}), 1.0, 100, 10000);
        CHECK(w.limit_per_copy == Approx(0.0).epsilon(1e-12));
        CHECK(w.per_copy <= 0.1);
    }

    TEST_CASE("top-level work approaches the free-energy bound") {
        const Hamiltonian h({0, 1, 2});
        const double lnz = std::log(1.0 + std::exp(-1.0) + std::exp(-2.0));
        const double limit = 2.0 + lnz;
        CHECK(limit == Approx(2.4076).epsilon(1e-4));
        double last = 0.0;
        for (Count n : {10, 100, 1000}) {
            const auto w = max_work(FrequencyVector({0, 0, 1}), h, 1.0, n);
            CHECK(w.limit_per_copy == Approx(limit).epsilon(1e-12));
            CHECK(w.per_copy <= limit + 1e-12);
            CHECK(w.per_copy >= last);
            CHECK(w.extracted == Approx(double(n) * w.per_copy));
            last = w.per_copy;
        }
    }

    TEST_CASE("energy bookkeeping of the reported shift") {
        const Hamiltonian h({0, 1, 2});
        const auto w = max_work(FrequencyVector({0.1, 0.2, 0.7}), h, 1.0, 200);
        double work = 0.0;
        Count moved = 0;
        for (std::size_t i = 0; i < w.per_level_delta.size(); ++i) {
            work += h.energy(i) * double(w.per_level_delta[i]);
            moved += w.per_level_delta[i];
        }
        CHECK(moved == 0);
        CHECK(work == Approx(w.extracted));
        const auto check = unitarity_condition(w.worst_resource, w.worst_bath, OccupationShift{w.per_level_delta, 200});
        CHECK(check.holds);
    }

    TEST_CASE("two-level work matches distillation") {
        for (Count n : {20, 60}) {
            const double q = 1.0 / (1.0 + std::exp(1.0));
            const Count ell = 3 * n;
            const auto w = max_work(FrequencyVector::binary(0.9), Hamiltonian::two_level(), 1.0, n, ell, 1.0);
            const auto plan = plan_distillation_with_bath(n, ell, 0.9, 1.0, 1.0);
            CHECK(w.extracted >= double(plan.m) - 1e-9);
            CHECK(w.per_copy <= (oracle::binary_entropy(q) - oracle::binary_entropy(0.9) + (0.9 - q)) + 0.5);
        }
    }
}
