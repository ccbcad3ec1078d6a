#include <doctest.h>

#include <set>

#include "athermal/distill.hpp"
#include "athermal/error.hpp"
#include "oracles.hpp"

using namespace athermal;
using doctest::Approx;

namespace {
double closed_rate(double p, double beta) {
    const double q = 1.0 / (1.0 + std::exp(beta));
    return (oracle::binary_entropy(q) - oracle::binary_entropy(p) + beta * (p - q)) / -std::log(q);
}

// Largest m with C(l,g) C(n,r) <= C(l+n-m, g+r-m), by direct search.
Count brute_single_type(int l, int g, int n, int r) {
    const auto need = oracle::choose(l, g) * oracle::choose(n, r);
    Count best = 0;
    for (int m = 0; m <= g + r; ++m)
        if (oracle::choose(l + n - m, g + r - m) >= need) best = m;
    return best;
}
}  // namespace

TEST_SUITE("distill") {
    TEST_CASE("single-type examples") {
        CHECK(solve_single_type(0, 0, 2, 2) == 2);
        CHECK(solve_single_type(4, 1, 2, 2) == 2);
        CHECK(solve_single_type(0, 0, 0, 0) == 0);
        // Half-filled strings at q = 1/2: the joint shell C(16, 7) = 11440 still
        // holds C(8, 4)^2 = 4900 inputs, so exact counting moves one excitation.
        CHECK(solve_single_type(8, 4, 8, 4) == 1);
        CHECK(solve_single_type(8, 4, 8, 4) == brute_single_type(8, 4, 8, 4));
    }

    TEST_CASE("single-type solver against the counting inequality") {
        for (int l = 0; l <= 30; l += 3)
            for (int n = 0; n <= 20; n += 2)
                for (int g = 0; g <= l; g += 2)
                    for (int r = 0; r <= n; ++r) {
                        const Count m = solve_single_type(l, g, n, r);
                        CHECK(m == brute_single_type(l, g, n, r));
                    }
    }

    TEST_CASE("rate limit closed form") {
        CHECK(rate_limit(1.0, 1.0) == Approx(1.0).epsilon(1e-14));
        const double q = 1.0 / (1.0 + std::exp(1.0));
        CHECK(rate_limit(q, 1.0) == Approx(0.0).epsilon(1e-14));
        CHECK(rate_limit(0.75, 1.0) == Approx(0.38143695781307385).epsilon(1e-14));
        for (double beta : {0.3, 1.0, 4.0})
            for (double p : {0.05, 0.5, 0.9}) CHECK(rate_limit(p, beta) == Approx(closed_rate(p, beta)).epsilon(1e-12));
    }

    TEST_CASE("plans respect the monotone bound") {
        const double q = 1.0 / (1.0 + std::exp(1.0));
        const auto free_plan = plan_distillation(200, q, 1.0);
        CHECK(free_plan.m == 0);

        const auto pure = plan_distillation(50, 1.0, 1.0);
        CHECK(pure.m >= 1);
        CHECK(pure.achieved_rate <= 1.0);

        for (Count n : {20, 100, 500})
            for (double p : {0.4, 0.75, 0.95})
                for (double beta : {0.5, 1.0, 2.0}) {
                    const auto plan = plan_distillation(n, p, beta);
                    CHECK(plan.achieved_rate <= rate_limit(p, beta) + 1e-12);
                    CHECK(plan.k == plan.n + plan.ell - plan.m);
                }
    }

    TEST_CASE("energy audit of every record") {
        const auto plan = plan_distillation(60, 0.8, 1.0);
        REQUIRE_FALSE(plan.records.empty());
        for (const auto& rec : plan.records) {
            CHECK(rec.bath.ones() + rec.resource.ones() - rec.exhaust.ones() == plan.m);
            CHECK(rec.exhaust.total() == plan.k);
            if (rec.input_count && rec.exhaust_count) CHECK(*rec.input_count <= *rec.exhaust_count);
        }
    }

    TEST_CASE("failure mass is the typical-mass complement") {
        const auto plan = plan_distillation(300, 0.7, 1.0);
        const double bath = oracle::binomial_mass(int(plan.ell), plan.q, int(plan.bath_window.lo), int(plan.bath_window.hi));
        const double res = oracle::binomial_mass(int(plan.n), plan.p, int(plan.resource_window.lo), int(plan.resource_window.hi));
        CHECK(plan.failure_mass == Approx(1.0 - bath * res).epsilon(1e-9));
    }

    TEST_CASE("general qubit inputs") {
        const double d[2] = {0.25, 0.75};
        const auto diag = DensityMatrix::diagonal(std::span<const double>(d, 2));
        const auto a = plan_distillation_general(diag, 200, 1.0);
        const auto b = plan_distillation(200, 0.75, 1.0);
        CHECK(a.m == b.m);
        CHECK(a.ell == b.ell);
        CHECK_FALSE(a.coherent);

        Vector v(2);
        v << std::sqrt(0.5), std::sqrt(0.5);
        const auto pure = DensityMatrix::pure(v);
        const auto g = gibbs_state(Hamiltonian::two_level(), 1.0);
        const double bound = interconversion_rate(pure, DensityMatrix::basis_state(2, 1), g);
        const double q = 1.0 / (1.0 + std::exp(1.0));
        CHECK(bound == Approx((oracle::binary_entropy(q) + (0.5 - q)) / -std::log(q)).epsilon(1e-12));
        for (Count n : {8, 40, 200}) {
            const auto plan = plan_distillation_general(pure, n, 1.0);
            CHECK(plan.coherent);
            CHECK(plan.achieved_rate <= bound + 1e-12);
        }
    }

    TEST_CASE("string maps") {
        auto plan = plan_distillation_with_bath(2, 0, 1.0, 1.0, 1.0);
        const auto id = build_string_map(plan, 0, 2);
        REQUIRE(id.pairs.size() == 1);
        CHECK(to_bitstring(id.pairs[0].first, 2) == "11");
        CHECK(to_bitstring(id.pairs[0].second, 2) == "11");

        const auto four = plan_distillation_with_bath(2, 4, 1.0, std::log(3.0), 0.01);
        REQUIRE(four.m == 2);
        const auto map = build_string_map(four, 1, 2);
        CHECK(map.pairs.size() == 4);
        std::set<Bits> outputs;
        for (const auto& [in, out] : map.pairs) {
            outputs.insert(out);
            CHECK((out & 0b11) == 0b11);
            CHECK(popcount(in) == popcount(out));
        }
        CHECK(outputs.size() == 4);
        CHECK_THROWS_AS(build_string_map(four, 3, 0), Error);
    }

    TEST_CASE("string maps are injective and conserve ones at small sizes") {
        for (Count ell = 1; ell <= 10; ++ell)
            for (Count n = 1; n + ell <= 14; ++n)
                for (double p : {0.6, 0.9}) {
                    const auto plan = plan_distillation_with_bath(n, ell, p, 1.0, 1.0);
                    for (const auto& rec : plan.records) {
                        const auto map = build_string_map(plan, rec.bath.ones(), rec.resource.ones());
                        std::set<Bits> outputs;
                        for (const auto& [in, out] : map.pairs) {
                            CHECK(popcount(in) == popcount(out));
                            CHECK(low_bits(out, int(plan.m)) == all_ones(int(plan.m)));
                            outputs.insert(out);
                        }
                        CHECK(outputs.size() == map.pairs.size());
                    }
                }
    }

    TEST_CASE("deficit shrinks along the n grid") {
        double last = 1.0;
        for (Count n : {100, 1000, 10000}) {
            const auto plan = plan_distillation(n, 0.75, 1.0);
            const double deficit = plan.rate_limit - plan.achieved_rate;
            CHECK(deficit > 0.0);
            CHECK(deficit < last);
            last = deficit;
        }
    }

    TEST_CASE("invalid parameters") {
        CHECK_THROWS_AS(plan_distillation(10, 1.5, 1.0), Error);
        CHECK_THROWS_AS(plan_distillation(10, 0.5, -1.0), Error);
        CHECK_THROWS_AS(plan_distillation(0, 0.5, 1.0), Error);
    }
}
