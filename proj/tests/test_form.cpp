#include <doctest.h>

#include <map>
#include <set>

#include "athermal/distill.hpp"
#include "athermal/error.hpp"
#include "athermal/form.hpp"
#include "oracles.hpp"

using namespace athermal;
using doctest::Approx;

namespace {
// Smallest m with C(l,g) <= C(k,e) C(n,t), k = m + l - n, e = g + m - t, by
// linear search. k - e = (l - g) - (n - t) stays fixed, so C(k, e) = C(k, k - e)
// is evaluated with the multiplicative formula. Returns -1 when no m works.
Count brute_formation(int n, int t, int l, int g) {
    const oracle::u128 need = oracle::choose(l, g), targets = oracle::choose(n, t);
    const int gap = (l - g) - (n - t);
    const Count first = std::max({0, t - g, n - l});
    if (gap == 0) return need <= targets ? first : -1;
    for (Count m = first; m < 100000000; ++m) {
        const Count k = m + l - n;
        const Count j = std::min<Count>(gap, k - gap);
        oracle::u128 c = 1;  // C(k, i + 1) after step i
        for (Count i = 0; i < j; ++i) c = c * oracle::u128(k - i) / oracle::u128(i + 1);
        if (c * targets >= need) return m;
    }
    return -1;
}
}  // namespace

TEST_SUITE("form") {
    TEST_CASE("single-type examples") {
        CHECK(solve_formation_single_type(6, 2, 6, 2) == 0);
        CHECK(solve_formation_single_type(2, 2, 4, 1) == 2);
        CHECK_THROWS_AS(solve_formation_single_type(5, 0, 3, 3), Error);
    }

    TEST_CASE("single-type solver against exhaustive search") {
        for (int n = 1; n <= 12; ++n)
            for (int t = 0; t <= n; ++t)
                for (int l = n; l <= 20; l += 2)
                    for (int g = 0; g <= l - (n - t); ++g) {
                        const Count expected = brute_formation(n, t, l, g);
                        if (expected < 0)
                            CHECK_THROWS_AS(solve_formation_single_type(n, t, l, g), Error);
                        else
                            CHECK(solve_formation_single_type(n, t, l, g) == expected);
                    }
    }

    TEST_CASE("formation and distillation agree up to square-root slack") {
        const double q = 1.0 / (1.0 + std::exp(1.0));
        for (Count n : {100, 300, 1000, 3000}) {
            const Count l = bath_size_for(rate_limit(0.75, 1.0), n);
            const Count g = std::llround(double(l) * q), r = std::llround(0.75 * double(n));
            const Count out = solve_single_type(l, g, n, r);
            const Count in = solve_formation_single_type(n, r, l, g);
            CHECK(in >= out);
            CHECK(double(in - out) <= std::sqrt(double(n)));
        }
    }

    TEST_CASE("birkhoff partition examples") {
        const double one[1] = {1.0};
        const double w1[1] = {1.0};
        const auto single = birkhoff_partition(w1, one, 1e-9);
        CHECK(single.max_deviation == 0.0);

        const std::vector<double> eighths(8, 0.125);
        const double halves[2] = {0.5, 0.5};
        const auto split = birkhoff_partition(eighths, halves, 1e-9);
        REQUIRE(split.sets.size() == 2);
        CHECK(split.sets[0].size() == 4);
        CHECK(split.sets[1].size() == 4);
        CHECK(split.max_deviation == Approx(0.0).epsilon(1e-15));

        const double q = 1.0 / (1.0 + std::exp(1.0));
        const double targets[3] = {0.0625, 0.375, 0.5625};
        const auto gibbs = birkhoff_partition_gibbs(10, q, targets, 1e-6);
        CHECK(gibbs.max_weight == Approx(std::pow(1.0 - q, 10)).epsilon(1e-12));
        CHECK(gibbs.max_deviation <= std::pow(1.0 - q, 10) + 1e-15);
        double total = 0.0;
        for (double a : gibbs.achieved_weights) total += a;
        CHECK(total == Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("birkhoff deviation never exceeds the largest weight") {
        std::mt19937_64 rng(17);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> w(5 + trial % 40), t(2 + trial % 5);
            double sw = 0, st = 0;
            for (double& x : w) sw += (x = u(rng));
            for (double& x : t) st += (x = u(rng));
            for (double& x : w) x /= sw;
            for (double& x : t) x /= st;
            const auto part = birkhoff_partition(w, t, 1e-12);
            const double wmax = *std::max_element(w.begin(), w.end());
            CHECK(part.max_deviation <= wmax + 1e-12);
            std::set<std::size_t> seen;
            for (const auto& s : part.sets)
                for (std::size_t i : s) CHECK(seen.insert(i).second);
            CHECK(seen.size() == w.size());
        }
    }

    TEST_CASE("type distribution") {
        const auto point = type_distribution(5, 1.0, CountRange{0, 5});
        CHECK(point[5] == Approx(1.0));
        const auto bin = type_distribution(2, 0.5, CountRange{0, 2});
        CHECK(bin[0] == Approx(0.25));
        CHECK(bin[1] == Approx(0.5));
        CHECK(bin[2] == Approx(0.25));
        const auto win = typical_types(80, FrequencyVector::binary(0.3), 1.0);
        const auto dist = type_distribution(80, 0.3, win);
        double s = 0.0;
        for (double x : dist) s += x;
        CHECK(s == Approx(1.0));
        const double mass = typical_mass(80, FrequencyVector::binary(0.3), win);
        CHECK(dist.front() == Approx(oracle::binomial_mass(80, 0.3, int(win.front().ones()), int(win.front().ones())) / mass).epsilon(1e-10));
    }

    TEST_CASE("formation plans") {
        const double q = 1.0 / (1.0 + std::exp(1.0));
        const auto free = plan_formation(100, q, 1.0);
        CHECK(free.free_target);
        const auto free_large = plan_formation(10000, q, 1.0);
        CHECK(free_large.cost_rate < free.cost_rate);
        CHECK(free_large.cost_rate < 0.01);

        double last = kInfinity;
        for (Count n : {100, 1000, 10000}) {
            const auto plan = plan_formation(n, 0.75, 1.0);
            CHECK(plan.cost_rate < last);
            CHECK(plan.cost_rate >= rate_limit(0.75, 1.0) - 1e-12);
            CHECK(plan.formation_rate == Approx(1.0 / plan.cost_rate));
            CHECK(plan.k == plan.m + plan.ell - plan.n);
            last = plan.cost_rate;
        }
    }

    TEST_CASE("register bits grow slowly with the bath") {
        const auto small = plan_formation(100, 0.75, 1.0);
        const auto large = plan_formation(10000, 0.75, 1.0);
        CHECK(large.ell > 100 * small.ell);
        CHECK(large.register_bits <= small.register_bits + 8);
    }

    TEST_CASE("round-robin maps are balanced") {
        const auto plan = plan_formation(4, 0.75, 1.0, 1.0);
        REQUIRE_FALSE(plan.records.empty());
        for (const auto& rec : plan.records) {
            const auto map = build_formation_map(plan, rec.bath.ones(), rec.target.ones());
            std::map<Bits, std::size_t> per_target;
            std::set<Bits> outputs;
            for (const auto& [in, out] : map.pairs) {
                CHECK(popcount(in) == popcount(out));
                per_target[out >> map.exhaust_length]++;
                outputs.insert(out);
            }
            CHECK(outputs.size() == map.pairs.size());
            std::size_t lo = SIZE_MAX, hi = 0;
            for (const auto& [t, c] : per_target) {
                lo = std::min(lo, c);
                hi = std::max(hi, c);
            }
            CHECK(hi - lo <= 1);
        }
    }

    TEST_CASE("entropy ledger is logarithmic") {
        for (Count n : {100, 1000, 10000}) {
            const auto plan = plan_formation(n, 0.75, 1.0);
            CHECK(plan.entropy_cost <= std::log(double(plan.target_window.size())) + 1e-12);
            CHECK(plan.entropy_cost <= std::log(7.0 * std::sqrt(double(n)) + 1.0));
        }
    }
}
