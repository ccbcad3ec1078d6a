#include <doctest.h>

#include <functional>

#include "athermal/strings.hpp"
#include "athermal/typeclass.hpp"
#include "oracles.hpp"

using namespace athermal;
using doctest::Approx;

namespace {
std::string str128(oracle::u128 v) {
    std::string s;
    do {
        s.insert(s.begin(), char('0' + int(v % 10)));
        v /= 10;
    } while (v);
    return s;
}

// Enumerate every type of n symbols over d levels.
void for_each_type(int n, int d, std::vector<Count>& counts, int level, const std::function<void()>& visit) {
    if (level == d - 1) {
        Count used = 0;
        for (int i = 0; i < level; ++i) used += counts[i];
        counts[level] = n - used;
        visit();
        return;
    }
    Count used = 0;
    for (int i = 0; i < level; ++i) used += counts[i];
    for (Count c = 0; c <= n - used; ++c) {
        counts[level] = c;
        for_each_type(n, d, counts, level + 1, visit);
    }
}
}  // namespace

TEST_SUITE("typeclass") {
    TEST_CASE("cardinality examples") {
        CHECK(type_cardinality(TypeDescriptor({2, 2})).str() == "6");
        CHECK(type_cardinality(TypeDescriptor({7, 0})).str() == "1");
        CHECK(type_cardinality(TypeDescriptor({1, 1, 2})).str() == "12");
        CHECK(log_type_cardinality(TypeDescriptor({2, 2})).value == Approx(std::log(6.0)));
        CHECK(log_type_cardinality(TypeDescriptor({0, 9})).value == 0.0);
    }

    TEST_CASE("binomials agree with Pascal's triangle") {
        for (int n = 0; n <= 100; n += 7)
            for (int k = 0; k <= n; ++k) {
                CHECK(binomial(n, k).str() == str128(oracle::choose(n, k)));
                CHECK(log_binomial(n, k) == Approx(std::log(double(oracle::choose(n, k)))).epsilon(1e-12));
            }
        // Above the exact limit the log-gamma path must stay close.
        CHECK(log_binomial(20000, 7000, 100) == Approx(log_binomial(20000, 7000)).epsilon(1e-12));
    }

    TEST_CASE("multinomial theorem: type counts sum to d^n") {
        for (int d = 2; d <= 4; ++d)
            for (int n = 0; n <= 12; ++n) {
                mpz_class total = 0;
                std::vector<Count> counts(static_cast<std::size_t>(d));
                for_each_type(n, d, counts, 0, [&] { total += type_cardinality(TypeDescriptor(counts)).value(); });
                mpz_class expected;
                mpz_ui_pow_ui(expected.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(n));
                CHECK(total == expected);
            }
    }

    TEST_CASE("cardinality sandwich") {
        for (int n = 1; n <= 60; n += 3)
            for (int a = 0; a <= n; a += 2)
                for (int b = 0; a + b <= n; b += 3) {
                    const TypeDescriptor t({a, b, n - a - b});
                    const auto bounds = multinomial_log_bounds(t);
                    const double exact = log_type_cardinality(t).value;
                    CHECK(bounds.lower <= exact + 1e-9);
                    CHECK(exact <= bounds.upper + 1e-9);
                    if (std::isfinite(bounds.lower_full_support)) CHECK(bounds.lower_full_support <= exact + 1e-9);
                }
        const auto half = multinomial_log_bounds(TypeDescriptor({50, 50}));
        const double exact = log_type_cardinality(TypeDescriptor({50, 50})).value;
        CHECK(exact <= 100 * std::log(2.0));
        CHECK(exact >= 100 * std::log(2.0) - std::log(101.0));
        CHECK(half.upper == Approx(100 * std::log(2.0)));
    }

    TEST_CASE("typical window examples") {
        const auto det = typical_types(4, FrequencyVector::binary(1.0));
        REQUIRE(det.size() == 1);
        CHECK(det[0] == TypeDescriptor::binary(4, 4));

        const auto half = typical_types(100, FrequencyVector::binary(0.5), 3.0);
        CHECK(half.size() == 61);
        for (const auto& t : half) CHECK(std::abs(t.ones() - 50) <= 30);
        const double mass = typical_mass(100, FrequencyVector::binary(0.5), half);
        CHECK(mass == Approx(oracle::binomial_mass(100, 0.5, 20, 80)).epsilon(1e-12));
        CHECK(mass >= 0.99);
        CHECK(mass >= 1.0 - 2.0 * std::exp(-2.0 * 9.0));

        const auto sure = typical_types(25, FrequencyVector::binary(1.0));
        CHECK(typical_mass(25, FrequencyVector::binary(1.0), sure) == Approx(1.0));
        const auto all = typical_types(10, FrequencyVector::binary(0.3), 100.0);
        CHECK(typical_mass(10, FrequencyVector::binary(0.3), all) == Approx(1.0));
    }

    TEST_CASE("window mass is nondecreasing in width") {
        for (double p : {0.1, 0.3, 0.75})
            for (int n : {10, 57, 400}) {
                double last = 0.0;
                for (double w = 0.25; w <= 4.0; w += 0.25) {
                    const auto win = typical_types(n, FrequencyVector::binary(p), w);
                    const double mass = typical_mass(n, FrequencyVector::binary(p), win);
                    CHECK(mass >= last - 1e-15);
                    last = mass;
                }
            }
    }

    TEST_CASE("binomial window mass matches the exact tail") {
        for (int n : {5, 40, 333})
            for (double p : {0.2, 0.6})
                CHECK(binomial_window_mass(n, p, {n / 4, n / 2}) ==
                      Approx(oracle::binomial_mass(n, p, n / 4, n / 2)).epsilon(1e-10));
    }

    TEST_CASE("shannon entropy examples") {
        CHECK(shannon_entropy(FrequencyVector({0.25, 0.25, 0.25, 0.25})) == Approx(std::log(4.0)));
        CHECK(shannon_entropy(FrequencyVector({1.0, 0.0, 0.0})) == 0.0);
        const auto g = oracle::boltzmann({0, 1, 2}, 1.0);
        CHECK(shannon_entropy(FrequencyVector(g)) == Approx(0.834).epsilon(1e-3));
    }

    TEST_CASE("centre count rounds ties toward the mode") {
        CHECK(centre_count(10, 0.25) == 2);  // 2.5, mode floor(11/4) = 2
        CHECK(centre_count(10, 0.35) == 3);  // 3.5, mode floor(3.85) = 3
        CHECK(centre_count(7, 0.5) == 4);  // 3.5, mode floor(4) = 4
        CHECK(centre_count(100, 0.731) == 73);
    }

    TEST_CASE("fixed-weight string ranking") {
        for (int len = 1; len <= 12; ++len)
            for (int w = 0; w <= len; ++w) {
                const auto all = enumerate_fixed_weight(len, w);
                CHECK(all.size() == static_cast<std::size_t>(oracle::choose(len, w)));
                for (std::size_t i = 0; i < all.size(); ++i) {
                    CHECK(popcount(all[i]) == w);
                    if (i) CHECK(all[i - 1] < all[i]);
                    CHECK(rank_fixed_weight(all[i], len) == mpz_class(static_cast<unsigned long>(i)));
                    CHECK(unrank_fixed_weight(len, w, std::uint64_t{i}) == all[i]);
                }
            }
        CHECK(to_bitstring(from_bitstring("001011"), 6) == "001011");
    }
}
