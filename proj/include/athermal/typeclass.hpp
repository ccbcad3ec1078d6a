#pragma once

// Method of types: occupation-count descriptors, exact multinomial counts,
// and strong-typicality windows.

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace athermal {

using Count = std::int64_t;

/// Occupation counts per level of an n-symbol string.
struct TypeDescriptor {
    std::vector<Count> counts;

    TypeDescriptor() = default;
    explicit TypeDescriptor(std::vector<Count> c);
    /// Two-level type with `ones` excitations among n symbols: (n - ones, ones).
    static TypeDescriptor binary(Count n, Count ones);

    Count total() const;
    std::size_t dimension() const noexcept { return counts.size(); }
    Count ones() const { return counts.at(1); }
    bool operator==(const TypeDescriptor&) const = default;
    auto operator<=>(const TypeDescriptor&) const = default;
};

/// Real-valued frequency vector, entries in [0,1] summing to 1 within 1e-12.
struct FrequencyVector {
    std::vector<double> freqs;

    FrequencyVector() = default;
    explicit FrequencyVector(std::vector<double> f);
    static FrequencyVector binary(double p) { return FrequencyVector({1.0 - p, p}); }
    static FrequencyVector of(const TypeDescriptor& t);

    std::size_t dimension() const noexcept { return freqs.size(); }
    double operator[](std::size_t i) const { return freqs[i]; }
};

/// Exact nonnegative integer backed by GMP.
class BigCount {
public:
    BigCount() = default;
    explicit BigCount(mpz_class v) : value_(std::move(v)) {}
    explicit BigCount(unsigned long v) : value_(v) {}

    const mpz_class& value() const noexcept { return value_; }
    double log() const;
    std::string str() const { return value_.get_str(); }

    friend BigCount operator*(const BigCount& a, const BigCount& b) { return BigCount(mpz_class(a.value_ * b.value_)); }
    friend BigCount operator+(const BigCount& a, const BigCount& b) { return BigCount(mpz_class(a.value_ + b.value_)); }
    friend bool operator==(const BigCount& a, const BigCount& b) { return a.value_ == b.value_; }
    friend bool operator<(const BigCount& a, const BigCount& b) { return a.value_ < b.value_; }
    friend bool operator<=(const BigCount& a, const BigCount& b) { return a.value_ <= b.value_; }

private:
    mpz_class value_{0};
};

/// Sizes n at or below this use exact integers for logarithmic counts; above it
/// log-gamma in extended precision is used and results are flagged approximate.
inline constexpr Count kDefaultExactLimit = 10000;
inline constexpr double kDefaultWidth = 3.0;

BigCount binomial(Count n, Count k);
BigCount type_cardinality(const TypeDescriptor& t);

/// ln C(n, k), exact-rounded below the limit, log-gamma above. 0 <= k <= n required.
double log_binomial(Count n, Count k, Count exact_limit = kDefaultExactLimit);

struct LogCount {
    double value = 0.0;
    bool approximate = false;
};

LogCount log_type_cardinality(const TypeDescriptor& t, Count exact_limit = kDefaultExactLimit);

/// Bounds on ln M(n f): `lower` = n H(f) - (d - 1) ln(n + 1), `upper` = n H(f);
/// `lower_full_support` = n H(f) + 1 - d ln(n e) - sum ln f_i, finite only for full-support types.
struct MultinomialBounds {
    double lower = 0.0;
    double lower_full_support = 0.0;
    double upper = 0.0;
};

MultinomialBounds multinomial_log_bounds(const TypeDescriptor& t);

double shannon_entropy(const FrequencyVector& f);

/// Nearest integer to n f, with exact ties resolved toward the binomial mode floor((n+1) f).
Count centre_count(Count n, double f);

/// Inclusive count range for one level of the typical window.
struct CountRange {
    Count lo = 0;
    Count hi = 0;
    bool contains(Count c) const noexcept { return lo <= c && c <= hi; }
    Count size() const noexcept { return hi - lo + 1; }
};

/// Per-level ranges: centre_count ± floor(width sqrt n), clipped to [0, n];
/// a zero-frequency level is pinned to {0}.
std::vector<CountRange> typical_ranges(Count n, const FrequencyVector& f, double width = kDefaultWidth);

/// Every type whose counts all lie in the per-level ranges.
std::vector<TypeDescriptor> typical_types(Count n, const FrequencyVector& f, double width = kDefaultWidth);

/// ln Pr[type] under i.i.d. sampling from f; -inf if impossible.
double log_type_probability(const TypeDescriptor& t, const FrequencyVector& f,
                            Count exact_limit = kDefaultExactLimit);

/// Total i.i.d. probability of the listed types.
double typical_mass(Count n, const FrequencyVector& f, std::span<const TypeDescriptor> window);

/// Binary fast path: probability mass of ones-counts in [lo, hi].
double binomial_window_mass(Count n, double p, CountRange ones);

/// log(sum exp(x_i)), robust to -inf entries.
double log_sum_exp(std::span<const double> xs);

}  // namespace athermal
