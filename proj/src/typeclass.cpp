#include "athermal/typeclass.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "athermal/core.hpp"
#include "athermal/error.hpp"

namespace athermal {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

double log_of(const mpz_class& v) {
    if (v <= 0) return -std::numeric_limits<double>::infinity();
    long exponent = 0;
    const double mantissa = mpz_get_d_2exp(&exponent, v.get_mpz_t());
    return std::log(mantissa) + static_cast<double>(exponent) * kLn2;
}

long double lfact(Count n) { return std::lgammal(static_cast<long double>(n) + 1.0L); }

}  // namespace

TypeDescriptor::TypeDescriptor(std::vector<Count> c) : counts(std::move(c)) {
    for (Count x : counts) require(x >= 0, ErrorCode::InvalidParameter, "negative occupation count");
}

TypeDescriptor TypeDescriptor::binary(Count n, Count ones) {
    require(0 <= ones && ones <= n, ErrorCode::InvalidParameter, "ones count outside [0, n]");
    return TypeDescriptor({n - ones, ones});
}

Count TypeDescriptor::total() const { return std::accumulate(counts.begin(), counts.end(), Count{0}); }

FrequencyVector::FrequencyVector(std::vector<double> f) : freqs(std::move(f)) {
    require(!freqs.empty(), ErrorCode::InvalidParameter, "empty frequency vector");
    double s = 0.0;
    for (double x : freqs) {
        require(std::isfinite(x) && x >= 0.0 && x <= 1.0, ErrorCode::InvalidParameter,
                "frequencies must lie in [0,1]");
        s += x;
    }
    require(std::abs(s - 1.0) <= 1e-12, ErrorCode::InvalidParameter, "frequencies must sum to 1");
}

FrequencyVector FrequencyVector::of(const TypeDescriptor& t) {
    const double n = static_cast<double>(t.total());
    require(n > 0, ErrorCode::InvalidParameter, "empty type");
    std::vector<double> f(t.dimension());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<double>(t.counts[i]) / n;
    // Renormalise so the 1e-12 sum check never trips on rounding.
    const double s = std::accumulate(f.begin(), f.end(), 0.0);
    for (double& x : f) x /= s;
    return FrequencyVector(std::move(f));
}

double BigCount::log() const { return log_of(value_); }

BigCount binomial(Count n, Count k) {
    require(n >= 0, ErrorCode::InvalidParameter, "binomial needs n >= 0");
    if (k < 0 || k > n) return BigCount(0UL);
    mpz_class v;
    mpz_bin_uiui(v.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return BigCount(std::move(v));
}

BigCount type_cardinality(const TypeDescriptor& t) {
    // Product of binomials C(remaining, c_i).
    mpz_class v = 1;
    Count remaining = t.total();
    mpz_class b;
    for (Count c : t.counts) {
        mpz_bin_uiui(b.get_mpz_t(), static_cast<unsigned long>(remaining), static_cast<unsigned long>(c));
        v *= b;
        remaining -= c;
    }
    return BigCount(std::move(v));
}

double log_binomial(Count n, Count k, Count exact_limit) {
    require(0 <= k && k <= n, ErrorCode::InvalidParameter, "log_binomial needs 0 <= k <= n");
    if (k == 0 || k == n) return 0.0;
    if (n <= exact_limit) return binomial(n, k).log();
    return static_cast<double>(lfact(n) - lfact(k) - lfact(n - k));
}

LogCount log_type_cardinality(const TypeDescriptor& t, Count exact_limit) {
    const Count n = t.total();
    if (n <= exact_limit) return {type_cardinality(t).log(), false};
    long double v = lfact(n);
    for (Count c : t.counts) v -= lfact(c);
    return {static_cast<double>(v), true};
}

MultinomialBounds multinomial_log_bounds(const TypeDescriptor& t) {
    const Count n = t.total();
    const auto f = FrequencyVector::of(t);
    const double d = static_cast<double>(t.dimension());
    const double nh = static_cast<double>(n) * shannon_entropy(f);
    MultinomialBounds b;
    b.upper = nh;
    b.lower = nh - (d - 1.0) * std::log(static_cast<double>(n) + 1.0);
    const bool full = std::all_of(t.counts.begin(), t.counts.end(), [](Count c) { return c > 0; });
    if (full) {
        double log_prod = 0.0;
        for (double x : f.freqs) log_prod += std::log(x);
        b.lower_full_support = nh + 1.0 - d * (std::log(static_cast<double>(n)) + 1.0) - log_prod;
    } else {
        b.lower_full_support = -std::numeric_limits<double>::infinity();
    }
    return b;
}

double shannon_entropy(const FrequencyVector& f) { return shannon_entropy(std::span<const double>(f.freqs)); }

Count centre_count(Count n, double f) {
    const double x = static_cast<double>(n) * f;
    const double fl = std::floor(x);
    if (std::abs(x - fl - 0.5) < 1e-12) return static_cast<Count>(std::floor((static_cast<double>(n) + 1.0) * f));
    return static_cast<Count>(std::llround(x));
}

std::vector<CountRange> typical_ranges(Count n, const FrequencyVector& f, double width) {
    require(n >= 1, ErrorCode::InvalidParameter, "typical window needs n >= 1");
    require(width > 0.0 && std::isfinite(width), ErrorCode::InvalidParameter, "width must be positive");
    const Count radius = static_cast<Count>(std::floor(width * std::sqrt(static_cast<double>(n))));
    std::vector<CountRange> ranges(f.dimension());
    for (std::size_t i = 0; i < f.dimension(); ++i) {
        if (f[i] == 0.0) {
            ranges[i] = {0, 0};
            continue;
        }
        const Count c = centre_count(n, f[i]);
        ranges[i] = {std::max<Count>(0, c - radius), std::min<Count>(n, c + radius)};
    }
    return ranges;
}

std::vector<TypeDescriptor> typical_types(Count n, const FrequencyVector& f, double width) {
    const auto ranges = typical_ranges(n, f, width);
    const std::size_t d = ranges.size();
    std::vector<TypeDescriptor> out;
    std::vector<Count> counts(d, 0);
    // Enumerate the first d-1 levels; the last one is forced by the total.
    auto recurse = [&](auto&& self, std::size_t level, Count used) -> void {
        if (level + 1 == d) {
            const Count last = n - used;
            if (ranges[level].contains(last)) {
                counts[level] = last;
                out.emplace_back(counts);
            }
            return;
        }
        for (Count c = ranges[level].lo; c <= ranges[level].hi && used + c <= n; ++c) {
            counts[level] = c;
            self(self, level + 1, used + c);
        }
    };
    recurse(recurse, 0, 0);
    return out;
}

double log_type_probability(const TypeDescriptor& t, const FrequencyVector& f, Count exact_limit) {
    require(t.dimension() == f.dimension(), ErrorCode::InvalidParameter, "dimension mismatch");
    double lp = log_type_cardinality(t, exact_limit).value;
    for (std::size_t i = 0; i < t.dimension(); ++i) {
        if (t.counts[i] == 0) continue;
        if (f[i] == 0.0) return -std::numeric_limits<double>::infinity();
        lp += static_cast<double>(t.counts[i]) * std::log(f[i]);
    }
    return lp;
}

double typical_mass(Count n, const FrequencyVector& f, std::span<const TypeDescriptor> window) {
    std::vector<double> logs;
    logs.reserve(window.size());
    for (const auto& t : window) {
        require(t.total() == n, ErrorCode::InvalidParameter, "type total differs from n");
        logs.push_back(log_type_probability(t, f));
    }
    return std::min(1.0, std::exp(log_sum_exp(logs)));
}

double binomial_window_mass(Count n, double p, CountRange ones) {
    const auto f = FrequencyVector::binary(p);
    std::vector<double> logs;
    for (Count t = std::max<Count>(0, ones.lo); t <= std::min(n, ones.hi); ++t)
        logs.push_back(log_type_probability(TypeDescriptor::binary(n, t), f));
    return std::min(1.0, std::exp(log_sum_exp(logs)));
}

double log_sum_exp(std::span<const double> xs) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double x : xs) mx = std::max(mx, x);
    if (!std::isfinite(mx)) return mx;
    double s = 0.0;
    for (double x : xs) s += std::exp(x - mx);
    return mx + std::log(s);
}

}  // namespace athermal
