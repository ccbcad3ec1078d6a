#include "athermal/strings.hpp"

#include "athermal/error.hpp"

namespace athermal {

namespace {

mpz_class choose(long n, long k) {
    mpz_class v;
    if (k < 0 || k > n) return 0;
    mpz_bin_uiui(v.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return v;
}

}  // namespace

std::string to_bitstring(Bits b, int length) {
    std::string s(static_cast<std::size_t>(length), '0');
    for (int i = 0; i < length; ++i)
        if ((b >> (length - 1 - i)) & 1U) s[static_cast<std::size_t>(i)] = '1';
    return s;
}

Bits from_bitstring(const std::string& s) {
    require(s.size() <= 64, ErrorCode::UnsupportedSize, "bit strings are limited to 64 symbols");
    Bits b = 0;
    for (char c : s) {
        require(c == '0' || c == '1', ErrorCode::InvalidParameter, "bit strings contain only 0 and 1");
        b = (b << 1) | static_cast<Bits>(c == '1');
    }
    return b;
}

Bits unrank_fixed_weight(int length, int weight, const mpz_class& index) {
    require(length >= 0 && length <= 64, ErrorCode::UnsupportedSize, "bit strings are limited to 64 symbols");
    require(0 <= weight && weight <= length, ErrorCode::InvalidParameter, "weight outside [0, length]");
    require(index >= 0 && index < choose(length, weight), ErrorCode::InvalidParameter, "rank out of range");
    mpz_class rest = index;
    Bits b = 0;
    int ones = weight;
    for (int pos = 0; pos < length; ++pos) {
        const int remaining = length - pos - 1;
        // Strings with a 0 here come first.
        const mpz_class zeros_first = choose(remaining, ones);
        b <<= 1;
        if (ones > 0 && rest >= zeros_first) {
            rest -= zeros_first;
            b |= 1U;
            --ones;
        }
    }
    return b;
}

Bits unrank_fixed_weight(int length, int weight, std::uint64_t index) {
    return unrank_fixed_weight(length, weight, mpz_class(static_cast<unsigned long>(index)));
}

mpz_class rank_fixed_weight(Bits b, int length) {
    mpz_class r = 0;
    int ones = popcount(low_bits(b, length));
    for (int pos = 0; pos < length; ++pos) {
        const int remaining = length - pos - 1;
        if ((b >> remaining) & 1U) {
            r += choose(remaining, ones);
            --ones;
        }
    }
    return r;
}

std::vector<Bits> enumerate_fixed_weight(int length, int weight) {
    require(length >= 0 && length <= 63, ErrorCode::UnsupportedSize, "enumeration limited to 63 symbols");
    require(0 <= weight && weight <= length, ErrorCode::InvalidParameter, "weight outside [0, length]");
    std::vector<Bits> out;
    if (weight == 0) return {0};
    Bits v = all_ones(weight);
    const Bits limit = Bits{1} << length;
    while (v < limit) {
        out.push_back(v);
        v = next_same_weight(v);
    }
    return out;
}

}  // namespace athermal
