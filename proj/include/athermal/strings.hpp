#pragma once

// Fixed-length bit strings stored in a 64-bit word. Position 0 is the leftmost
// symbol and lives in the most significant used bit, so numeric order on words
// equals lexicographic order on strings.

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace athermal {

using Bits = std::uint64_t;

inline int popcount(Bits b) noexcept { return std::popcount(b); }

inline Bits concat(Bits left, Bits right, int right_length) noexcept { return (left << right_length) | right; }

inline Bits low_bits(Bits b, int count) noexcept {
    return count >= 64 ? b : (b & ((Bits{1} << count) - 1));
}

inline Bits all_ones(int length) noexcept { return length >= 64 ? ~Bits{0} : (Bits{1} << length) - 1; }

std::string to_bitstring(Bits b, int length);
Bits from_bitstring(const std::string& s);

/// The index-th (0-based) string of the given length and weight in lexicographic order.
Bits unrank_fixed_weight(int length, int weight, const mpz_class& index);
Bits unrank_fixed_weight(int length, int weight, std::uint64_t index);
/// Inverse of unrank_fixed_weight.
mpz_class rank_fixed_weight(Bits b, int length);

/// Every string of the given length and weight in lexicographic order.
std::vector<Bits> enumerate_fixed_weight(int length, int weight);

/// Next string with the same weight in lexicographic order (Gosper's hack).
inline Bits next_same_weight(Bits v) noexcept {
    const Bits t = v | (v - 1);
    return (t + 1) | (((~t & -~t) - 1) >> (std::countr_zero(v) + 1));
}

}  // namespace athermal
