#pragma once

#include <cstddef>
#include <cstdint>

#include "entangle/qkd/types.hpp"

namespace entangle::qkd {

// floor(n (I_AB - I_E)) - leaked_bits - epsilon_margin. May be negative.
std::int64_t secure_key_length(std::size_t n, double qber, std::size_t leaked_bits,
                               std::size_t epsilon_margin);

// The `count` seed bits defining a Toeplitz matrix, drawn from Rng(seed).
BitString toeplitz_seed_bits(std::uint64_t seed, std::size_t count);

// out_i = XOR_j T(i, j) key_j over GF(2), with T(i, j) = r[i - j + n - 1] and
// r = toeplitz_seed_bits(seed, n + output_length - 1).
BitString toeplitz_hash(const BitString& key, std::size_t output_length, std::uint64_t seed);

// Hashes the reconciled key down to secure_key_length(...) bits; empty when
// that length is not positive.
BitString privacy_amplify(const BitString& key, std::size_t leaked_bits, double qber,
                          std::size_t epsilon_margin, std::uint64_t seed);

}  // namespace entangle::qkd
