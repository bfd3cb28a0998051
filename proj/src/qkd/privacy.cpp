#include "entangle/qkd/privacy.hpp"

#include <bit>
#include <cmath>
#include <vector>

#include "entangle/qkd/information.hpp"
#include "entangle/random.hpp"

namespace entangle::qkd {

namespace {

using Words = std::vector<std::uint64_t>;

Words pack(const BitString& bits, std::size_t padding_words) {
  Words words((bits.size() + 63) / 64 + padding_words, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    words[i / 64] |= static_cast<std::uint64_t>(bits[i] & 1u) << (i % 64);
  }
  return words;
}

// 64 bits of `words` starting at bit `start`.
std::uint64_t window(const Words& words, std::size_t start) {
  const std::size_t q = start / 64;
  const unsigned r = start % 64;
  if (r == 0) return words[q];
  return (words[q] >> r) | (words[q + 1] << (64 - r));
}

}  // namespace

std::int64_t secure_key_length(std::size_t n, double qber, std::size_t leaked_bits,
                               std::size_t epsilon_margin) {
  const double raw = std::floor(static_cast<double>(n) * secrecy_margin(qber));
  return static_cast<std::int64_t>(raw) - static_cast<std::int64_t>(leaked_bits) -
         static_cast<std::int64_t>(epsilon_margin);
}

BitString toeplitz_seed_bits(std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  BitString bits(count);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 64 == 0) word = rng.next_u64();
    bits[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1u);
  }
  return bits;
}

BitString toeplitz_hash(const BitString& key, std::size_t output_length, std::uint64_t seed) {
  const std::size_t n = key.size();
  if (n == 0 || output_length == 0) return BitString(output_length, 0);

  const std::size_t total = n + output_length - 1;
  const BitString r = toeplitz_seed_bits(seed, total);
  // Reversed seed s[k] = r[total - 1 - k] makes row i the contiguous run
  // s[m - 1 - i .. m - 1 - i + n).
  BitString s(total);
  for (std::size_t k = 0; k < total; ++k) s[k] = r[total - 1 - k];

  const Words key_words = pack(key, 0);
  const Words seed_words = pack(s, 1);

  BitString out(output_length);
  for (std::size_t i = 0; i < output_length; ++i) {
    const std::size_t offset = output_length - 1 - i;
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < key_words.size(); ++w) {
      acc ^= key_words[w] & window(seed_words, offset + 64 * w);
    }
    out[i] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
  }
  return out;
}

BitString privacy_amplify(const BitString& key, std::size_t leaked_bits, double qber,
                          std::size_t epsilon_margin, std::uint64_t seed) {
  const std::int64_t m = secure_key_length(key.size(), qber, leaked_bits, epsilon_margin);
  if (m <= 0) return {};
  return toeplitz_hash(key, static_cast<std::size_t>(m), seed);
}

}  // namespace entangle::qkd
