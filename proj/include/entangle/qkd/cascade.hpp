#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "entangle/qkd/types.hpp"

namespace entangle::qkd {

// Alice's end of the authenticated classical channel during reconciliation.
// Every answered parity query is one disclosed bit.
class ParityChannel {
 public:
  virtual ~ParityChannel() = default;
  virtual std::uint8_t parity(std::span<const std::size_t> positions) = 0;
  virtual std::size_t disclosed_bits() const = 0;
};

class CountingParityChannel final : public ParityChannel {
 public:
  explicit CountingParityChannel(const BitString& key) : key_(key) {}

  std::uint8_t parity(std::span<const std::size_t> positions) override;
  std::size_t disclosed_bits() const override { return disclosed_; }

 private:
  const BitString& key_;
  std::size_t disclosed_ = 0;
};

struct CascadeParams {
  int passes = 4;
  double first_block_factor = 0.73;
};

struct CascadeResult {
  BitString corrected;
  std::size_t leaked_bits = 0;
  int passes_used = 0;
};

// ceil(factor / qber) capped at the key length; the whole key when qber <= 0.
std::size_t cascade_first_block_size(double qber_estimate, std::size_t key_length,
                                     double factor = 0.73);

// Cascade reconciliation of Bob's key against Alice's parities. Pass 1 uses
// contiguous blocks, later passes shuffle with a seeded permutation and double
// the block size. Each corrected bit re-opens the blocks of earlier passes that
// contain it. leaked_bits is read off the channel's disclosure counter.
CascadeResult cascade_correct(ParityChannel& alice, const BitString& key_b, double qber_estimate,
                              std::uint64_t seed, const CascadeParams& params = {});

// Convenience overload with a local counting channel over key_a.
// Throws std::invalid_argument when the key lengths differ.
CascadeResult cascade_correct(const BitString& key_a, const BitString& key_b,
                              double qber_estimate, std::uint64_t seed);

}  // namespace entangle::qkd
