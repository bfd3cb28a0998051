#include "entangle/qkd/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "entangle/random.hpp"

namespace entangle::qkd {

std::uint8_t CountingParityChannel::parity(std::span<const std::size_t> positions) {
  std::uint8_t p = 0;
  for (std::size_t pos : positions) p ^= key_[pos];
  ++disclosed_;
  return p;
}

std::size_t cascade_first_block_size(double qber_estimate, std::size_t key_length, double factor) {
  if (key_length == 0) return 0;
  if (!(qber_estimate > 0.0)) return key_length;
  const double k = std::ceil(factor / qber_estimate);
  if (k >= static_cast<double>(key_length)) return key_length;
  return std::max<std::size_t>(1, static_cast<std::size_t>(k));
}

namespace {

struct Pass {
  std::vector<std::size_t> order;  // block layout: positions in pass order
  std::vector<std::size_t> where;  // position -> index in order
  std::size_t block_size = 0;
  std::vector<std::uint8_t> alice_parity;
  std::vector<std::uint8_t> bob_parity;

  std::size_t block_of(std::size_t position) const { return where[position] / block_size; }
  std::pair<std::size_t, std::size_t> range(std::size_t block) const {
    const std::size_t lo = block * block_size;
    return {lo, std::min(lo + block_size, order.size())};
  }
};

class Reconciler {
 public:
  Reconciler(ParityChannel& alice, BitString key_b) : alice_(alice), bob_(std::move(key_b)) {}

  void add_pass(std::vector<std::size_t> order, std::size_t block_size) {
    Pass pass;
    pass.order = std::move(order);
    pass.where.resize(pass.order.size());
    for (std::size_t i = 0; i < pass.order.size(); ++i) pass.where[pass.order[i]] = i;
    pass.block_size = block_size;

    const std::size_t blocks = (pass.order.size() + block_size - 1) / block_size;
    pass.alice_parity.resize(blocks);
    pass.bob_parity.resize(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
      const auto [lo, hi] = pass.range(b);
      const std::span<const std::size_t> slice(pass.order.data() + lo, hi - lo);
      pass.alice_parity[b] = alice_.parity(slice);
      pass.bob_parity[b] = bob_parity(slice);
    }
    passes_.push_back(std::move(pass));

    const std::size_t index = passes_.size() - 1;
    for (std::size_t b = 0; b < blocks; ++b) {
      if (odd(index, b)) pending_.emplace_back(index, b);
    }
    drain();
  }

  BitString take_key() { return std::move(bob_); }

 private:
  bool odd(std::size_t pass, std::size_t block) const {
    return passes_[pass].alice_parity[block] != passes_[pass].bob_parity[block];
  }

  std::uint8_t bob_parity(std::span<const std::size_t> positions) const {
    std::uint8_t p = 0;
    for (std::size_t pos : positions) p ^= bob_[pos];
    return p;
  }

  void drain() {
    while (!pending_.empty()) {
      const auto [pass, block] = pending_.back();
      pending_.pop_back();
      if (!odd(pass, block)) continue;
      flip(locate_error(pass, block));
    }
  }

  // Bisection inside an odd block: each step discloses the parity of one half.
  std::size_t locate_error(std::size_t pass_index, std::size_t block) {
    const Pass& pass = passes_[pass_index];
    auto [lo, hi] = pass.range(block);
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      const std::span<const std::size_t> left(pass.order.data() + lo, mid - lo);
      if (alice_.parity(left) != bob_parity(left)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    return pass.order[lo];
  }

  void flip(std::size_t position) {
    bob_[position] ^= 1;
    for (std::size_t p = 0; p < passes_.size(); ++p) {
      const std::size_t b = passes_[p].block_of(position);
      passes_[p].bob_parity[b] ^= 1;
      if (odd(p, b)) pending_.emplace_back(p, b);
    }
  }

  ParityChannel& alice_;
  BitString bob_;
  std::vector<Pass> passes_;
  std::vector<std::pair<std::size_t, std::size_t>> pending_;
};

}  // namespace

CascadeResult cascade_correct(ParityChannel& alice, const BitString& key_b, double qber_estimate,
                              std::uint64_t seed, const CascadeParams& params) {
  CascadeResult result;
  const std::size_t n = key_b.size();
  if (n == 0 || params.passes <= 0) {
    result.corrected = key_b;
    return result;
  }

  const std::size_t disclosed_before = alice.disclosed_bits();
  Reconciler reconciler(alice, key_b);
  Rng rng(seed);

  std::size_t block = cascade_first_block_size(qber_estimate, n, params.first_block_factor);
  for (int pass = 0; pass < params.passes; ++pass) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (pass > 0) {
      for (std::size_t i = n - 1; i > 0; --i) {
        std::swap(order[i], order[static_cast<std::size_t>(rng.below(i + 1))]);
      }
    }
    reconciler.add_pass(std::move(order), block);
    block = std::min(n, block * 2);
  }

  result.corrected = reconciler.take_key();
  result.leaked_bits = alice.disclosed_bits() - disclosed_before;
  result.passes_used = params.passes;
  return result;
}

CascadeResult cascade_correct(const BitString& key_a, const BitString& key_b,
                              double qber_estimate, std::uint64_t seed) {
  if (key_a.size() != key_b.size()) throw std::invalid_argument("cascade keys differ in length");
  CountingParityChannel alice(key_a);
  return cascade_correct(alice, key_b, qber_estimate, seed);
}

}  // namespace entangle::qkd
