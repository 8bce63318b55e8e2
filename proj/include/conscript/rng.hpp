#pragma once

#include <cstdint>
#include <string_view>

#include "conscript/bytes.hpp"

namespace conscript {

// Deterministic byte stream (SHA-256 in counter mode). Every operation in
// the system that needs randomness takes one of these; there is no ambient
// entropy anywhere, so identical seeds give byte-identical runs.
class DeterministicRng {
 public:
  explicit DeterministicRng(uint64_t seed);
  explicit DeterministicRng(BytesView seed_material);

  // Independent child stream. Children with distinct labels never overlap
  // with each other or with the parent.
  DeterministicRng derive(std::string_view label) const;

  Bytes bytes(size_t n);
  uint8_t next_byte();
  uint64_t next_u64();

  // Uniform in [0, bound), bound > 0. Rejection-sampled, unbiased.
  uint64_t uniform(uint64_t bound);

  // Uniform in [0, 1) with 53 bits of precision.
  double unit_double();
  bool coin(double p);

 private:
  Bytes key_;  // 32-byte stream key
  uint64_t counter_ = 0;
  Bytes block_;
  size_t block_used_ = 0;

  void refill();
};

}  // namespace conscript
