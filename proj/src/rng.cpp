#include "conscript/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace conscript {

namespace {
constexpr std::string_view kSeedDomain = "conscript.rng.v1";
}

DeterministicRng::DeterministicRng(uint64_t seed) {
  Bytes material = bytes_of(kSeedDomain);
  append_u64_be(material, seed);
  key_ = sha256(material);
}

DeterministicRng::DeterministicRng(BytesView seed_material) {
  Bytes material = bytes_of(kSeedDomain);
  append(material, seed_material);
  key_ = sha256(material);
}

DeterministicRng DeterministicRng::derive(std::string_view label) const {
  Bytes material = key_;
  material.push_back(0x01);
  append(material, bytes_of(label));
  DeterministicRng child(0);
  child.key_ = sha256(material);
  child.counter_ = 0;
  child.block_.clear();
  child.block_used_ = 0;
  return child;
}

void DeterministicRng::refill() {
  Bytes material = key_;
  material.push_back(0x02);
  append_u64_be(material, counter_++);
  block_ = sha256(material);
  block_used_ = 0;
}

Bytes DeterministicRng::bytes(size_t n) {
  Bytes out;
  out.reserve(n);
  while (out.size() < n) {
    if (block_used_ >= block_.size()) refill();
    size_t take = std::min(n - out.size(), block_.size() - block_used_);
    out.insert(out.end(), block_.begin() + block_used_, block_.begin() + block_used_ + take);
    block_used_ += take;
  }
  return out;
}

uint8_t DeterministicRng::next_byte() {
  if (block_used_ >= block_.size()) refill();
  return block_[block_used_++];
}

uint64_t DeterministicRng::next_u64() {
  uint64_t v = 0;
  for (int i = 0; i < 8; i++) v = (v << 8) | next_byte();
  return v;
}

uint64_t DeterministicRng::uniform(uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform bound must be positive");
  uint64_t limit = bound * (UINT64_MAX / bound);
  for (;;) {
    uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

double DeterministicRng::unit_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool DeterministicRng::coin(double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return unit_double() < p;
}

}  // namespace conscript
