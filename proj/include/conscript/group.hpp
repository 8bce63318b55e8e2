#pragma once

#include <optional>
#include <stdexcept>
#include <string_view>

#include "conscript/bytes.hpp"
#include "conscript/rng.hpp"

namespace conscript::crypto {

enum class GroupKind { ToyModP, P256Curve };

// Which prime-order group the deployment runs on. The toy group is the
// order-11 subgroup of Z_23^* with generator 2 — used as a hand-checkable
// test oracle, never for privacy. The production group is NIST P-256.
struct GroupSpec {
  GroupKind kind = GroupKind::ToyModP;

  static GroupSpec toy() { return {GroupKind::ToyModP}; }
  static GroupSpec p256() { return {GroupKind::P256Curve}; }
  static std::optional<GroupSpec> from_name(std::string_view name);
  std::string_view name() const;

  bool operator==(const GroupSpec&) const = default;
};

class PayloadEncodeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Group elements and scalars travel as canonical fixed-width byte strings:
// elements are 4-byte big-endian residues (toy) or 33-byte compressed
// points with all-zero meaning the identity (P-256); scalars are big-endian
// values < q, zero-padded to scalar_size().
class Group {
 public:
  static const Group& get(const GroupSpec& spec);
  virtual ~Group() = default;

  const GroupSpec& spec() const { return spec_; }
  size_t element_size() const { return element_size_; }
  size_t scalar_size() const { return scalar_size_; }

  virtual Bytes identity() const = 0;
  virtual Bytes generator() const = 0;
  virtual bool element_valid(BytesView e) const = 0;
  virtual Bytes mul(BytesView a, BytesView b) const = 0;
  virtual Bytes exp(BytesView base, BytesView scalar) const = 0;
  virtual Bytes inverse(BytesView a) const = 0;

  bool is_identity(BytesView e) const;

  // Scalar arithmetic mod q.
  bool scalar_valid(BytesView s) const;
  Bytes scalar_from_u64(uint64_t v) const;
  uint64_t scalar_to_u64(BytesView s) const;
  Bytes scalar_add(BytesView a, BytesView b) const;
  Bytes scalar_sub(BytesView a, BytesView b) const;
  Bytes scalar_mul(BytesView a, BytesView b) const;
  // Reduce an arbitrary-width big-endian value mod q (Fiat-Shamir digests).
  Bytes scalar_reduce(BytesView wide) const;

  Bytes random_scalar(DeterministicRng& rng) const;          // [0, q)
  Bytes random_nonzero_scalar(DeterministicRng& rng) const;  // [1, q)

  // DC-net payload embedding. Empty payload <-> identity element; decode
  // returns nullopt for elements that carry no well-formed payload.
  virtual size_t max_payload() const = 0;
  virtual Bytes encode_payload(BytesView payload) const = 0;
  virtual std::optional<Bytes> decode_payload(BytesView element) const = 0;

 protected:
  Group(GroupSpec spec, Bytes order_be, size_t element_size, size_t scalar_size);

  GroupSpec spec_;
  Bytes order_be_;  // q, big-endian, scalar_size_ wide
  size_t element_size_;
  size_t scalar_size_;
};

}  // namespace conscript::crypto
