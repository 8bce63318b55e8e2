#include "conscript/group.hpp"

#include <openssl/bn.h>
#include <openssl/ec.h>
#include <openssl/obj_mac.h>

#include <memory>
#include <stdexcept>

namespace conscript::crypto {

namespace {

struct BnDeleter {
  void operator()(BIGNUM* p) const { BN_free(p); }
};
struct BnCtxDeleter {
  void operator()(BN_CTX* p) const { BN_CTX_free(p); }
};
struct PointDeleter {
  void operator()(EC_POINT* p) const { EC_POINT_free(p); }
};

using BnPtr = std::unique_ptr<BIGNUM, BnDeleter>;
using BnCtxPtr = std::unique_ptr<BN_CTX, BnCtxDeleter>;
using PointPtr = std::unique_ptr<EC_POINT, PointDeleter>;

BnPtr bn_from_bytes(BytesView b) {
  BnPtr out(BN_bin2bn(b.data(), static_cast<int>(b.size()), nullptr));
  if (!out) throw std::runtime_error("BN_bin2bn failed");
  return out;
}

Bytes bn_to_fixed(const BIGNUM* v, size_t width) {
  Bytes out(width, 0);
  int n = BN_num_bytes(v);
  if (static_cast<size_t>(n) > width) throw std::runtime_error("value too wide for encoding");
  BN_bn2bin(v, out.data() + (width - n));
  return out;
}

bool all_zero(BytesView b) {
  for (uint8_t x : b)
    if (x != 0) return false;
  return true;
}

}  // namespace

std::optional<GroupSpec> GroupSpec::from_name(std::string_view name) {
  if (name == "toy-modp") return GroupSpec::toy();
  if (name == "p256-curve") return GroupSpec::p256();
  return std::nullopt;
}

std::string_view GroupSpec::name() const {
  switch (kind) {
    case GroupKind::ToyModP:
      return "toy-modp";
    case GroupKind::P256Curve:
      return "p256-curve";
  }
  throw std::logic_error("unknown group kind");
}

Group::Group(GroupSpec spec, Bytes order_be, size_t element_size, size_t scalar_size)
    : spec_(spec),
      order_be_(std::move(order_be)),
      element_size_(element_size),
      scalar_size_(scalar_size) {}

bool Group::is_identity(BytesView e) const { return bytes_equal(e, identity()); }

bool Group::scalar_valid(BytesView s) const {
  if (s.size() != scalar_size_) return false;
  BnPtr v = bn_from_bytes(s);
  BnPtr q = bn_from_bytes(order_be_);
  return BN_cmp(v.get(), q.get()) < 0;
}

Bytes Group::scalar_from_u64(uint64_t v) const {
  BnPtr b(BN_new());
  if (!BN_set_word(b.get(), v)) throw std::runtime_error("BN_set_word failed");
  BnPtr q = bn_from_bytes(order_be_);
  if (BN_cmp(b.get(), q.get()) >= 0) throw std::invalid_argument("scalar out of range");
  return bn_to_fixed(b.get(), scalar_size_);
}

uint64_t Group::scalar_to_u64(BytesView s) const {
  if (s.size() != scalar_size_) throw std::invalid_argument("bad scalar width");
  BnPtr v = bn_from_bytes(s);
  if (BN_num_bytes(v.get()) > 8) throw std::invalid_argument("scalar exceeds 64 bits");
  return BN_get_word(v.get());
}

Bytes Group::scalar_add(BytesView a, BytesView b) const {
  BnCtxPtr ctx(BN_CTX_new());
  BnPtr x = bn_from_bytes(a), y = bn_from_bytes(b), q = bn_from_bytes(order_be_);
  BnPtr r(BN_new());
  if (!BN_mod_add(r.get(), x.get(), y.get(), q.get(), ctx.get()))
    throw std::runtime_error("BN_mod_add failed");
  return bn_to_fixed(r.get(), scalar_size_);
}

Bytes Group::scalar_sub(BytesView a, BytesView b) const {
  BnCtxPtr ctx(BN_CTX_new());
  BnPtr x = bn_from_bytes(a), y = bn_from_bytes(b), q = bn_from_bytes(order_be_);
  BnPtr r(BN_new());
  if (!BN_mod_sub(r.get(), x.get(), y.get(), q.get(), ctx.get()))
    throw std::runtime_error("BN_mod_sub failed");
  return bn_to_fixed(r.get(), scalar_size_);
}

Bytes Group::scalar_mul(BytesView a, BytesView b) const {
  BnCtxPtr ctx(BN_CTX_new());
  BnPtr x = bn_from_bytes(a), y = bn_from_bytes(b), q = bn_from_bytes(order_be_);
  BnPtr r(BN_new());
  if (!BN_mod_mul(r.get(), x.get(), y.get(), q.get(), ctx.get()))
    throw std::runtime_error("BN_mod_mul failed");
  return bn_to_fixed(r.get(), scalar_size_);
}

Bytes Group::scalar_reduce(BytesView wide) const {
  BnCtxPtr ctx(BN_CTX_new());
  BnPtr v = bn_from_bytes(wide), q = bn_from_bytes(order_be_);
  BnPtr r(BN_new());
  if (!BN_mod(r.get(), v.get(), q.get(), ctx.get())) throw std::runtime_error("BN_mod failed");
  return bn_to_fixed(r.get(), scalar_size_);
}

Bytes Group::random_scalar(DeterministicRng& rng) const {
  BnPtr q = bn_from_bytes(order_be_);
  int bits = BN_num_bits(q.get());
  size_t nbytes = static_cast<size_t>((bits + 7) / 8);
  int shift = static_cast<int>(nbytes * 8) - bits;
  for (;;) {
    Bytes draw = rng.bytes(nbytes);
    draw[0] = static_cast<uint8_t>(draw[0] >> shift);
    BnPtr v = bn_from_bytes(draw);
    if (BN_cmp(v.get(), q.get()) < 0) return bn_to_fixed(v.get(), scalar_size_);
  }
}

Bytes Group::random_nonzero_scalar(DeterministicRng& rng) const {
  for (;;) {
    Bytes s = random_scalar(rng);
    if (!all_zero(s)) return s;
  }
}

// ---------------------------------------------------------------------------
// Toy group: order-11 subgroup of Z_23^*, generator 2.
// ---------------------------------------------------------------------------

namespace {

constexpr uint64_t kToyP = 23;
constexpr uint64_t kToyQ = 11;
constexpr uint64_t kToyG = 2;
constexpr size_t kToyWidth = 4;

class ToyGroup final : public Group {
 public:
  ToyGroup() : Group(GroupSpec::toy(), make_order(), kToyWidth, kToyWidth) {}

  Bytes identity() const override { return encode(1); }
  Bytes generator() const override { return encode(kToyG); }

  bool element_valid(BytesView e) const override {
    if (e.size() != kToyWidth) return false;
    uint64_t v = decode(e);
    if (v == 0 || v >= kToyP) return false;
    return powmod(v, kToyQ) == 1;
  }

  Bytes mul(BytesView a, BytesView b) const override {
    return encode((checked(a) * checked(b)) % kToyP);
  }

  Bytes exp(BytesView base, BytesView scalar) const override {
    if (!scalar_valid(scalar)) throw std::invalid_argument("bad scalar");
    return encode(powmod(checked(base), scalar_to_u64(scalar)));
  }

  Bytes inverse(BytesView a) const override {
    // a^(p-2) mod p
    return encode(powmod(checked(a), kToyP - 2));
  }

  size_t max_payload() const override { return 30; }

  // Payload bytes are read as a big-endian integer m and embedded as g^m;
  // decoding brute-forces the discrete log. Only m < q round-trips, so the
  // toy group carries tiny payloads — it is a test oracle, not transport.
  Bytes encode_payload(BytesView payload) const override {
    if (payload.empty()) return identity();
    if (payload.size() > max_payload()) throw PayloadEncodeError("payload too long");
    uint64_t m = 0;
    for (uint8_t b : payload) {
      if (m > (UINT64_MAX >> 8)) throw PayloadEncodeError("payload exceeds toy-group capacity");
      m = (m << 8) | b;
    }
    if (m >= kToyQ) throw PayloadEncodeError("payload exceeds toy-group capacity");
    if ((payload[0] == 0)) throw PayloadEncodeError("payload has leading zero byte");
    return encode(powmod(kToyG, m));
  }

  std::optional<Bytes> decode_payload(BytesView element) const override {
    if (!element_valid(element)) return std::nullopt;
    uint64_t target = decode(element);
    uint64_t acc = 1;
    for (uint64_t m = 0; m < kToyQ && m < 65536; m++) {
      if (acc == target) {
        Bytes out;
        if (m > 0) out.push_back(static_cast<uint8_t>(m));
        return out;
      }
      acc = (acc * kToyG) % kToyP;
    }
    return std::nullopt;
  }

 private:
  static Bytes make_order() {
    Bytes q(kToyWidth, 0);
    q[kToyWidth - 1] = static_cast<uint8_t>(kToyQ);
    return q;
  }

  static Bytes encode(uint64_t v) {
    Bytes out;
    append_u32_be(out, static_cast<uint32_t>(v));
    return out;
  }

  static uint64_t decode(BytesView e) {
    uint64_t v = 0;
    for (uint8_t b : e) v = (v << 8) | b;
    return v;
  }

  uint64_t checked(BytesView e) const {
    if (!element_valid(e)) throw std::invalid_argument("element not in toy group");
    return decode(e);
  }

  static uint64_t powmod(uint64_t base, uint64_t e) {
    uint64_t result = 1;
    base %= kToyP;
    while (e > 0) {
      if (e & 1) result = (result * base) % kToyP;
      base = (base * base) % kToyP;
      e >>= 1;
    }
    return result;
  }
};

// ---------------------------------------------------------------------------
// P-256. Compressed-point encodings; 33 zero bytes stand for the identity
// (OpenSSL's single 0x00 byte for infinity would break fixed-width framing).
// ---------------------------------------------------------------------------

constexpr size_t kP256ElementSize = 33;
constexpr size_t kP256ScalarSize = 32;

class P256Group final : public Group {
 public:
  P256Group()
      : Group(GroupSpec::p256(), Bytes(kP256ScalarSize, 0), kP256ElementSize, kP256ScalarSize),
        group_(EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1)) {
    if (!group_) throw std::runtime_error("EC_GROUP_new_by_curve_name failed");
    BnPtr q(BN_new());
    BnCtxPtr ctx(BN_CTX_new());
    if (!EC_GROUP_get_order(group_, q.get(), ctx.get()))
      throw std::runtime_error("EC_GROUP_get_order failed");
    order_be_ = bn_to_fixed(q.get(), kP256ScalarSize);
  }

  ~P256Group() override { EC_GROUP_free(group_); }

  Bytes identity() const override { return Bytes(kP256ElementSize, 0); }

  Bytes generator() const override {
    return point_to_bytes(EC_GROUP_get0_generator(group_));
  }

  bool element_valid(BytesView e) const override {
    if (e.size() != kP256ElementSize) return false;
    if (all_zero(e)) return true;
    BnCtxPtr ctx(BN_CTX_new());
    PointPtr p(EC_POINT_new(group_));
    return EC_POINT_oct2point(group_, p.get(), e.data(), e.size(), ctx.get()) == 1;
  }

  Bytes mul(BytesView a, BytesView b) const override {
    BnCtxPtr ctx(BN_CTX_new());
    PointPtr pa = bytes_to_point(a), pb = bytes_to_point(b);
    PointPtr r(EC_POINT_new(group_));
    if (!EC_POINT_add(group_, r.get(), pa.get(), pb.get(), ctx.get()))
      throw std::runtime_error("EC_POINT_add failed");
    return point_to_bytes(r.get());
  }

  Bytes exp(BytesView base, BytesView scalar) const override {
    if (!scalar_valid(scalar)) throw std::invalid_argument("bad scalar");
    BnCtxPtr ctx(BN_CTX_new());
    PointPtr pb = bytes_to_point(base);
    BnPtr s = bn_from_bytes(scalar);
    PointPtr r(EC_POINT_new(group_));
    if (!EC_POINT_mul(group_, r.get(), nullptr, pb.get(), s.get(), ctx.get()))
      throw std::runtime_error("EC_POINT_mul failed");
    return point_to_bytes(r.get());
  }

  Bytes inverse(BytesView a) const override {
    BnCtxPtr ctx(BN_CTX_new());
    PointPtr p = bytes_to_point(a);
    if (!EC_POINT_invert(group_, p.get(), ctx.get()))
      throw std::runtime_error("EC_POINT_invert failed");
    return point_to_bytes(p.get());
  }

  size_t max_payload() const override { return 30; }

  // Try-and-increment embedding: the 32-byte x-coordinate is laid out as
  // [counter][length][payload][zero padding]; the counter is bumped until
  // the x-coordinate lands on the curve.
  Bytes encode_payload(BytesView payload) const override {
    if (payload.empty()) return identity();
    if (payload.size() > max_payload()) throw PayloadEncodeError("payload too long");
    Bytes candidate(kP256ElementSize, 0);
    candidate[0] = 0x02;
    candidate[2] = static_cast<uint8_t>(payload.size());
    std::copy(payload.begin(), payload.end(), candidate.begin() + 3);
    BnCtxPtr ctx(BN_CTX_new());
    PointPtr p(EC_POINT_new(group_));
    for (int counter = 0; counter < 256; counter++) {
      candidate[1] = static_cast<uint8_t>(counter);
      if (EC_POINT_oct2point(group_, p.get(), candidate.data(), candidate.size(), ctx.get()) == 1)
        return candidate;
    }
    throw PayloadEncodeError("no curve embedding found");
  }

  std::optional<Bytes> decode_payload(BytesView element) const override {
    if (!element_valid(element)) return std::nullopt;
    if (all_zero(element)) return Bytes{};
    // x-coordinate = element[1..33): [counter][length][payload][padding]
    size_t len = element[2];
    if (len == 0 || len > max_payload()) return std::nullopt;
    Bytes payload(element.begin() + 3, element.begin() + 3 + len);
    for (size_t i = 3 + len; i < element.size(); i++)
      if (element[i] != 0) return std::nullopt;
    return payload;
  }

 private:
  EC_GROUP* group_;

  Bytes point_to_bytes(const EC_POINT* p) const {
    BnCtxPtr ctx(BN_CTX_new());
    if (EC_POINT_is_at_infinity(group_, p)) return Bytes(kP256ElementSize, 0);
    Bytes out(kP256ElementSize);
    size_t n = EC_POINT_point2oct(group_, p, POINT_CONVERSION_COMPRESSED, out.data(), out.size(),
                                  ctx.get());
    if (n != kP256ElementSize) throw std::runtime_error("EC_POINT_point2oct failed");
    return out;
  }

  PointPtr bytes_to_point(BytesView e) const {
    if (e.size() != kP256ElementSize) throw std::invalid_argument("bad element width");
    BnCtxPtr ctx(BN_CTX_new());
    PointPtr p(EC_POINT_new(group_));
    if (all_zero(e)) {
      if (!EC_POINT_set_to_infinity(group_, p.get()))
        throw std::runtime_error("EC_POINT_set_to_infinity failed");
      return p;
    }
    if (EC_POINT_oct2point(group_, p.get(), e.data(), e.size(), ctx.get()) != 1)
      throw std::invalid_argument("element not on curve");
    return p;
  }
};

}  // namespace

const Group& Group::get(const GroupSpec& spec) {
  static const ToyGroup toy;
  static const P256Group p256;
  switch (spec.kind) {
    case GroupKind::ToyModP:
      return toy;
    case GroupKind::P256Curve:
      return p256;
  }
  throw std::logic_error("unknown group kind");
}

}  // namespace conscript::crypto
