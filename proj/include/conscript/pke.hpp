#pragma once

#include <stdexcept>

#include "conscript/group.hpp"

namespace conscript::crypto {

inline constexpr size_t kAeadTagLen = 16;
inline constexpr size_t kMaxPlaintextLen = 1 << 16;

struct KeyPair {
  Bytes secret;      // scalar in [1, q-1]
  Bytes public_key;  // g^secret
};

KeyPair keygen(const Group& group, DeterministicRng& rng);

class DecryptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tag check failed: wrong key or tampered ciphertext.
class AuthenticationError final : public DecryptError {
 public:
  using DecryptError::DecryptError;
};

// Ciphertext bytes do not even parse (truncated, bad element encoding).
class MalformedCiphertextError final : public DecryptError {
 public:
  using DecryptError::DecryptError;
};

class OversizePlaintextError final : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// KEM-DEM hybrid: fresh group-element encapsulation, hashed into a
// ChaCha20-Poly1305 key used once. Serialized form is
// [ephemeral element][body || 16-byte tag], so the length overhead per
// encryption is a constant that never depends on the plaintext.
struct HybridCiphertext {
  Bytes ephemeral;
  Bytes sealed;

  Bytes to_bytes() const;
  static HybridCiphertext from_bytes(const Group& group, BytesView raw);
};

size_t ciphertext_overhead(const Group& group);

HybridCiphertext pke_encrypt(const Group& group, BytesView public_key, BytesView plaintext,
                             DeterministicRng& rng);
Bytes pke_decrypt(const Group& group, BytesView secret, const HybridCiphertext& ct);

// Serialized-form conveniences used by the onion layering.
Bytes pke_encrypt_bytes(const Group& group, BytesView public_key, BytesView plaintext,
                        DeterministicRng& rng);
Bytes pke_decrypt_bytes(const Group& group, BytesView secret, BytesView ct);

}  // namespace conscript::crypto
