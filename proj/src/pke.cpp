#include "conscript/pke.hpp"

#include <openssl/evp.h>

#include <memory>

namespace conscript::crypto {

namespace {

constexpr std::string_view kKemDomain = "conscript.kem.v1";
constexpr size_t kAeadKeyLen = 32;
constexpr size_t kAeadNonceLen = 12;

struct EvpCipherCtxDeleter {
  void operator()(EVP_CIPHER_CTX* p) const { EVP_CIPHER_CTX_free(p); }
};
using CipherCtx = std::unique_ptr<EVP_CIPHER_CTX, EvpCipherCtxDeleter>;

// One key per encapsulation, so a fixed nonce is sound.
Bytes derive_key(const Group& group, BytesView ephemeral, BytesView shared) {
  Bytes material = bytes_of(kKemDomain);
  append(material, bytes_of(group.spec().name()));
  append(material, ephemeral);
  append(material, shared);
  return sha256(material);
}

Bytes aead_seal(BytesView key, BytesView plaintext) {
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  Bytes nonce(kAeadNonceLen, 0);
  if (!ctx || EVP_EncryptInit_ex(ctx.get(), EVP_chacha20_poly1305(), nullptr, key.data(),
                                 nonce.data()) != 1)
    throw std::runtime_error("AEAD init failed");
  Bytes out(plaintext.size() + kAeadTagLen);
  int len = 0;
  if (EVP_EncryptUpdate(ctx.get(), out.data(), &len, plaintext.data(),
                        static_cast<int>(plaintext.size())) != 1)
    throw std::runtime_error("AEAD encrypt failed");
  int fin = 0;
  if (EVP_EncryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1)
    throw std::runtime_error("AEAD finalize failed");
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_GET_TAG, kAeadTagLen,
                          out.data() + plaintext.size()) != 1)
    throw std::runtime_error("AEAD tag failed");
  return out;
}

Bytes aead_open(BytesView key, BytesView sealed) {
  if (sealed.size() < kAeadTagLen) throw MalformedCiphertextError("sealed body too short");
  size_t body_len = sealed.size() - kAeadTagLen;
  CipherCtx ctx(EVP_CIPHER_CTX_new());
  Bytes nonce(kAeadNonceLen, 0);
  if (!ctx || EVP_DecryptInit_ex(ctx.get(), EVP_chacha20_poly1305(), nullptr, key.data(),
                                 nonce.data()) != 1)
    throw std::runtime_error("AEAD init failed");
  Bytes tag(sealed.begin() + body_len, sealed.end());
  if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_AEAD_SET_TAG, kAeadTagLen, tag.data()) != 1)
    throw std::runtime_error("AEAD tag set failed");
  Bytes out(body_len);
  int len = 0;
  if (body_len > 0 && EVP_DecryptUpdate(ctx.get(), out.data(), &len, sealed.data(),
                                        static_cast<int>(body_len)) != 1)
    throw AuthenticationError("ciphertext authentication failed");
  int fin = 0;
  if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1)
    throw AuthenticationError("ciphertext authentication failed");
  return out;
}

}  // namespace

KeyPair keygen(const Group& group, DeterministicRng& rng) {
  KeyPair kp;
  kp.secret = group.random_nonzero_scalar(rng);
  kp.public_key = group.exp(group.generator(), kp.secret);
  return kp;
}

Bytes HybridCiphertext::to_bytes() const { return concat({view(ephemeral), view(sealed)}); }

HybridCiphertext HybridCiphertext::from_bytes(const Group& group, BytesView raw) {
  if (raw.size() < ciphertext_overhead(group))
    throw MalformedCiphertextError("ciphertext shorter than overhead");
  HybridCiphertext ct;
  ct.ephemeral.assign(raw.begin(), raw.begin() + group.element_size());
  ct.sealed.assign(raw.begin() + group.element_size(), raw.end());
  if (!group.element_valid(ct.ephemeral))
    throw MalformedCiphertextError("ephemeral element invalid");
  return ct;
}

size_t ciphertext_overhead(const Group& group) { return group.element_size() + kAeadTagLen; }

HybridCiphertext pke_encrypt(const Group& group, BytesView public_key, BytesView plaintext,
                             DeterministicRng& rng) {
  if (plaintext.size() > kMaxPlaintextLen) throw OversizePlaintextError("plaintext too long");
  if (!group.element_valid(public_key)) throw std::invalid_argument("bad public key");
  Bytes eph_secret = group.random_nonzero_scalar(rng);
  HybridCiphertext ct;
  ct.ephemeral = group.exp(group.generator(), eph_secret);
  Bytes shared = group.exp(public_key, eph_secret);
  ct.sealed = aead_seal(derive_key(group, ct.ephemeral, shared), plaintext);
  return ct;
}

Bytes pke_decrypt(const Group& group, BytesView secret, const HybridCiphertext& ct) {
  if (!group.scalar_valid(secret)) throw std::invalid_argument("bad secret key");
  if (!group.element_valid(ct.ephemeral))
    throw MalformedCiphertextError("ephemeral element invalid");
  Bytes shared = group.exp(ct.ephemeral, secret);
  return aead_open(derive_key(group, ct.ephemeral, shared), ct.sealed);
}

Bytes pke_encrypt_bytes(const Group& group, BytesView public_key, BytesView plaintext,
                        DeterministicRng& rng) {
  return pke_encrypt(group, public_key, plaintext, rng).to_bytes();
}

Bytes pke_decrypt_bytes(const Group& group, BytesView secret, BytesView ct) {
  return pke_decrypt(group, secret, HybridCiphertext::from_bytes(group, ct));
}

}  // namespace conscript::crypto
