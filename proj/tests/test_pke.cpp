#include "doctest.h"

#include "conscript/pke.hpp"

using namespace conscript;
using namespace conscript::crypto;

TEST_CASE("keygen: public = g^secret, never zero, deterministic") {
  const Group& g = Group::get(GroupSpec::toy());
  DeterministicRng rng(11);
  for (int i = 0; i < 10000; i++) {
    KeyPair kp = keygen(g, rng);
    REQUIRE(g.scalar_to_u64(kp.secret) != 0);
    REQUIRE(kp.public_key == g.exp(g.generator(), kp.secret));
  }
  DeterministicRng a(12), b(12);
  KeyPair ka = keygen(g, a), kb = keygen(g, b);
  CHECK(ka.secret == kb.secret);
  CHECK(ka.public_key == kb.public_key);
}

TEST_CASE("encrypt/decrypt round trip, 256-byte block") {
  for (auto spec : {GroupSpec::toy(), GroupSpec::p256()}) {
    const Group& g = Group::get(spec);
    DeterministicRng rng(13);
    KeyPair kp = keygen(g, rng);
    Bytes plaintext = rng.bytes(256);
    auto ct = pke_encrypt(g, kp.public_key, plaintext, rng);
    CHECK(pke_decrypt(g, kp.secret, ct) == plaintext);
  }
}

TEST_CASE("encryption is randomized") {
  const Group& g = Group::get(GroupSpec::toy());
  DeterministicRng rng(14);
  KeyPair kp = keygen(g, rng);
  Bytes m = bytes_of("same plaintext");
  CHECK(pke_encrypt_bytes(g, kp.public_key, m, rng) != pke_encrypt_bytes(g, kp.public_key, m, rng));
}

TEST_CASE("ciphertext length = plaintext length + constant overhead") {
  const Group& toy = Group::get(GroupSpec::toy());
  CHECK(ciphertext_overhead(toy) == 20);  // 4-byte element + 16-byte tag
  const Group& p256 = Group::get(GroupSpec::p256());
  CHECK(ciphertext_overhead(p256) == 49);  // 33-byte point + 16-byte tag

  DeterministicRng rng(15);
  KeyPair kp = keygen(toy, rng);
  for (size_t len : {0u, 1u, 37u, 256u, 1024u}) {
    Bytes m = rng.bytes(len);
    CHECK(pke_encrypt_bytes(toy, kp.public_key, m, rng).size() == len + 20);
  }
}

TEST_CASE("flipped byte fails authentication, never yields garbage") {
  const Group& g = Group::get(GroupSpec::toy());
  DeterministicRng rng(16);
  KeyPair kp = keygen(g, rng);
  Bytes m = rng.bytes(256);
  Bytes ct = pke_encrypt_bytes(g, kp.public_key, m, rng);
  for (int i = 0; i < 64; i++) {
    Bytes tampered = ct;
    size_t pos = rng.uniform(tampered.size());
    tampered[pos] ^= static_cast<uint8_t>(1 + rng.uniform(255));
    CHECK_THROWS_AS(pke_decrypt_bytes(g, kp.secret, tampered), DecryptError);
  }
}

TEST_CASE("wrong secret key fails authentication") {
  const Group& g = Group::get(GroupSpec::toy());
  DeterministicRng rng(17);
  KeyPair kp = keygen(g, rng);
  KeyPair other = keygen(g, rng);
  while (other.secret == kp.secret) other = keygen(g, rng);
  Bytes ct = pke_encrypt_bytes(g, kp.public_key, bytes_of("secret"), rng);
  CHECK_THROWS_AS(pke_decrypt_bytes(g, other.secret, ct), AuthenticationError);
}

TEST_CASE("truncated ciphertext is malformed, not an auth failure") {
  const Group& g = Group::get(GroupSpec::toy());
  DeterministicRng rng(18);
  KeyPair kp = keygen(g, rng);
  Bytes short_ct = rng.bytes(ciphertext_overhead(g) - 1);
  CHECK_THROWS_AS(pke_decrypt_bytes(g, kp.secret, short_ct), MalformedCiphertextError);
}

TEST_CASE("oversize plaintext is rejected") {
  const Group& g = Group::get(GroupSpec::toy());
  DeterministicRng rng(19);
  KeyPair kp = keygen(g, rng);
  Bytes huge(kMaxPlaintextLen + 1, 0);
  CHECK_THROWS_AS(pke_encrypt(g, kp.public_key, huge, rng), OversizePlaintextError);
}

TEST_CASE("identical seeds give byte-identical ciphertexts") {
  const Group& g = Group::get(GroupSpec::p256());
  DeterministicRng ra(20), rb(20);
  KeyPair ka = keygen(g, ra), kb = keygen(g, rb);
  CHECK(pke_encrypt_bytes(g, ka.public_key, bytes_of("det"), ra) ==
        pke_encrypt_bytes(g, kb.public_key, bytes_of("det"), rb));
}
