#include "doctest.h"

#include "conscript/mixnet.hpp"
#include "conscript/participants.hpp"

#include <map>

using namespace conscript;
using namespace conscript::mixnet;

namespace {

struct TestCascade {
  MixnetParams params;
  std::vector<crypto::KeyPair> keys;
};

TestCascade make_keys(const crypto::GroupSpec& spec, size_t m, DeterministicRng& rng) {
  const crypto::Group& g = crypto::Group::get(spec);
  TestCascade tc;
  tc.params.group = spec;
  for (size_t i = 0; i < m; i++) {
    tc.keys.push_back(crypto::keygen(g, rng));
    tc.params.server_public_keys.push_back(tc.keys.back().public_key);
  }
  return tc;
}

Bytes submit_envelope(const MixnetParams& params, uint64_t round, BytesView plaintext,
                      DeterministicRng& rng) {
  wire::SubmissionEnvelope env;
  env.system = wire::SystemTag::Mixnet;
  env.round = round;
  env.body = onion_encrypt(plaintext, params, rng);
  return wire::canonical_encode(env);
}

}  // namespace

TEST_CASE("onion round trip: peeling all five layers recovers the dummy block") {
  DeterministicRng rng(31);
  auto tc = make_keys(crypto::GroupSpec::toy(), 5, rng);
  const crypto::Group& g = crypto::Group::get(tc.params.group);
  Bytes dummy = wire::make_plaintext({}, true);
  Bytes onion = onion_encrypt(dummy, tc.params, rng);
  CHECK(onion.size() == 256 + 5 * crypto::ciphertext_overhead(g));

  // oracle: strip one layer at a time with the secret keys in hop order
  Bytes layer = onion;
  for (size_t i = 0; i < 5; i++) layer = crypto::pke_decrypt_bytes(g, tc.keys[i].secret, layer);
  CHECK(layer == dummy);
}

TEST_CASE("single-layer onion is one hybrid encryption") {
  DeterministicRng rng(32);
  auto tc = make_keys(crypto::GroupSpec::toy(), 1, rng);
  const crypto::Group& g = crypto::Group::get(tc.params.group);
  Bytes m = wire::make_plaintext(bytes_of("x"), false);
  Bytes onion = onion_encrypt(m, tc.params, rng);
  CHECK(onion.size() == 256 + crypto::ciphertext_overhead(g));
  CHECK(crypto::pke_decrypt_bytes(g, tc.keys[0].secret, onion) == m);
}

TEST_CASE("peeling out of order fails at the first peel") {
  DeterministicRng rng(33);
  auto tc = make_keys(crypto::GroupSpec::toy(), 3, rng);
  const crypto::Group& g = crypto::Group::get(tc.params.group);
  Bytes onion = onion_encrypt(wire::make_plaintext({}, true), tc.params, rng);
  CHECK_THROWS_AS(crypto::pke_decrypt_bytes(g, tc.keys[1].secret, onion),
                  crypto::AuthenticationError);
}

TEST_CASE("should_fire: policy table") {
  SUBCASE("timed boundary is inclusive") {
    MixPolicy timed{MixPolicyKind::Timed, 3600, 0, false};
    CHECK(should_fire(timed, {0, 0}, 3600));
    CHECK_FALSE(should_fire(timed, {100, 0}, 3599));
  }
  SUBCASE("threshold counts the pool") {
    MixPolicy threshold{MixPolicyKind::Threshold, 0, 10, false};
    CHECK_FALSE(should_fire(threshold, {9, 0}, 1000000));
    CHECK(should_fire(threshold, {10, 0}, 0));
  }
  SUBCASE("roster-gated threshold ignores a sybil flood") {
    MixPolicy roster{MixPolicyKind::ThresholdAndTimed, 3600, 10, true};
    CHECK_FALSE(should_fire(roster, {509, 9}, 3600));  // 9 signed + 500 unsigned
    CHECK(should_fire(roster, {510, 10}, 3600));
    CHECK_FALSE(should_fire(roster, {510, 10}, 3599));  // time gate still applies
  }
}

TEST_CASE("policy invariants are enforced") {
  MixPolicy bad{MixPolicyKind::ThresholdAndTimed, 0, 10, false};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  MixPolicy roster_on_timed{MixPolicyKind::Timed, 10, 0, true};
  CHECK_THROWS_AS(roster_on_timed.validate(), std::invalid_argument);
}

TEST_CASE("submit: ack, bad length, non-canonical, wrong round") {
  DeterministicRng rng(34);
  Cascade cascade(crypto::GroupSpec::toy(), 3, MixPolicy{MixPolicyKind::Timed, 100, 0, false}, 1,
                  rng);
  Bytes good = submit_envelope(cascade.params(), 1, wire::make_plaintext({}, true), rng);
  CHECK(cascade.submit(good) == SubmitStatus::Ack);
  CHECK(cascade.stats().total == 1);

  // body one byte short
  wire::SubmissionEnvelope env;
  env.system = wire::SystemTag::Mixnet;
  env.round = 1;
  env.body = Bytes(cascade.params().hop_length(1) - 1, 0);
  CHECK(cascade.submit(wire::canonical_encode(env)) == SubmitStatus::RejectBadLength);

  Bytes spaced = good;
  spaced.insert(spaced.begin() + 1, ' ');
  CHECK(cascade.submit(spaced) == SubmitStatus::RejectNonCanonical);

  Bytes wrong_round = submit_envelope(cascade.params(), 2, wire::make_plaintext({}, true), rng);
  CHECK(cascade.submit(wrong_round) == SubmitStatus::RejectWrongContext);

  CHECK(cascade.stats().total == 1);
}

TEST_CASE("submit: roster signatures verify before counting") {
  DeterministicRng rng(35);
  const crypto::Group& g = crypto::Group::get(crypto::GroupSpec::toy());
  Cascade cascade(crypto::GroupSpec::toy(), 2,
                  MixPolicy{MixPolicyKind::ThresholdAndTimed, 10, 2, true}, 1, rng);

  participants::ClientProfile registered;
  registered.id = "r0";
  registered.kind = participants::ClientKind::RegisteredSavvy;
  registered.roster_key = crypto::keygen(g, rng);
  cascade.set_roster(Roster{{registered.roster_key->public_key}});

  wire::SubmissionEnvelope env;
  env.system = wire::SystemTag::Mixnet;
  env.round = 1;
  env.body = onion_encrypt(wire::make_plaintext({}, true), cascade.params(), rng);
  auto signed_env = participants::roster_sign(g, registered, env, rng);
  CHECK(cascade.submit(wire::canonical_encode(signed_env)) == SubmitStatus::Ack);
  CHECK(cascade.stats().signed_count == 1);

  // signature from a key that is not on the roster
  participants::ClientProfile stranger = registered;
  stranger.roster_key = crypto::keygen(g, rng);
  auto bad_env = participants::roster_sign(g, stranger, env, rng);
  CHECK(cascade.submit(wire::canonical_encode(bad_env)) == SubmitStatus::RejectBadSignature);

  // valid signer, but the signature no longer covers the (tampered) body
  auto tampered = signed_env;
  tampered.body.back() ^= 0x01;
  CHECK(cascade.submit(wire::canonical_encode(tampered)) == SubmitStatus::RejectBadSignature);
}

TEST_CASE("fire dedupes exact duplicates before peeling") {
  DeterministicRng rng(36);
  Cascade cascade(crypto::GroupSpec::toy(), 1, MixPolicy{MixPolicyKind::Timed, 10, 0, false}, 1,
                  rng);
  Bytes c1 = submit_envelope(cascade.params(), 1, wire::make_plaintext(bytes_of("a"), false), rng);
  Bytes c2 = submit_envelope(cascade.params(), 1, wire::make_plaintext(bytes_of("b"), false), rng);
  CHECK(cascade.submit(c1) == SubmitStatus::Ack);
  CHECK(cascade.submit(c2) == SubmitStatus::Ack);
  CHECK(cascade.submit(c1) == SubmitStatus::Ack);  // duplicate enters the pool
  auto bulletin = cascade.fire_all();
  CHECK(bulletin.real_plaintexts.size() == 2);
  CHECK(bulletin.duplicate_count == 1);
  CHECK(bulletin.drop_count == 0);
}

TEST_CASE("undecryptable entries are dropped and counted") {
  DeterministicRng rng(37);
  Cascade cascade(crypto::GroupSpec::toy(), 2, MixPolicy{MixPolicyKind::Timed, 10, 0, false}, 1,
                  rng);
  wire::SubmissionEnvelope junk;
  junk.system = wire::SystemTag::Mixnet;
  junk.round = 1;
  junk.body = Bytes(cascade.params().hop_length(1), 0xee);
  CHECK(cascade.submit(wire::canonical_encode(junk)) == SubmitStatus::Ack);
  Bytes good = submit_envelope(cascade.params(), 1, wire::make_plaintext(bytes_of("ok"), false), rng);
  CHECK(cascade.submit(good) == SubmitStatus::Ack);
  auto bulletin = cascade.fire_all();
  CHECK(bulletin.real_plaintexts.size() == 1);
  CHECK(bulletin.drop_count == 1);
}

TEST_CASE("47 dummies and 3 real messages through a 5-hop cascade") {
  // Runs on the curve group: toy-group dummies draw from a 10-element
  // randomness space, so identical innermost layers collide and the
  // per-hop dedupe (correctly) removes them.
  DeterministicRng rng(38);
  Cascade cascade(crypto::GroupSpec::p256(), 5, MixPolicy{MixPolicyKind::Timed, 3600, 0, false},
                  1, rng);
  std::vector<std::string> payloads = {"leak-0", "leak-1", "leak-2"};
  for (const auto& p : payloads)
    CHECK(cascade.submit(submit_envelope(cascade.params(), 1,
                                         wire::make_plaintext(bytes_of(p), false), rng)) ==
          SubmitStatus::Ack);
  for (int i = 0; i < 47; i++)
    CHECK(cascade.submit(submit_envelope(cascade.params(), 1, wire::make_plaintext({}, true),
                                         rng)) == SubmitStatus::Ack);
  CHECK(cascade.should_fire(3600));
  auto bulletin = cascade.fire_all();
  CHECK(bulletin.dummy_count == 47);
  REQUIRE(bulletin.real_plaintexts.size() == 3);
  std::vector<std::string> recovered;
  for (const auto& block : bulletin.real_plaintexts) {
    auto parsed = wire::parse_plaintext(block);
    REQUIRE(parsed.has_value());
    recovered.push_back(string_of(parsed->payload));
  }
  std::sort(recovered.begin(), recovered.end());
  CHECK(recovered == payloads);

  HonestCensus census{3, 47};
  CHECK(effective_anonymity(bulletin, census) == 50);
}

TEST_CASE("empty pool fires without error") {
  DeterministicRng rng(39);
  Cascade cascade(crypto::GroupSpec::toy(), 2, MixPolicy{MixPolicyKind::Timed, 10, 0, false}, 1,
                  rng);
  auto bulletin = cascade.fire_all();
  CHECK(bulletin.real_plaintexts.empty());
  CHECK(bulletin.dummy_count == 0);
}

TEST_CASE("firing twice is an error") {
  DeterministicRng rng(40);
  auto tc = make_keys(crypto::GroupSpec::toy(), 1, rng);
  MixServer server(1, tc.keys[0], tc.params, 1, rng.derive("s"));
  server.fire();
  CHECK_THROWS_AS(server.fire(), FiredTwiceError);
}

TEST_CASE("effective anonymity is j + k") {
  BulletinBoard b;
  CHECK(effective_anonymity(b, {3, 47}) == 50);
  CHECK(effective_anonymity(b, {0, 0}) == 0);
}

TEST_CASE("roster file round-trips canonically") {
  Roster roster{{from_hex("00000008"), from_hex("00000010")}};
  Bytes encoded = roster.canonical_encode();
  CHECK(string_of(encoded) == R"({"keys":["00000008","00000010"]})");
  CHECK(Roster::canonical_decode(encoded).keys == roster.keys);
  std::string spaced = R"({"keys": ["00000008","00000010"]})";
  CHECK_THROWS_AS(Roster::canonical_decode(bytes_of(spaced)), wire::NonCanonicalError);
}

TEST_CASE("bulletin export is canonical with sorted plaintext hex") {
  BulletinBoard b;
  b.round = 9;
  b.real_plaintexts = {from_hex("ff00"), from_hex("0a0b")};
  b.dummy_count = 2;
  b.duplicate_count = 1;
  b.drop_count = 0;
  CHECK(string_of(b.canonical_encode()) ==
        R"({"drop_count":0,"dummy_count":2,"duplicate_count":1,"plaintexts":["0a0b","ff00"],"round":9})");
}

TEST_CASE("shuffle uniformity: each message lands in each slot uniformly") {
  // 10 distinct real messages through a 3-hop cascade; positions tallied
  // over 1200 seeded runs, each (message, slot) frequency within 0.1 +/- 0.03.
  const size_t kRuns = 1200;
  const size_t kMessages = 10;
  std::map<std::string, std::vector<size_t>> slot_counts;
  for (size_t run = 0; run < kRuns; run++) {
    DeterministicRng rng(100000 + run);
    Cascade cascade(crypto::GroupSpec::toy(), 3, MixPolicy{MixPolicyKind::Timed, 10, 0, false}, 1,
                    rng);
    for (size_t m = 0; m < kMessages; m++) {
      std::string payload = "msg-" + std::to_string(m);
      cascade.submit(submit_envelope(cascade.params(), 1,
                                     wire::make_plaintext(bytes_of(payload), false), rng));
    }
    auto bulletin = cascade.fire_all();
    REQUIRE(bulletin.real_plaintexts.size() == kMessages);
    for (size_t slot = 0; slot < kMessages; slot++) {
      auto parsed = wire::parse_plaintext(bulletin.real_plaintexts[slot]);
      REQUIRE(parsed.has_value());
      auto& counts = slot_counts[string_of(parsed->payload)];
      counts.resize(kMessages, 0);
      counts[slot]++;
    }
  }
  REQUIRE(slot_counts.size() == kMessages);
  for (const auto& [payload, counts] : slot_counts) {
    for (size_t slot = 0; slot < kMessages; slot++) {
      double freq = static_cast<double>(counts[slot]) / static_cast<double>(kRuns);
      INFO(payload << " slot " << slot << " freq " << freq);
      CHECK(freq > 0.07);
      CHECK(freq < 0.13);
    }
  }
}

TEST_CASE("timed-policy anonymity is monotone under extra submissions") {
  // Adding submissions (honest or adversarial) to a timed round never
  // shrinks the anonymity of those already in the pool.
  DeterministicRng rng(41);
  size_t previous = 0;
  for (size_t extra = 0; extra < 12; extra++) {
    DeterministicRng run_rng(500 + extra);
    Cascade cascade(crypto::GroupSpec::toy(), 2, MixPolicy{MixPolicyKind::Timed, 60, 0, false}, 1,
                    run_rng);
    size_t savvy = 2;
    for (size_t i = 0; i < savvy; i++)
      cascade.submit(submit_envelope(cascade.params(), 1,
                                     wire::make_plaintext(bytes_of("m"), false), run_rng));
    for (size_t i = 0; i < extra; i++)
      cascade.submit(
          submit_envelope(cascade.params(), 1, wire::make_plaintext({}, true), run_rng));
    auto bulletin = cascade.fire_all();
    size_t anonymity = effective_anonymity(bulletin, {savvy, extra});
    CHECK(anonymity >= previous);
    previous = anonymity;
  }
  (void)rng;
}
