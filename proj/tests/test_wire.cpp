#include "doctest.h"

#include "conscript/wire.hpp"

using namespace conscript;
using namespace conscript::wire;

TEST_CASE("dummy plaintext is 256 zero bytes") {
  Bytes block = make_plaintext({}, true);
  CHECK(block.size() == 256);
  for (uint8_t b : block) CHECK(b == 0);
  auto parsed = parse_plaintext(block);
  REQUIRE(parsed.has_value());
  CHECK(parsed->is_dummy);
}

TEST_CASE("real plaintext layout: control, length, payload, padding") {
  Bytes block = make_plaintext(bytes_of("hi"), false);
  REQUIRE(block.size() == 256);
  CHECK(block[0] == 0x01);
  CHECK(block[1] == 0x00);
  CHECK(block[2] == 0x02);
  CHECK(block[3] == 'h');
  CHECK(block[4] == 'i');
  for (size_t i = 5; i < block.size(); i++) CHECK(block[i] == 0);
  auto parsed = parse_plaintext(block);
  REQUIRE(parsed.has_value());
  CHECK_FALSE(parsed->is_dummy);
  CHECK(parsed->payload == bytes_of("hi"));
}

TEST_CASE("payload bounds and dummy constraints") {
  Bytes max_payload(253, 0x7f);
  CHECK(make_plaintext(max_payload, false).size() == 256);
  Bytes too_long(254, 0x7f);
  CHECK_THROWS_AS(make_plaintext(too_long, false), OversizePayloadError);
  CHECK_THROWS_AS(make_plaintext(bytes_of("x"), true), DummyPayloadError);
}

TEST_CASE("malformed plaintext blocks are rejected") {
  Bytes block = make_plaintext(bytes_of("ok"), false);
  Bytes bad_control = block;
  bad_control[0] = 0x02;
  CHECK_FALSE(parse_plaintext(bad_control).has_value());
  Bytes dirty_padding = block;
  dirty_padding[200] = 0x01;
  CHECK_FALSE(parse_plaintext(dirty_padding).has_value());
  Bytes zero_with_junk(256, 0);
  zero_with_junk[10] = 0x01;  // length field says 0x01 at offset... control=0 must be all zero
  zero_with_junk[0] = 0x00;
  CHECK_FALSE(parse_plaintext(zero_with_junk).has_value());
  CHECK_FALSE(parse_plaintext(Bytes(255, 0)).has_value());
}

namespace {

SubmissionEnvelope sample_envelope() {
  SubmissionEnvelope env;
  env.system = SystemTag::Mixnet;
  env.round = 7;
  env.body = from_hex("00112233aabbccdd");
  return env;
}

}  // namespace

TEST_CASE("canonical encoding round-trips and is idempotent") {
  auto env = sample_envelope();
  Bytes encoded = canonical_encode(env);
  CHECK(string_of(encoded) == R"({"body":"00112233aabbccdd","round":7,"sys":"mixnet"})");
  auto decoded = canonical_decode(encoded);
  CHECK(decoded == env);
  CHECK(canonical_encode(decoded) == encoded);
}

TEST_CASE("signed envelopes carry the sig object in sorted position") {
  auto env = sample_envelope();
  env.signature = RosterSignature{"schnorr-v1", from_hex("0a0b"), from_hex("0c0d")};
  Bytes encoded = canonical_encode(env);
  CHECK(string_of(encoded) ==
        R"({"body":"00112233aabbccdd","round":7,"sig":{"key":"0a0b","proof":"0c0d","scheme":"schnorr-v1"},"sys":"mixnet"})");
  CHECK(canonical_decode(encoded) == env);
}

TEST_CASE("non-canonical variants are rejected as such") {
  auto env = sample_envelope();
  std::string canonical = string_of(canonical_encode(env));

  SUBCASE("reordered keys") {
    std::string reordered = R"({"round":7,"body":"00112233aabbccdd","sys":"mixnet"})";
    CHECK_THROWS_AS(canonical_decode(bytes_of(reordered)), NonCanonicalError);
  }
  SUBCASE("uppercase hex digit") {
    std::string upper = canonical;
    auto pos = upper.find("aabb");
    upper[pos] = 'A';
    CHECK_THROWS_AS(canonical_decode(bytes_of(upper)), NonCanonicalError);
  }
  SUBCASE("inserted whitespace") {
    std::string spaced = canonical;
    spaced.insert(spaced.find(":\"0011"), " ");
    CHECK_THROWS_AS(canonical_decode(bytes_of(spaced)), NonCanonicalError);
  }
  SUBCASE("trailing newline") {
    CHECK_THROWS_AS(canonical_decode(bytes_of(canonical + "\n")), NonCanonicalError);
  }
}

TEST_CASE("malformed inputs are a distinct error") {
  CHECK_THROWS_AS(canonical_decode(bytes_of("not json at all")), MalformedEnvelopeError);
  CHECK_THROWS_AS(canonical_decode(bytes_of(R"(["body"])")), MalformedEnvelopeError);
  CHECK_THROWS_AS(canonical_decode(bytes_of(R"({"body":"zz","round":7,"sys":"mixnet"})")),
                  MalformedEnvelopeError);
  CHECK_THROWS_AS(canonical_decode(bytes_of(R"({"body":"00","round":-1,"sys":"mixnet"})")),
                  MalformedEnvelopeError);
  CHECK_THROWS_AS(canonical_decode(bytes_of(R"({"body":"00","round":7,"sys":"tor"})")),
                  MalformedEnvelopeError);
  CHECK_THROWS_AS(canonical_decode(bytes_of(R"({"body":"00","round":7,"sys":"mixnet","x":1})")),
                  MalformedEnvelopeError);
  CHECK_THROWS_AS(canonical_decode(bytes_of(R"({"body":"00","round":7,"sig":null,"sys":"mixnet"})")),
                  MalformedEnvelopeError);
}

TEST_CASE("variant encoding parses but is not canonical") {
  auto env = sample_envelope();
  Bytes variant = variant_encode(env);
  CHECK(variant != canonical_encode(env));
  CHECK_THROWS_AS(canonical_decode(variant), NonCanonicalError);
}

TEST_CASE("envelope body length: 256 + M * c_ov on the toy group") {
  EnvelopeParams params{GroupSpec::toy(), 5};
  CHECK(envelope_length(SystemTag::Mixnet, params) == 256 + 5 * 20);
  EnvelopeParams no_layers{GroupSpec::toy(), 0};
  CHECK_THROWS_AS(envelope_length(SystemTag::Mixnet, no_layers), InvalidParamsError);
}

TEST_CASE("dummy and real envelopes of the same params have equal lengths") {
  EnvelopeParams params{GroupSpec::toy(), 3};
  size_t body_len = envelope_length(SystemTag::Mixnet, params);
  SubmissionEnvelope dummy, real;
  dummy.round = real.round = 12;
  dummy.body = Bytes(body_len, 0x00);
  real.body = Bytes(body_len, 0x5a);
  CHECK(canonical_encode(dummy).size() == canonical_encode(real).size());
}
