#include "doctest.h"

#include "conscript/participants.hpp"

using namespace conscript;
using namespace conscript::participants;

namespace {

struct World {
  const crypto::Group& group = crypto::Group::get(crypto::GroupSpec::toy());
  DeterministicRng rng{71};
  std::vector<crypto::KeyPair> authorities;
  std::vector<Bytes> authority_publics;
  std::vector<crypto::KeyPair> mix_keys;
  std::vector<Bytes> mix_publics;
  DirectoryList directory;
  NetContext ctx;

  explicit World(size_t layers = 3, size_t num_authorities = 3) {
    for (size_t i = 0; i < num_authorities; i++) {
      authorities.push_back(crypto::keygen(group, rng));
      authority_publics.push_back(authorities.back().public_key);
    }
    for (size_t i = 0; i < layers; i++) {
      mix_keys.push_back(crypto::keygen(group, rng));
      mix_publics.push_back(mix_keys.back().public_key);
    }
    directory = publish_directory(group, authorities, mix_publics, rng);
    ctx.system = wire::SystemTag::Mixnet;
    ctx.group = crypto::GroupSpec::toy();
    ctx.round = 1;
    ctx.authority_publics = authority_publics;
  }

  WebServer server(ServingPolicyKind kind, std::vector<std::string> honest_set = {},
                   RatePolicy rates = {1.0, 1.0}, bool adversarial = false) {
    return WebServer("https://web.example", adversarial, ServingPolicy{kind, std::move(honest_set)},
                     rates, ctx.system, ctx.group, mix_publics.size(),
                     rng.derive("probe").bytes(16));
  }

  ClientProfile casual(const std::string& id) {
    ClientProfile p;
    p.id = id;
    return p;
  }

  ClientProfile savvy(const std::string& id, const std::string& payload) {
    ClientProfile p;
    p.id = id;
    p.kind = ClientKind::Savvy;
    p.expected_digest =
        ScriptBundle::make(GeneratorId::HonestMixnet, ctx.system, ctx.group, mix_publics.size(), {})
            .digest;
    p.queued_payload = bytes_of(payload);
    return p;
  }
};

}  // namespace

TEST_CASE("directory: publish and verify with all authorities") {
  World w(5, 3);
  CHECK(w.directory.keys.size() == 5);
  CHECK(w.directory.signatures.size() == 3);
  CHECK(verify_directory(w.directory, w.group, w.authority_publics));

  SUBCASE("one signature stripped fails") {
    DirectoryList stripped = w.directory;
    stripped.signatures.pop_back();
    stripped.authority_publics.pop_back();
    CHECK_FALSE(verify_directory(stripped, w.group, w.authority_publics));
  }
  SUBCASE("reordered keys with old signatures fail") {
    DirectoryList reordered = w.directory;
    std::swap(reordered.keys[0], reordered.keys[1]);
    CHECK_FALSE(verify_directory(reordered, w.group, w.authority_publics));
  }
}

TEST_CASE("serve: policy table picks the bundle") {
  World w;
  SUBCASE("honest policy serves the honest bundle to everyone") {
    auto server = w.server(ServingPolicyKind::Honest);
    for (const char* id : {"a", "b", "target"})
      CHECK(server.serve(id, w.directory, 1, "https://mix.example").bundle.generator ==
            GeneratorId::HonestMixnet);
  }
  SUBCASE("selective policy isolates the honest set") {
    auto server = w.server(ServingPolicyKind::Selective, {"target"});
    CHECK(server.serve("target", w.directory, 1, "m").bundle.generator ==
          GeneratorId::HonestMixnet);
    CHECK(server.serve("other", w.directory, 1, "m").bundle.generator ==
          GeneratorId::MarkedProbe);
  }
  SUBCASE("variant-to-all serves the formatting variant with a distinct digest") {
    auto server = w.server(ServingPolicyKind::VariantToAll);
    auto page = server.serve("a", w.directory, 1, "m");
    CHECK(page.bundle.generator == GeneratorId::FormattingVariant);
    CHECK(page.bundle.digest != server.honest_bundle().digest);
  }
  SUBCASE("adversarial servers log what they served") {
    auto server = w.server(ServingPolicyKind::MalformedToAll, {}, {1.0, 1.0}, true);
    server.serve("a", w.directory, 1, "m");
    REQUIRE(server.log().size() == 1);
    CHECK(server.log()[0].client_id == "a");
    CHECK(server.log()[0].generator == GeneratorId::MarkedProbe);
  }
}

TEST_CASE("cors_submit: allow-all delivers, unlisted origins are blocked") {
  CorsConfig allow_all;
  CHECK(cors_submit(allow_all, {}, "https://web.example") == CorsResult::Delivered);

  CorsConfig restricted{false, {"https://friendly.example"}};
  CHECK(cors_submit(restricted, {}, "https://friendly.example") == CorsResult::Delivered);
  CHECK(cors_submit(restricted, {}, "https://web.example") == CorsResult::Blocked);
}

TEST_CASE("run_visit: savvy swap emits the pregenerated envelope at casual cost") {
  World w;
  auto server = w.server(ServingPolicyKind::Honest);
  auto profile = w.savvy("s0", "leak");
  DefenseToggles toggles;

  DeterministicRng pregen = w.rng.derive("pregen");
  CHECK(pregenerate(profile, w.ctx, w.mix_publics, toggles, pregen) > 0);
  REQUIRE(profile.cache.has_value());
  Bytes cached = profile.cache->envelope;

  auto page = server.serve(profile.id, w.directory, 1, "m");
  DeterministicRng visit_rng = w.rng.derive("visit");
  auto outcome = run_visit(profile, page, w.ctx, toggles, 10, visit_rng);
  REQUIRE(outcome.envelope.has_value());
  CHECK(*outcome.envelope == cached);
  CHECK(outcome.swapped);
  CHECK_FALSE(profile.cache.has_value());

  // a casual visit on the same page costs the same
  auto casual = w.casual("c0");
  DeterministicRng casual_rng = w.rng.derive("visit2");
  auto casual_outcome = run_visit(casual, page, w.ctx, toggles, 10, casual_rng);
  REQUIRE(casual_outcome.envelope.has_value());
  CHECK_FALSE(casual_outcome.swapped);
  CHECK(casual_outcome.cost_units == outcome.cost_units);

  // the real envelope decodes to a real message end to end
  auto env = wire::canonical_decode(*outcome.envelope);
  Bytes layer = env.body;
  for (const auto& key : w.mix_keys) layer = crypto::pke_decrypt_bytes(w.group, key.secret, layer);
  auto parsed = wire::parse_plaintext(layer);
  REQUIRE(parsed.has_value());
  CHECK(parsed->payload == bytes_of("leak"));
}

TEST_CASE("run_visit: digest mismatch turns a savvy user into a casual one") {
  World w;
  auto server = w.server(ServingPolicyKind::MalformedToAll);
  auto profile = w.savvy("s0", "leak");
  DefenseToggles toggles;
  DeterministicRng pregen = w.rng.derive("pregen");
  pregenerate(profile, w.ctx, w.mix_publics, toggles, pregen);

  auto page = server.serve(profile.id, w.directory, 1, "m");
  DeterministicRng visit_rng = w.rng.derive("visit");
  auto outcome = run_visit(profile, page, w.ctx, toggles, 0, visit_rng);
  REQUIRE(outcome.envelope.has_value());
  CHECK_FALSE(outcome.swapped);
  CHECK(profile.cache.has_value());  // real message withheld for the round

  // identical to what the probe predicts for a casual client
  CHECK(*outcome.envelope ==
        predict_probe_output(w.ctx, w.directory.keys, page.bundle.bytes, profile.id));
}

TEST_CASE("run_visit: consent and rate gates suppress emission") {
  World w;
  auto server = w.server(ServingPolicyKind::Honest);
  DefenseToggles toggles;

  auto declined = w.casual("c0");
  declined.consent = false;
  auto page = server.serve(declined.id, w.directory, 1, "m");
  DeterministicRng rng1 = w.rng.derive("v1");
  CHECK_FALSE(run_visit(declined, page, w.ctx, toggles, 0, rng1).envelope.has_value());

  auto zero_rate_server = w.server(ServingPolicyKind::Honest, {}, {0.0, 0.0});
  auto casual = w.casual("c1");
  auto page2 = zero_rate_server.serve(casual.id, w.directory, 1, "m");
  DeterministicRng rng2 = w.rng.derive("v2");
  CHECK_FALSE(run_visit(casual, page2, w.ctx, toggles, 0, rng2).envelope.has_value());
}

TEST_CASE("run_visit: directory that fails verification stops emission") {
  World w;
  auto server = w.server(ServingPolicyKind::Honest);
  auto casual = w.casual("c0");
  DirectoryList tampered = w.directory;
  std::swap(tampered.keys[0], tampered.keys[1]);
  WebServer evil("https://web.example", false, ServingPolicy{ServingPolicyKind::Honest, {}},
                 {1.0, 1.0}, w.ctx.system, w.ctx.group, w.mix_publics.size(),
                 w.rng.derive("p2").bytes(16));
  auto page = evil.serve(casual.id, tampered, 1, "m");
  DeterministicRng rng = w.rng.derive("v");
  CHECK_FALSE(run_visit(casual, page, w.ctx, DefenseToggles{}, 0, rng).envelope.has_value());
  (void)server;
}

TEST_CASE("pregenerate: stale cache is not emitted in a later round") {
  World w;
  auto server = w.server(ServingPolicyKind::Honest);
  auto profile = w.savvy("s0", "leak");
  DefenseToggles toggles;
  DeterministicRng pregen = w.rng.derive("pregen");
  pregenerate(profile, w.ctx, w.mix_publics, toggles, pregen);  // cache for round 1

  NetContext round2 = w.ctx;
  round2.round = 2;
  auto page = server.serve(profile.id, w.directory, 2, "m");
  DeterministicRng visit_rng = w.rng.derive("visit");
  auto outcome = run_visit(profile, page, round2, toggles, 0, visit_rng);
  REQUIRE(outcome.envelope.has_value());
  CHECK_FALSE(outcome.swapped);  // stale-round guard: dummy, not the cached real
  CHECK(wire::canonical_decode(*outcome.envelope).round == 2);
  CHECK(profile.cache.has_value());
  CHECK(profile.cache->round == 1);

  SUBCASE("re-pregeneration for the new round swaps again") {
    DeterministicRng pregen2 = w.rng.derive("pregen2");
    pregenerate(profile, round2, w.mix_publics, toggles, pregen2);
    auto page2 = server.serve(profile.id, w.directory, 2, "m");
    DeterministicRng visit2 = w.rng.derive("visit2");
    auto outcome2 = run_visit(profile, page2, round2, toggles, 0, visit2);
    REQUIRE(outcome2.envelope.has_value());
    CHECK(outcome2.swapped);
  }
}

TEST_CASE("a tampered bundle suppresses the swap for the whole round") {
  World w;
  auto evil = w.server(ServingPolicyKind::MalformedToAll);
  auto honest = w.server(ServingPolicyKind::Honest);
  auto profile = w.savvy("s0", "leak");
  DefenseToggles toggles;
  DeterministicRng pregen = w.rng.derive("pregen");
  pregenerate(profile, w.ctx, w.mix_publics, toggles, pregen);

  // First page of the round is tampered: mismatch recorded, no swap.
  auto evil_page = evil.serve(profile.id, w.directory, 1, "m");
  DeterministicRng r1 = w.rng.derive("v1");
  auto first = run_visit(profile, evil_page, w.ctx, toggles, 0, r1);
  CHECK_FALSE(first.swapped);

  // An honest page later in the same round still gets only a dummy.
  auto honest_page = honest.serve(profile.id, w.directory, 1, "m");
  DeterministicRng r2 = w.rng.derive("v2");
  auto second = run_visit(profile, honest_page, w.ctx, toggles, 10, r2);
  REQUIRE(second.envelope.has_value());
  CHECK_FALSE(second.swapped);
  CHECK(profile.cache.has_value());

  // The next round starts clean.
  NetContext round2 = w.ctx;
  round2.round = 2;
  DeterministicRng pregen2 = w.rng.derive("pregen2");
  pregenerate(profile, round2, w.mix_publics, toggles, pregen2);
  auto page3 = honest.serve(profile.id, w.directory, 2, "m");
  DeterministicRng r3 = w.rng.derive("v3");
  CHECK(run_visit(profile, page3, round2, toggles, 0, r3).swapped);
}

TEST_CASE("pregenerate: empty queue leaves the cache unchanged") {
  World w;
  auto profile = w.savvy("s0", "x");
  profile.queued_payload.reset();
  DeterministicRng pregen = w.rng.derive("pregen");
  CHECK(pregenerate(profile, w.ctx, w.mix_publics, DefenseToggles{}, pregen) == 0);
  CHECK_FALSE(profile.cache.has_value());
}

TEST_CASE("roster_sign: signature verifies and changes the envelope length") {
  World w;
  ClientProfile registered = w.savvy("r0", "leak");
  registered.kind = ClientKind::RegisteredSavvy;
  registered.roster_key = crypto::keygen(w.group, w.rng);

  wire::SubmissionEnvelope env;
  env.system = wire::SystemTag::Mixnet;
  env.round = 1;
  env.body = Bytes(32, 0x11);
  auto signed_env = roster_sign(w.group, registered, env, w.rng);
  REQUIRE(signed_env.signature.has_value());

  Bytes message = wire::canonical_encode(env);
  auto proof = crypto::SchnorrProof::parse(w.group, signed_env.signature->proof, 1);
  CHECK(crypto::schnorr_verify(w.group, signed_env.signature->signer_public, proof, message));

  CHECK(wire::canonical_encode(signed_env).size() > wire::canonical_encode(env).size());

  ClientProfile unregistered = w.savvy("s0", "leak");
  CHECK_THROWS_AS(roster_sign(w.group, unregistered, env, w.rng), UnregisteredCallerError);
}

TEST_CASE("rate conformance: rho = 0.1 over 10,000 visits stays within 3 sigma") {
  World w(1);
  auto server = w.server(ServingPolicyKind::Honest, {}, {0.1, 0.1});
  DefenseToggles toggles;
  size_t emitted = 0;
  auto page = server.serve("c", w.directory, 1, "m");
  DeterministicRng rng(72);
  for (int i = 0; i < 10000; i++) {
    auto casual = w.casual("c");
    DeterministicRng visit_rng = rng.derive("v" + std::to_string(i));
    if (run_visit(casual, page, w.ctx, toggles, 0, visit_rng).envelope.has_value()) emitted++;
  }
  CHECK(emitted >= 910);
  CHECK(emitted <= 1090);
}

TEST_CASE("mobile devices honor their stricter rate") {
  World w(1);
  auto server = w.server(ServingPolicyKind::Honest, {}, {1.0, 0.2});
  DefenseToggles toggles;
  auto page = server.serve("c", w.directory, 1, "m");
  DeterministicRng rng(73);
  size_t mobile_emitted = 0, workstation_emitted = 0;
  for (int i = 0; i < 2000; i++) {
    auto mobile = w.casual("m");
    mobile.device = DeviceClass::Mobile;
    DeterministicRng r1 = rng.derive("m" + std::to_string(i));
    if (run_visit(mobile, page, w.ctx, toggles, 0, r1).envelope.has_value()) mobile_emitted++;
    auto workstation = w.casual("w");
    DeterministicRng r2 = rng.derive("w" + std::to_string(i));
    if (run_visit(workstation, page, w.ctx, toggles, 0, r2).envelope.has_value())
      workstation_emitted++;
  }
  CHECK(workstation_emitted == 2000);
  CHECK(mobile_emitted < 500);
  CHECK(mobile_emitted > 300);
}

TEST_CASE("interception totality: every outcome is generator output or the cached swap") {
  World w;
  DefenseToggles toggles;
  auto kinds = {ServingPolicyKind::Honest, ServingPolicyKind::MalformedToAll,
                ServingPolicyKind::VariantToAll};
  int idx = 0;
  for (auto kind : kinds) {
    auto server = w.server(kind);
    for (bool savvy_user : {false, true}) {
      auto profile = savvy_user ? w.savvy("s", "msg") : w.casual("c");
      Bytes cached;
      if (savvy_user) {
        DeterministicRng pregen = w.rng.derive("pg" + std::to_string(idx));
        pregenerate(profile, w.ctx, w.mix_publics, toggles, pregen);
        cached = profile.cache->envelope;
      }
      auto page = server.serve(profile.id, w.directory, 1, "m");
      DeterministicRng visit_rng = w.rng.derive("t" + std::to_string(idx++));
      DeterministicRng replay_rng = visit_rng;
      auto outcome = run_visit(profile, page, w.ctx, toggles, 0, visit_rng);
      REQUIRE(outcome.envelope.has_value());
      if (outcome.swapped) {
        CHECK(*outcome.envelope == cached);
      } else {
        // exactly the served generator's output under the same randomness
        // (a rate of 1.0 short-circuits the gate without drawing)
        Bytes expected = run_generator(page.bundle.generator, w.ctx, w.directory.keys,
                                       page.bundle.bytes, profile.id, replay_rng);
        CHECK(*outcome.envelope == expected);
      }
    }
  }
}
