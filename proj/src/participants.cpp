#include "conscript/participants.hpp"

#include "json.hpp"

#include <algorithm>

namespace conscript::participants {

using nlohmann::json;

std::string_view generator_name(GeneratorId id) {
  switch (id) {
    case GeneratorId::HonestMixnet:
      return "honest-mixnet";
    case GeneratorId::HonestDcnet:
      return "honest-dcnet";
    case GeneratorId::MarkedProbe:
      return "marked-probe";
    case GeneratorId::FormattingVariant:
      return "formatting-variant";
  }
  return "unknown";
}

ScriptBundle ScriptBundle::make(GeneratorId id, SystemTag system, const GroupSpec& group,
                                size_t mix_layers, BytesView probe_seed) {
  json j;
  j["gen"] = std::string(generator_name(id));
  j["group"] = std::string(group.name());
  j["layers"] = mix_layers;
  j["sys"] = std::string(wire::system_name(system));
  if (id == GeneratorId::MarkedProbe) j["probe"] = to_hex(probe_seed);
  ScriptBundle bundle;
  bundle.generator = id;
  bundle.bytes = bytes_of(j.dump());
  bundle.digest = sha256(bundle.bytes);
  return bundle;
}

Bytes DirectoryList::signed_payload() const {
  std::vector<std::string> hex_keys;
  hex_keys.reserve(keys.size());
  for (const auto& k : keys) hex_keys.push_back(to_hex(k));
  json j;
  j["group"] = group_name;
  j["keys"] = hex_keys;
  return bytes_of(j.dump());
}

Bytes DirectoryList::canonical_encode() const {
  std::vector<std::string> hex_keys, hex_auth, hex_sigs;
  for (const auto& k : keys) hex_keys.push_back(to_hex(k));
  for (const auto& a : authority_publics) hex_auth.push_back(to_hex(a));
  for (const auto& s : signatures) hex_sigs.push_back(to_hex(s));
  json j;
  j["authorities"] = hex_auth;
  j["group"] = group_name;
  j["keys"] = hex_keys;
  j["sigs"] = hex_sigs;
  return bytes_of(j.dump());
}

DirectoryList publish_directory(const Group& group, const std::vector<KeyPair>& authorities,
                                const std::vector<Bytes>& server_keys, DeterministicRng& rng) {
  if (authorities.empty()) throw std::invalid_argument("need at least one directory authority");
  DirectoryList list;
  list.group_name = std::string(group.spec().name());
  list.keys = server_keys;
  Bytes payload = list.signed_payload();
  for (const auto& authority : authorities) {
    list.authority_publics.push_back(authority.public_key);
    auto proof = crypto::schnorr_prove(group, authority.secret, authority.public_key, payload, rng);
    list.signatures.push_back(proof.serialize());
  }
  return list;
}

bool verify_directory(const DirectoryList& list, const Group& group,
                      const std::vector<Bytes>& trusted_authorities) {
  if (list.authority_publics.size() != trusted_authorities.size()) return false;
  if (list.signatures.size() != list.authority_publics.size()) return false;
  if (list.group_name != group.spec().name()) return false;
  Bytes payload = list.signed_payload();
  for (size_t i = 0; i < trusted_authorities.size(); i++) {
    if (!bytes_equal(list.authority_publics[i], trusted_authorities[i])) return false;
    crypto::SchnorrProof proof;
    try {
      proof = crypto::SchnorrProof::parse(group, list.signatures[i], 1);
    } catch (const std::invalid_argument&) {
      return false;
    }
    if (!crypto::schnorr_verify(group, trusted_authorities[i], proof, payload)) return false;
  }
  return true;
}

WebServer::WebServer(std::string origin, bool adversarial, ServingPolicy policy, RatePolicy rates,
                     SystemTag system, const GroupSpec& group, size_t mix_layers,
                     Bytes probe_seed)
    : origin_(std::move(origin)),
      adversarial_(adversarial),
      policy_(std::move(policy)),
      rates_(rates),
      probe_seed_(std::move(probe_seed)) {
  GeneratorId honest_id =
      system == SystemTag::Mixnet ? GeneratorId::HonestMixnet : GeneratorId::HonestDcnet;
  honest_ = ScriptBundle::make(honest_id, system, group, mix_layers, {});
  probe_ = ScriptBundle::make(GeneratorId::MarkedProbe, system, group, mix_layers, probe_seed_);
  variant_ = ScriptBundle::make(GeneratorId::FormattingVariant, system, group, mix_layers, {});
}

PageResponse WebServer::serve(const std::string& client_id, const DirectoryList& directory,
                              uint64_t round, const std::string& mix_origin) {
  const ScriptBundle* bundle = &honest_;
  switch (policy_.kind) {
    case ServingPolicyKind::Honest:
      break;
    case ServingPolicyKind::MalformedToAll:
      bundle = &probe_;
      break;
    case ServingPolicyKind::Selective:
      if (std::find(policy_.honest_set.begin(), policy_.honest_set.end(), client_id) ==
          policy_.honest_set.end())
        bundle = &probe_;
      break;
    case ServingPolicyKind::VariantToAll:
      bundle = &variant_;
      break;
  }
  if (adversarial_) log_.push_back(ServeRecord{client_id, bundle->generator, bundle->digest});
  return PageResponse{*bundle, directory, round, rates_, origin_, mix_origin};
}

uint64_t dummy_generation_cost(SystemTag system, size_t mix_layers) {
  // Two exponentiations per onion layer; a DC-net submission costs the
  // commitment, the pad, and the four exponentiations of the OR proof.
  return system == SystemTag::Mixnet ? 2 * mix_layers : 6;
}

namespace {

Bytes encode_dummy_envelope(const NetContext& ctx, const std::vector<Bytes>& server_keys,
                            DeterministicRng& rng, bool canonical) {
  wire::SubmissionEnvelope env;
  env.system = ctx.system;
  env.round = ctx.round;
  if (ctx.system == SystemTag::Mixnet) {
    mixnet::MixnetParams params{ctx.group, server_keys};
    env.body = mixnet::onion_encrypt(wire::make_plaintext({}, true), params, rng);
  } else {
    dcnet::DcRoundParams params{ctx.group, server_keys, ctx.round, ctx.slot_owner_public};
    auto ct = dcnet::dc_client_submit(params, dcnet::DcClientRole::dummy(), rng);
    env.body = ct.serialize(crypto::Group::get(ctx.group));
  }
  return canonical ? wire::canonical_encode(env) : wire::variant_encode(env);
}

// The probe script's "randomness" is a pure function of the bundle bytes
// (which embed the server-chosen seed), the client, and the round — so the
// serving adversary reproduces the output byte for byte.
DeterministicRng probe_rng(BytesView bundle_bytes, const std::string& client_id, uint64_t round) {
  Bytes material(bundle_bytes.begin(), bundle_bytes.end());
  append(material, bytes_of(client_id));
  append_u64_be(material, round);
  return DeterministicRng(BytesView(material));
}

}  // namespace

Bytes run_generator(GeneratorId id, const NetContext& ctx, const std::vector<Bytes>& server_keys,
                    BytesView bundle_bytes, const std::string& client_id, DeterministicRng& rng) {
  switch (id) {
    case GeneratorId::HonestMixnet:
    case GeneratorId::HonestDcnet:
      return encode_dummy_envelope(ctx, server_keys, rng, true);
    case GeneratorId::FormattingVariant:
      return encode_dummy_envelope(ctx, server_keys, rng, false);
    case GeneratorId::MarkedProbe: {
      DeterministicRng seeded = probe_rng(bundle_bytes, client_id, ctx.round);
      return encode_dummy_envelope(ctx, server_keys, seeded, true);
    }
  }
  throw std::logic_error("unknown generator");
}

Bytes predict_probe_output(const NetContext& ctx, const std::vector<Bytes>& server_keys,
                           BytesView probe_bundle_bytes, const std::string& client_id) {
  DeterministicRng seeded = probe_rng(probe_bundle_bytes, client_id, ctx.round);
  return encode_dummy_envelope(ctx, server_keys, seeded, true);
}

namespace {

Bytes build_real_envelope(const ClientProfile& profile, const NetContext& ctx,
                          const std::vector<Bytes>& server_keys, const DefenseToggles& toggles,
                          DeterministicRng& rng) {
  const Group& group = Group::get(ctx.group);
  wire::SubmissionEnvelope env;
  env.system = ctx.system;
  env.round = ctx.round;
  if (ctx.system == SystemTag::Mixnet) {
    mixnet::MixnetParams params{ctx.group, server_keys};
    env.body = mixnet::onion_encrypt(wire::make_plaintext(*profile.queued_payload, false),
                                     params, rng);
  } else {
    if (!profile.slot_owner_key) throw std::logic_error("dcnet owner needs a slot key");
    dcnet::DcRoundParams params{ctx.group, server_keys, ctx.round, ctx.slot_owner_public};
    auto ct = dcnet::dc_client_submit(
        params,
        dcnet::DcClientRole::owner(*profile.queued_payload, profile.slot_owner_key->secret), rng);
    env.body = ct.serialize(group);
  }
  if (profile.kind == ClientKind::RegisteredSavvy && profile.roster_key)
    env = roster_sign(group, profile, std::move(env), rng);
  return toggles.canonicalization ? wire::canonical_encode(env) : wire::variant_encode(env);
}

}  // namespace

VisitOutcome run_visit(ClientProfile& profile, const PageResponse& page, const NetContext& ctx,
                       const DefenseToggles& toggles, uint64_t clock, DeterministicRng& rng) {
  VisitOutcome outcome;
  outcome.visit_time = clock;
  outcome.bundle_digest = page.bundle.digest;

  if (!profile.consent) return outcome;
  if (!rng.coin(page.rates.for_device(profile.device))) return outcome;
  const Group& group = Group::get(ctx.group);
  if (!verify_directory(page.directory, group, ctx.authority_publics)) return outcome;

  uint64_t dummy_cost =
      dummy_generation_cost(ctx.system, page.directory.keys.size());

  bool digest_ok = !toggles.digest_check ||
                   (profile.expected_digest &&
                    bytes_equal(*profile.expected_digest, page.bundle.digest));
  if (profile.is_savvy() && toggles.digest_check && !digest_ok)
    profile.suppressed_round = page.round;
  bool suppressed = profile.suppressed_round && *profile.suppressed_round == page.round;

  if (profile.is_savvy() && digest_ok && !suppressed) {
    if (toggles.pregeneration) {
      if (profile.cache && profile.cache->round == page.round) {
        // Swap: the script's dummy is generated and thrown away, so the
        // visit costs exactly what a casual visit costs.
        outcome.envelope = profile.cache->envelope;
        outcome.cost_units = dummy_cost;
        outcome.swapped = true;
        profile.cache.reset();
        profile.queued_payload.reset();
        return outcome;
      }
    } else if (profile.queued_payload) {
      outcome.envelope = build_real_envelope(profile, ctx, page.directory.keys, toggles, rng);
      outcome.cost_units = 2 * dummy_cost;  // dummy generated, then the real message
      outcome.swapped = true;
      profile.queued_payload.reset();
      profile.cache.reset();
      return outcome;
    }
  }

  outcome.envelope = run_generator(page.bundle.generator, ctx, page.directory.keys,
                                   page.bundle.bytes, profile.id, rng);
  outcome.cost_units = dummy_cost;
  return outcome;
}

uint64_t pregenerate(ClientProfile& profile, const NetContext& ctx,
                     const std::vector<Bytes>& server_keys, const DefenseToggles& toggles,
                     DeterministicRng& rng) {
  if (!profile.is_savvy() || !profile.queued_payload) return 0;
  profile.cache = CachedEnvelope{ctx.round,
                                 build_real_envelope(profile, ctx, server_keys, toggles, rng)};
  return dummy_generation_cost(ctx.system, server_keys.size());
}

wire::SubmissionEnvelope roster_sign(const Group& group, const ClientProfile& profile,
                                     wire::SubmissionEnvelope envelope, DeterministicRng& rng) {
  if (!profile.roster_key) throw UnregisteredCallerError("profile has no roster keypair");
  wire::SubmissionEnvelope unsigned_env = envelope;
  unsigned_env.signature.reset();
  Bytes message = wire::canonical_encode(unsigned_env);
  auto proof = crypto::schnorr_prove(group, profile.roster_key->secret,
                                     profile.roster_key->public_key, message, rng);
  envelope.signature = wire::RosterSignature{"schnorr-v1", profile.roster_key->public_key,
                                             proof.serialize()};
  return envelope;
}

CorsResult cors_submit(const CorsConfig& config, BytesView envelope,
                       const std::string& requesting_origin) {
  (void)envelope;
  if (config.allow_all) return CorsResult::Delivered;
  for (const auto& origin : config.allowed_origins)
    if (origin == requesting_origin) return CorsResult::Delivered;
  return CorsResult::Blocked;
}

}  // namespace conscript::participants
