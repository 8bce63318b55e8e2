#include "conscript/scenario.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace conscript::sim {

using crypto::Group;
using crypto::KeyPair;
using nlohmann::json;
using participants::ClientKind;
using participants::ClientProfile;
using participants::NetContext;
using participants::WebServer;

std::string ScenarioConfig::payload_for(size_t savvy_index) const {
  if (savvy_index < payloads.size()) return payloads[savvy_index];
  return "leak-" + std::to_string(savvy_index);
}

ConfigValidationError::ConfigValidationError(std::vector<std::string> problems)
    : std::runtime_error(problems.empty() ? "invalid config" : problems.front()),
      problems_(std::move(problems)) {}

namespace {

struct ConfigReader {
  const json& j;
  std::vector<std::string> problems;

  void fail(const std::string& field, const std::string& message) {
    problems.push_back(field + ": " + message);
  }

  bool has(const char* key) const { return j.contains(key); }

  uint64_t uint_field(const char* key, uint64_t fallback, bool required = false) {
    if (!j.contains(key)) {
      if (required) problems.push_back(std::string(key) + ": required");
      return fallback;
    }
    if (!j[key].is_number_unsigned()) {
      problems.push_back(std::string(key) + ": must be a non-negative integer");
      return fallback;
    }
    return j[key].get<uint64_t>();
  }

  double unit_field(const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number() || j[key].get<double>() < 0.0 || j[key].get<double>() > 1.0) {
      problems.push_back(std::string(key) + ": must be a number in [0, 1]");
      return fallback;
    }
    return j[key].get<double>();
  }

  std::string string_field(const char* key, const std::string& fallback, bool required = false) {
    if (!j.contains(key)) {
      if (required) problems.push_back(std::string(key) + ": required");
      return fallback;
    }
    if (!j[key].is_string()) {
      problems.push_back(std::string(key) + ": must be a string");
      return fallback;
    }
    return j[key].get<std::string>();
  }

  bool bool_field(const char* key, bool fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_boolean()) {
      problems.push_back(std::string(key) + ": must be a boolean");
      return fallback;
    }
    return j[key].get<bool>();
  }
};

mixnet::MixPolicy parse_policy(const json& j, std::vector<std::string>& problems) {
  mixnet::MixPolicy policy{mixnet::MixPolicyKind::Timed, 3600, 0, false};
  if (!j.is_object()) {
    problems.push_back("policy: must be an object");
    return policy;
  }
  ConfigReader r{j, {}};
  std::string kind = r.string_field("kind", "timed", true);
  if (kind == "timed")
    policy.kind = mixnet::MixPolicyKind::Timed;
  else if (kind == "threshold")
    policy.kind = mixnet::MixPolicyKind::Threshold;
  else if (kind == "threshold-and-timed")
    policy.kind = mixnet::MixPolicyKind::ThresholdAndTimed;
  else
    r.fail("policy.kind", "must be timed, threshold, or threshold-and-timed");
  policy.fire_after_seconds = r.uint_field("fire_after_seconds", 0);
  policy.min_messages = r.uint_field("min_messages", 0);
  policy.count_only_roster_signed = r.bool_field("count_only_roster_signed", false);
  try {
    policy.validate();
  } catch (const std::invalid_argument& e) {
    r.fail("policy", e.what());
  }
  for (auto& p : r.problems) problems.push_back(std::move(p));
  return policy;
}

std::vector<WebServerConfig> parse_webservers(const json& j,
                                              std::vector<std::string>& problems) {
  std::vector<WebServerConfig> out;
  if (!j.is_array() || j.empty()) {
    problems.push_back("webservers: must be a non-empty array");
    return out;
  }
  for (size_t i = 0; i < j.size(); i++) {
    const std::string path = "webservers[" + std::to_string(i) + "]";
    if (!j[i].is_object()) {
      problems.push_back(path + ": must be an object");
      continue;
    }
    ConfigReader r{j[i], {}};
    WebServerConfig cfg;
    cfg.origin = r.string_field("origin", "https://web-" + std::to_string(i) + ".example");
    cfg.adversarial = r.bool_field("adversarial", false);
    std::string policy = r.string_field("policy", "honest");
    if (policy == "honest")
      cfg.policy = ServingPolicyKind::Honest;
    else if (policy == "malformed-to-all")
      cfg.policy = ServingPolicyKind::MalformedToAll;
    else if (policy == "selective")
      cfg.policy = ServingPolicyKind::Selective;
    else if (policy == "variant-to-all")
      cfg.policy = ServingPolicyKind::VariantToAll;
    else
      r.fail("policy", "unknown serving policy");
    if (j[i].contains("honest_set")) {
      if (!j[i]["honest_set"].is_array())
        r.fail("honest_set", "must be an array of client ids");
      else
        for (const auto& id : j[i]["honest_set"]) {
          if (id.is_string()) cfg.honest_set.push_back(id.get<std::string>());
        }
    }
    if (cfg.policy == ServingPolicyKind::Selective && cfg.honest_set.empty())
      r.fail("honest_set", "selective policy lists exactly who gets the honest bundle");
    if (j[i].contains("casual_visitors")) {
      if (!j[i]["casual_visitors"].is_number_unsigned())
        r.fail("casual_visitors", "must be a non-negative integer");
      else
        cfg.casual_visitors = j[i]["casual_visitors"].get<size_t>();
    }
    for (auto& p : r.problems) problems.push_back(path + "." + std::move(p));
    out.push_back(std::move(cfg));
  }
  return out;
}

adversary::GameConfig parse_game(const json& j, const ScenarioConfig& cfg,
                                 std::vector<std::string>& problems) {
  adversary::GameConfig game;
  game.scenario.group = cfg.group;
  game.scenario.mix_layers = cfg.servers;
  game.scenario.background_casual = cfg.casual;
  game.scenario.round_duration = cfg.round_duration;
  game.scenario.target_payload = cfg.payload_for(0);
  game.toggles = cfg.toggles;
  if (!j.is_object()) {
    problems.push_back("game: must be an object");
    return game;
  }
  ConfigReader r{j, {}};
  game.trials = r.uint_field("trials", 200);
  if (game.trials == 0) r.fail("trials", "must be at least 1");
  std::string name = r.string_field("strategy", "length-classifier", true);
  if (auto s = adversary::strategy_from_name(name))
    game.strategy = *s;
  else
    r.fail("strategy", "unknown adversary strategy");
  if (j.contains("defenses")) {
    const json& d = j["defenses"];
    if (!d.is_object()) {
      r.fail("defenses", "must be an object");
    } else {
      ConfigReader dr{d, {}};
      game.toggles.canonicalization = dr.bool_field("canonicalization", true);
      game.toggles.digest_check = dr.bool_field("digest_check", true);
      game.toggles.pregeneration = dr.bool_field("pregeneration", true);
      game.toggles.multi_server = dr.bool_field("multi_server", true);
      for (auto& p : dr.problems) r.problems.push_back("defenses." + std::move(p));
    }
  }
  for (auto& p : r.problems) problems.push_back("game." + std::move(p));
  return game;
}

}  // namespace

ScenarioConfig validate_config(BytesView raw) {
  json j;
  try {
    j = json::parse(raw.begin(), raw.end());
  } catch (const json::exception& e) {
    throw ConfigValidationError({std::string("config: not valid JSON (") + e.what() + ")"});
  }
  if (!j.is_object()) throw ConfigValidationError({"config: must be a JSON object"});

  static const std::vector<std::string> known = {
      "system",     "group",           "servers",         "policy",
      "savvy",      "casual",          "sybils",          "registered",
      "payloads",   "webservers",      "consent",         "rate",
      "casual_mobile", "authorities",  "round_duration",  "last_server_adversarial",
      "cors",       "seed",            "defenses",        "game",
      "attack"};

  ConfigReader r{j, {}};
  for (const auto& item : j.items()) {
    if (std::find(known.begin(), known.end(), item.key()) == known.end())
      r.fail(item.key(), "unknown field");
  }

  ScenarioConfig cfg;

  std::string system = r.string_field("system", "mixnet", true);
  if (auto tag = wire::system_from_name(system))
    cfg.system = *tag;
  else
    r.fail("system", "must be mixnet or dcnet");

  std::string group = r.string_field("group", "toy-modp", true);
  if (auto spec = crypto::GroupSpec::from_name(group))
    cfg.group = *spec;
  else
    r.fail("group", "must be toy-modp or p256-curve");

  cfg.servers = static_cast<size_t>(r.uint_field("servers", 0, true));
  if (r.has("servers") && cfg.servers == 0) r.fail("servers", "must be at least 1");

  cfg.savvy = static_cast<size_t>(r.uint_field("savvy", 0));
  cfg.casual = static_cast<size_t>(r.uint_field("casual", 0));
  cfg.sybils = static_cast<size_t>(r.uint_field("sybils", 0));
  cfg.registered = static_cast<size_t>(r.uint_field("registered", 0));
  if (cfg.registered > cfg.savvy) r.fail("registered", "registered users are a subset of savvy");
  if (cfg.system == SystemTag::Dcnet && cfg.savvy > 1)
    r.fail("savvy", "dcnet rounds have a single slot owner");

  if (r.has("payloads")) {
    if (!j["payloads"].is_array()) {
      r.fail("payloads", "must be an array of strings");
    } else {
      for (const auto& p : j["payloads"]) {
        if (!p.is_string()) {
          r.fail("payloads", "must be an array of strings");
          break;
        }
        cfg.payloads.push_back(p.get<std::string>());
      }
      if (cfg.payloads.size() > cfg.savvy) r.fail("payloads", "more payloads than savvy users");
    }
  }

  if (r.has("policy"))
    cfg.policy = parse_policy(j["policy"], r.problems);
  else if (cfg.system == SystemTag::Mixnet)
    cfg.policy = mixnet::MixPolicy{mixnet::MixPolicyKind::Timed, cfg.round_duration, 0, false};
  if (cfg.policy.count_only_roster_signed && cfg.registered == 0)
    r.fail("policy.count_only_roster_signed", "requires a roster (registered > 0)");

  if (r.has("webservers"))
    cfg.webservers = parse_webservers(j["webservers"], r.problems);
  else
    cfg.webservers.push_back(WebServerConfig{"https://web.example", false,
                                             ServingPolicyKind::Honest, {}, std::nullopt});

  size_t assigned = 0;
  bool any_assigned = false;
  for (const auto& ws : cfg.webservers)
    if (ws.casual_visitors) {
      any_assigned = true;
      assigned += *ws.casual_visitors;
    }
  if (any_assigned && assigned != cfg.casual)
    r.fail("webservers", "casual_visitors must add up to the casual count");

  if (r.has("consent")) {
    const json& c = j["consent"];
    if (!c.is_object()) {
      r.fail("consent", "must be an object");
    } else {
      ConfigReader cr{c, {}};
      cfg.consent_mode = cr.string_field("mode", "opt-out");
      if (cfg.consent_mode != "opt-in" && cfg.consent_mode != "opt-out")
        cr.fail("mode", "must be opt-in or opt-out");
      cfg.consent_declined = static_cast<size_t>(cr.uint_field("declined", 0));
      for (auto& p : cr.problems) r.problems.push_back("consent." + std::move(p));
    }
  }
  if (cfg.consent_declined > cfg.casual)
    r.fail("consent.declined", "cannot exceed the casual count");

  if (r.has("rate")) {
    const json& rate = j["rate"];
    if (!rate.is_object()) {
      r.fail("rate", "must be an object");
    } else {
      ConfigReader rr{rate, {}};
      cfg.rate.workstation = rr.unit_field("workstation", 1.0);
      cfg.rate.mobile = rr.unit_field("mobile", 1.0);
      for (auto& p : rr.problems) r.problems.push_back("rate." + std::move(p));
    }
  }

  cfg.casual_mobile = static_cast<size_t>(r.uint_field("casual_mobile", 0));
  if (cfg.casual_mobile > cfg.casual) r.fail("casual_mobile", "cannot exceed the casual count");

  cfg.authorities = static_cast<size_t>(r.uint_field("authorities", 3));
  if (r.has("authorities") && cfg.authorities == 0)
    r.fail("authorities", "need at least one directory authority");

  cfg.round_duration = r.uint_field("round_duration", 3600);
  if (cfg.round_duration == 0) r.fail("round_duration", "must be at least 1 second");

  cfg.last_server_adversarial = r.bool_field("last_server_adversarial", false);

  if (r.has("cors")) {
    const json& c = j["cors"];
    if (c.is_string() && c.get<std::string>() == "*") {
      cfg.cors.allow_all = true;
    } else if (c.is_array()) {
      cfg.cors.allow_all = false;
      for (const auto& origin : c)
        if (origin.is_string()) cfg.cors.allowed_origins.push_back(origin.get<std::string>());
    } else {
      r.fail("cors", "must be \"*\" or an array of origins");
    }
  }

  if (!r.has("seed"))
    r.fail("seed", "required");
  else
    cfg.seed = r.uint_field("seed", 0, true);

  if (r.has("defenses")) {
    const json& d = j["defenses"];
    if (!d.is_object()) {
      r.fail("defenses", "must be an object");
    } else {
      ConfigReader dr{d, {}};
      cfg.toggles.canonicalization = dr.bool_field("canonicalization", true);
      cfg.toggles.digest_check = dr.bool_field("digest_check", true);
      cfg.toggles.pregeneration = dr.bool_field("pregeneration", true);
      cfg.toggles.multi_server = dr.bool_field("multi_server", true);
      for (auto& p : dr.problems) r.problems.push_back("defenses." + std::move(p));
    }
  }

  if (r.has("game")) cfg.game = parse_game(j["game"], cfg, r.problems);

  if (r.has("attack")) {
    const json& a = j["attack"];
    if (!a.is_object()) {
      r.fail("attack", "must be an object");
    } else {
      ConfigReader ar{a, {}};
      cfg.attack.multi_server = ar.bool_field("multi_server", false);
      cfg.attack.target_savvy = ar.bool_field("target_savvy", true);
      cfg.attack.sybils = static_cast<size_t>(ar.uint_field("sybils", cfg.sybils));
      for (auto& p : ar.problems) r.problems.push_back("attack." + std::move(p));
    }
  } else {
    cfg.attack.sybils = cfg.sybils;
  }

  if (!r.problems.empty()) throw ConfigValidationError(std::move(r.problems));
  return cfg;
}

Bytes MetricsReport::canonical_encode() const {
  json j;
  if (bulletin) {
    std::vector<std::string> hexes;
    for (const auto& p : bulletin->real_plaintexts) hexes.push_back(to_hex(p));
    std::sort(hexes.begin(), hexes.end());
    j["bulletin"] = json{{"drop_count", bulletin->drop_count},
                         {"dummy_count", bulletin->dummy_count},
                         {"duplicate_count", bulletin->duplicate_count},
                         {"plaintexts", hexes},
                         {"round", bulletin->round}};
  }
  j["counts"] = json{{"blocked", blocked},
                     {"delivered", delivered},
                     {"emitted", emitted},
                     {"rejected", rejected}};
  j["delivered"] = json{{"casual", casual_delivered}, {"savvy", savvy_delivered}};
  j["effective_anonymity"] = effective_anonymity;
  if (last_mix_leak)
    j["last_mix_leak"] = json{{"dummy", last_mix_leak->second}, {"real", last_mix_leak->first}};
  if (reconstruction) {
    json r;
    switch (reconstruction->kind) {
      case dcnet::DcReconstruction::Kind::Empty:
        r["kind"] = "empty";
        break;
      case dcnet::DcReconstruction::Kind::Payload:
        r["kind"] = "payload";
        r["payload"] = to_hex(reconstruction->payload);
        break;
      case dcnet::DcReconstruction::Kind::Garbage:
        r["kind"] = "garbage";
        break;
    }
    j["reconstruction"] = r;
  }
  j["round"] = round;
  j["seed"] = seed;
  j["system"] = std::string(wire::system_name(system));
  return bytes_of(j.dump());
}

namespace {

constexpr char kMixOrigin[] = "https://mix.example";

}  // namespace

MetricsReport run_scenario(const ScenarioConfig& cfg) {
  const Group& group = Group::get(cfg.group);
  const uint64_t round = 1;
  DeterministicRng rng(cfg.seed);

  MetricsReport report;
  report.system = cfg.system;
  report.seed = cfg.seed;
  report.round = round;

  DeterministicRng authority_rng = rng.derive("authorities");
  std::vector<KeyPair> authorities;
  std::vector<Bytes> authority_publics;
  for (size_t i = 0; i < cfg.authorities; i++) {
    authorities.push_back(crypto::keygen(group, authority_rng));
    authority_publics.push_back(authorities.back().public_key);
  }

  // Anonymity-system servers.
  DeterministicRng system_rng = rng.derive("system-servers");
  std::optional<mixnet::Cascade> cascade;
  std::vector<KeyPair> dc_servers;
  std::vector<Bytes> system_keys;
  if (cfg.system == SystemTag::Mixnet) {
    cascade.emplace(cfg.group, cfg.servers, cfg.policy, round, system_rng);
    system_keys = cascade->params().server_public_keys;
  } else {
    for (size_t i = 0; i < cfg.servers; i++) {
      dc_servers.push_back(crypto::keygen(group, system_rng));
      system_keys.push_back(dc_servers.back().public_key);
    }
  }

  auto directory =
      participants::publish_directory(group, authorities, system_keys, authority_rng);

  DeterministicRng owner_rng = rng.derive("slot-owner");
  KeyPair slot_owner = crypto::keygen(group, owner_rng);

  NetContext ctx;
  ctx.system = cfg.system;
  ctx.group = cfg.group;
  ctx.round = round;
  ctx.slot_owner_public = slot_owner.public_key;
  ctx.authority_publics = authority_publics;

  dcnet::DcRoundParams dc_params{cfg.group, system_keys, round, slot_owner.public_key};

  // Web servers.
  DeterministicRng probe_rng = rng.derive("probe-seeds");
  std::vector<WebServer> webservers;
  for (const auto& ws : cfg.webservers) {
    participants::ServingPolicy policy{ws.policy, ws.honest_set};
    webservers.emplace_back(ws.origin, ws.adversarial, policy, cfg.rate, cfg.system, cfg.group,
                            cfg.servers, probe_rng.bytes(16));
  }

  // Profiles.
  Bytes honest_digest =
      participants::ScriptBundle::make(cfg.system == SystemTag::Mixnet
                                           ? participants::GeneratorId::HonestMixnet
                                           : participants::GeneratorId::HonestDcnet,
                                       cfg.system, cfg.group, cfg.servers, {})
          .digest;
  DeterministicRng roster_rng = rng.derive("roster-keys");
  std::vector<ClientProfile> profiles;
  mixnet::Roster roster;
  for (size_t i = 0; i < cfg.savvy; i++) {
    ClientProfile p;
    p.id = "savvy-" + std::to_string(i);
    p.kind = i < cfg.registered ? ClientKind::RegisteredSavvy : ClientKind::Savvy;
    p.expected_digest = honest_digest;
    p.queued_payload = bytes_of(cfg.payload_for(i));
    if (p.kind == ClientKind::RegisteredSavvy) {
      p.roster_key = crypto::keygen(group, roster_rng);
      roster.keys.push_back(p.roster_key->public_key);
    }
    if (cfg.system == SystemTag::Dcnet) p.slot_owner_key = slot_owner;
    profiles.push_back(std::move(p));
  }
  for (size_t i = 0; i < cfg.casual; i++) {
    ClientProfile p;
    p.id = "casual-" + std::to_string(i);
    p.device = i < cfg.casual_mobile ? participants::DeviceClass::Mobile
                                     : participants::DeviceClass::Workstation;
    p.consent = i >= cfg.consent_declined;
    profiles.push_back(std::move(p));
  }
  if (cascade && !roster.keys.empty()) cascade->set_roster(roster);

  // Savvy users prepare their real submissions offline.
  DeterministicRng pregen_rng = rng.derive("pregenerate");
  for (size_t i = 0; i < cfg.savvy; i++)
    participants::pregenerate(profiles[i], ctx, system_keys, cfg.toggles, pregen_rng);

  // Casual home-server assignment; savvy users visit every server when the
  // multi-server defense is on.
  std::vector<size_t> casual_home(cfg.casual, 0);
  {
    size_t next = 0;
    for (size_t s = 0; s < cfg.webservers.size(); s++) {
      if (!cfg.webservers[s].casual_visitors) continue;
      for (size_t n = 0; n < *cfg.webservers[s].casual_visitors && next < cfg.casual; n++)
        casual_home[next++] = s;
    }
  }

  SimClock clock;
  DeterministicRng schedule_rng = rng.derive("schedule");
  for (size_t i = 0; i < profiles.size(); i++) {
    if (i < cfg.savvy && cfg.toggles.multi_server) {
      for (size_t s = 0; s < webservers.size(); s++)
        clock.schedule(schedule_rng.uniform(cfg.round_duration), i, s);
    } else if (i < cfg.savvy) {
      clock.schedule(schedule_rng.uniform(cfg.round_duration), i, 0);
    } else {
      clock.schedule(schedule_rng.uniform(cfg.round_duration), i, casual_home[i - cfg.savvy]);
    }
  }

  // Sybil injections arrive before any honest traffic.
  if (cascade && cfg.sybils > 0) {
    DeterministicRng sybil_rng = rng.derive("sybils");
    for (size_t i = 0; i < cfg.sybils; i++) {
      wire::SubmissionEnvelope env;
      env.system = SystemTag::Mixnet;
      env.round = round;
      env.body = mixnet::onion_encrypt(wire::make_plaintext({}, true), cascade->params(),
                                       sybil_rng);
      cascade->submit(wire::canonical_encode(env));
    }
  }

  std::vector<dcnet::DcClientCiphertext> verified_cts;
  bool fired = false;
  std::optional<mixnet::BulletinBoard> bulletin;

  while (!clock.empty()) {
    SimClock::Event visit = clock.pop();
    ClientProfile& profile = profiles[visit.profile_index];
    WebServer& server = webservers[visit.server_index];
    auto page = server.serve(profile.id, directory, round, kMixOrigin);
    DeterministicRng visit_rng =
        rng.derive("visit/" + profile.id + "/" + std::to_string(visit.sequence));
    auto outcome =
        participants::run_visit(profile, page, ctx, cfg.toggles, visit.time, visit_rng);
    if (!outcome.envelope) continue;
    report.emitted++;

    if (participants::cors_submit(cfg.cors, *outcome.envelope, page.web_origin) ==
        participants::CorsResult::Blocked) {
      report.blocked++;
      continue;
    }

    if (cfg.system == SystemTag::Mixnet) {
      if (fired) {
        report.rejected++;
        continue;
      }
      auto status = cascade->submit(*outcome.envelope);
      if (status != mixnet::SubmitStatus::Ack) {
        report.rejected++;
        continue;
      }
      report.delivered++;
      if (outcome.swapped)
        report.savvy_delivered++;
      else
        report.casual_delivered++;
      if (cascade->should_fire(visit.time)) {
        bulletin = cascade->fire_all();
        fired = true;
      }
    } else {
      bool ok = false;
      try {
        auto env = wire::canonical_decode(*outcome.envelope);
        auto ct = dcnet::DcClientCiphertext::parse(group, env.body);
        if (env.system == SystemTag::Dcnet && env.round == round &&
            dcnet::dc_verify_client(dc_params, ct)) {
          verified_cts.push_back(std::move(ct));
          ok = true;
        }
      } catch (const std::exception&) {
        ok = false;
      }
      if (ok) {
        report.delivered++;
        if (outcome.swapped)
          report.savvy_delivered++;
        else
          report.casual_delivered++;
      } else {
        report.rejected++;
      }
    }
  }

  if (cfg.system == SystemTag::Mixnet) {
    if (!fired && cascade->should_fire(cfg.round_duration)) {
      bulletin = cascade->fire_all();
      fired = true;
    }
    if (fired) {
      report.bulletin = bulletin;
      mixnet::HonestCensus census{report.savvy_delivered, report.casual_delivered};
      report.effective_anonymity = mixnet::effective_anonymity(*bulletin, census);
      if (cfg.last_server_adversarial)
        report.last_mix_leak = {bulletin->real_plaintexts.size(), bulletin->dummy_count};
    }
  } else {
    std::vector<Bytes> commitments;
    for (const auto& ct : verified_cts) commitments.push_back(ct.commitment);
    DeterministicRng share_rng = rng.derive("server-shares");
    std::vector<dcnet::DcServerShare> shares;
    for (size_t s = 0; s < dc_servers.size(); s++)
      shares.push_back(
          dcnet::dc_server_share(group, dc_servers[s], s, commitments, round, share_rng));
    report.reconstruction = dcnet::dc_reconstruct(dc_params, verified_cts, shares);
    report.effective_anonymity = report.savvy_delivered + report.casual_delivered;
  }

  return report;
}

const BenchEntry* BenchReport::find(std::string_view name) const {
  for (const auto& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

Bytes BenchReport::canonical_encode() const {
  json arr = json::array();
  for (const auto& e : entries) {
    arr.push_back(json{{"iterations", e.iterations},
                       {"mean_ms", format_fixed(e.mean_ms, 6)},
                       {"name", e.name},
                       {"stddev_ms", format_fixed(e.stddev_ms, 6)}});
  }
  json j;
  j["entries"] = arr;
  return bytes_of(j.dump());
}

namespace {

template <typename Fn>
BenchEntry bench_workload(const std::string& name, size_t iterations, Fn&& fn) {
  std::vector<double> samples;
  samples.reserve(iterations);
  for (size_t i = 0; i < iterations; i++) {
    auto start = std::chrono::steady_clock::now();
    fn(i);
    auto end = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double, std::milli>(end - start).count());
  }
  double mean = 0.0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double s : samples) var += (s - mean) * (s - mean);
  var /= static_cast<double>(samples.size());
  return BenchEntry{name, iterations, mean, std::sqrt(var)};
}

}  // namespace

BenchReport run_bench(size_t iterations) {
  if (iterations < 100) iterations = 100;
  BenchReport report;

  // Mix-net workload: 256-byte block through five layers on the curve group.
  {
    const Group& group = Group::get(crypto::GroupSpec::p256());
    DeterministicRng rng(1);
    mixnet::MixnetParams params;
    params.group = crypto::GroupSpec::p256();
    for (int i = 0; i < 5; i++)
      params.server_public_keys.push_back(crypto::keygen(group, rng).public_key);
    Bytes dummy = wire::make_plaintext({}, true);
    report.entries.push_back(bench_workload("mixnet-dummy-p256-m5", iterations, [&](size_t) {
      mixnet::onion_encrypt(dummy, params, rng);
    }));
  }

  // DC-net workload: dummy ciphertext plus its proof of well-formedness.
  auto dc_workload = [&](const crypto::GroupSpec& spec, const std::string& name) {
    const Group& group = Group::get(spec);
    DeterministicRng rng(2);
    dcnet::DcRoundParams params;
    params.group = spec;
    params.round = 1;
    params.server_public_keys.push_back(crypto::keygen(group, rng).public_key);
    params.slot_owner_public = crypto::keygen(group, rng).public_key;
    report.entries.push_back(bench_workload(name, iterations, [&](size_t) {
      dcnet::dc_client_submit(params, dcnet::DcClientRole::dummy(), rng);
    }));
  };
  dc_workload(crypto::GroupSpec::p256(), "dcnet-dummy-p256");
  dc_workload(crypto::GroupSpec::toy(), "dcnet-dummy-toy");

  return report;
}

}  // namespace conscript::sim
