#include "conscript/adversary.hpp"

#include "conscript/simclock.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>

namespace conscript::adversary {

using nlohmann::json;
using participants::ClientKind;
using participants::ClientProfile;
using participants::NetContext;
using participants::PageResponse;
using participants::ServingPolicy;
using participants::ServingPolicyKind;
using participants::WebServer;
using wire::SystemTag;

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::LengthClassifier:
      return "length-classifier";
    case Strategy::FormatFingerprinter:
      return "format-fingerprinter";
    case Strategy::TimingObserver:
      return "timing-observer";
    case Strategy::BundleProber:
      return "bundle-prober";
  }
  return "unknown";
}

std::optional<Strategy> strategy_from_name(std::string_view name) {
  if (name == "length-classifier") return Strategy::LengthClassifier;
  if (name == "format-fingerprinter") return Strategy::FormatFingerprinter;
  if (name == "timing-observer") return Strategy::TimingObserver;
  if (name == "bundle-prober") return Strategy::BundleProber;
  return std::nullopt;
}

namespace {

json toggles_json(const DefenseToggles& t) {
  return json{{"canonicalization", t.canonicalization},
              {"digest_check", t.digest_check},
              {"multi_server", t.multi_server},
              {"pregeneration", t.pregeneration}};
}

constexpr char kMixOrigin[] = "https://mix.example";

// One full round of the small game world. Which web servers exist and what
// they serve depends on the strategy under test; everything else is the
// ordinary participant pipeline.
struct TrialWorld {
  std::string target_id = "target";
  std::vector<WireRecord> wire;
  std::vector<ServingRecord> serving_log;
  bool have_serving_log = false;
  mixnet::BulletinBoard bulletin;
  size_t honest_envelope_len = 0;
  uint64_t casual_cost = 0;
};

TrialWorld run_trial(Strategy strategy, const GameScenario& scenario,
                     const DefenseToggles& toggles, bool target_savvy, uint64_t round,
                     DeterministicRng rng) {
  const crypto::Group& group = crypto::Group::get(scenario.group);

  DeterministicRng keys_rng = rng.derive("mix-keys");
  mixnet::MixPolicy policy{mixnet::MixPolicyKind::Timed, scenario.round_duration, 0, false};
  mixnet::Cascade cascade(scenario.group, scenario.mix_layers, policy, round, keys_rng);

  DeterministicRng authority_rng = rng.derive("authorities");
  std::vector<crypto::KeyPair> authorities;
  for (int i = 0; i < 2; i++) authorities.push_back(crypto::keygen(group, authority_rng));
  std::vector<Bytes> authority_publics;
  for (const auto& a : authorities) authority_publics.push_back(a.public_key);
  auto directory = participants::publish_directory(
      group, authorities, cascade.params().server_public_keys, authority_rng);

  NetContext ctx;
  ctx.system = SystemTag::Mixnet;
  ctx.group = scenario.group;
  ctx.round = round;
  ctx.authority_publics = authority_publics;

  // The serving arrangement is the strategy's attack surface.
  participants::RatePolicy full_rate{1.0, 1.0};
  std::vector<WebServer> servers;
  const std::string target_id = "target";
  Bytes probe_seed = rng.derive("probe-seed").bytes(16);
  switch (strategy) {
    case Strategy::FormatFingerprinter:
    case Strategy::TimingObserver:
      servers.emplace_back("https://web.example", false, ServingPolicy{ServingPolicyKind::Honest, {}},
                           full_rate, ctx.system, ctx.group, scenario.mix_layers, probe_seed);
      break;
    case Strategy::BundleProber: {
      // Marked probe to the target, honest bundle to everyone else.
      ServingPolicy policy_sel{ServingPolicyKind::Selective, {}};
      for (size_t i = 0; i < scenario.background_casual; i++)
        policy_sel.honest_set.push_back("casual-" + std::to_string(i));
      servers.emplace_back("https://adv.example", true, policy_sel, full_rate, ctx.system,
                           ctx.group, scenario.mix_layers, probe_seed);
      break;
    }
    case Strategy::LengthClassifier: {
      // Trickle isolation: honest bundle only to the target.
      ServingPolicy policy_sel{ServingPolicyKind::Selective, {target_id}};
      servers.emplace_back("https://adv.example", true, policy_sel, full_rate, ctx.system,
                           ctx.group, scenario.mix_layers, probe_seed);
      if (toggles.multi_server)
        servers.emplace_back("https://honest.example", false,
                             ServingPolicy{ServingPolicyKind::Honest, {}}, full_rate, ctx.system,
                             ctx.group, scenario.mix_layers, probe_seed);
      break;
    }
  }

  // Profiles: the target plus the honest casual crowd.
  std::vector<ClientProfile> profiles;
  ClientProfile target;
  target.id = target_id;
  target.kind = target_savvy ? ClientKind::Savvy : ClientKind::Casual;
  if (target_savvy) {
    target.expected_digest = servers[0].honest_bundle().digest;
    target.queued_payload = bytes_of(scenario.target_payload);
  }
  profiles.push_back(std::move(target));
  for (size_t i = 0; i < scenario.background_casual; i++) {
    ClientProfile p;
    p.id = "casual-" + std::to_string(i);
    profiles.push_back(std::move(p));
  }

  DeterministicRng pregen_rng = rng.derive("pregenerate");
  if (target_savvy)
    participants::pregenerate(profiles[0], ctx, directory.keys, toggles, pregen_rng);

  // Who visits where: the target visits every server; the crowd visits one.
  // Background clients attach to the honest server when one exists so the
  // multi-server defense actually has casual traffic to offer.
  sim::SimClock clock;
  DeterministicRng schedule_rng = rng.derive("schedule");
  size_t crowd_server = servers.size() > 1 ? 1 : 0;
  for (size_t s = 0; s < servers.size(); s++)
    clock.schedule(schedule_rng.uniform(scenario.round_duration), 0, s);
  for (size_t i = 1; i < profiles.size(); i++)
    clock.schedule(schedule_rng.uniform(scenario.round_duration), i, crowd_server);

  TrialWorld world;
  world.target_id = target_id;
  world.casual_cost = participants::dummy_generation_cost(ctx.system, scenario.mix_layers);
  {
    wire::SubmissionEnvelope probe_env;
    probe_env.system = ctx.system;
    probe_env.round = round;
    probe_env.body = Bytes(wire::envelope_length(ctx.system,
                                                 {ctx.group, scenario.mix_layers}),
                           0);
    world.honest_envelope_len = wire::canonical_encode(probe_env).size();
  }

  participants::CorsConfig cors;  // allow-all
  while (!clock.empty()) {
    sim::SimClock::Event visit = clock.pop();
    ClientProfile& profile = profiles[visit.profile_index];
    WebServer& server = servers[visit.server_index];
    PageResponse page = server.serve(profile.id, directory, round, kMixOrigin);
    DeterministicRng visit_rng =
        rng.derive("visit/" + profile.id + "/" + std::to_string(visit.sequence));
    auto outcome = participants::run_visit(profile, page, ctx, toggles, visit.time, visit_rng);
    if (!outcome.envelope) continue;
    world.wire.push_back(WireRecord{profile.id, round, visit.time,
                                    visit.time + outcome.cost_units, *outcome.envelope});
    if (participants::cors_submit(cors, *outcome.envelope, page.web_origin) ==
        participants::CorsResult::Delivered)
      cascade.submit(*outcome.envelope);
  }

  world.bulletin = cascade.fire_all();

  for (const auto& server : servers) {
    if (!server.adversarial()) continue;
    world.have_serving_log = true;
    for (const auto& record : server.log()) {
      ServingRecord out{record.client_id, record.generator, {}};
      if (record.generator == participants::GeneratorId::MarkedProbe)
        out.predicted_output = participants::predict_probe_output(
            ctx, directory.keys, server.probe_bundle().bytes, record.client_id);
      world.serving_log.push_back(std::move(out));
    }
  }
  return world;
}

AdversaryView view_of(const TrialWorld& world) {
  AdversaryView view;
  view.wire = world.wire;
  if (world.have_serving_log) view.serving_log = world.serving_log;
  view.public_bulletin_reals = world.bulletin.real_plaintexts;
  return view;
}

bool predicted_probe_bytes(const AdversaryView& view, const WireRecord& record) {
  if (!view.serving_log) return false;
  for (const auto& s : *view.serving_log)
    if (s.client_id == record.client_id && !s.predicted_output.empty() &&
        bytes_equal(s.predicted_output, record.bytes))
      return true;
  return false;
}

// Guess functions: true = "target is savvy". Each one is deterministic and
// answers "casual" when its channel shows nothing, so a defended deployment
// yields advantage exactly zero rather than coin-flip noise.
bool guess_length_classifier(const AdversaryView& view, const std::string& target_id,
                             size_t honest_len) {
  std::vector<const WireRecord*> candidates;
  for (const auto& r : view.wire) {
    if (r.bytes.size() != honest_len) continue;
    if (predicted_probe_bytes(view, r)) continue;
    candidates.push_back(&r);
  }
  if (candidates.size() != 1 || candidates[0]->client_id != target_id) return false;
  return !view.public_bulletin_reals.empty();
}

bool guess_format_fingerprinter(const AdversaryView& view, const std::string& target_id) {
  for (const auto& r : view.wire) {
    if (r.client_id != target_id) continue;
    try {
      wire::canonical_decode(r.bytes);
    } catch (const std::runtime_error&) {
      return true;
    }
  }
  return false;
}

bool guess_timing_observer(const AdversaryView& view, const std::string& target_id,
                           uint64_t casual_cost) {
  for (const auto& r : view.wire)
    if (r.client_id == target_id && r.submit_time - r.visit_time > casual_cost) return true;
  return false;
}

bool guess_bundle_prober(const AdversaryView& view, const std::string& target_id) {
  if (!view.serving_log) return false;
  for (const auto& s : *view.serving_log) {
    if (s.client_id != target_id || s.predicted_output.empty()) continue;
    for (const auto& r : view.wire)
      if (r.client_id == target_id && !bytes_equal(r.bytes, s.predicted_output)) return true;
  }
  return false;
}

bool run_strategy(Strategy strategy, const TrialWorld& world) {
  AdversaryView view = view_of(world);
  switch (strategy) {
    case Strategy::LengthClassifier:
      return guess_length_classifier(view, world.target_id, world.honest_envelope_len);
    case Strategy::FormatFingerprinter:
      return guess_format_fingerprinter(view, world.target_id);
    case Strategy::TimingObserver:
      return guess_timing_observer(view, world.target_id, world.casual_cost);
    case Strategy::BundleProber:
      return guess_bundle_prober(view, world.target_id);
  }
  return false;
}

}  // namespace

Bytes GameResult::canonical_encode() const {
  json j;
  j["advantage"] = format_fixed(advantage, 6);
  j["confidence_half_width"] = format_fixed(confidence_half_width, 6);
  j["correct"] = correct;
  j["strategy"] = std::string(strategy_name(strategy));
  j["toggles"] = toggles_json(toggles);
  j["trials"] = trials;
  return bytes_of(j.dump());
}

GameResult run_distinguishing_game(const GameConfig& config, DeterministicRng& rng) {
  if (config.trials == 0) throw std::invalid_argument("game needs at least one trial");

  // Balanced challenge bits: exactly half the trials have a savvy target,
  // in an rng-shuffled order the adversary cannot know.
  std::vector<bool> challenge(config.trials, false);
  for (size_t i = 0; i < config.trials / 2; i++) challenge[i] = true;
  DeterministicRng deck_rng = rng.derive("challenge-deck");
  for (size_t i = challenge.size(); i > 1; i--) {
    size_t j = static_cast<size_t>(deck_rng.uniform(i));
    std::swap(challenge[i - 1], challenge[j]);
  }

  GameResult result;
  result.strategy = config.strategy;
  result.toggles = config.toggles;
  result.trials = config.trials;
  for (size_t trial = 0; trial < config.trials; trial++) {
    bool b = challenge[trial];
    TrialWorld world = run_trial(config.strategy, config.scenario, config.toggles, b, trial + 1,
                                 rng.derive("trial/" + std::to_string(trial)));
    bool guess = run_strategy(config.strategy, world);
    if (guess == b) result.correct++;
  }
  double p = static_cast<double>(result.correct) / static_cast<double>(result.trials);
  result.advantage = std::abs(2.0 * p - 1.0);
  result.confidence_half_width =
      2.0 * 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(result.trials));
  return result;
}

Bytes SelectiveDosOutcome::canonical_encode() const {
  json j;
  if (exposed_payload) j["exposed_payload"] = to_hex(*exposed_payload);
  j["identified"] = identified;
  j["multi_server"] = multi_server;
  return bytes_of(j.dump());
}

SelectiveDosOutcome run_selective_dos(const SelectiveDosConfig& config, bool multi_server,
                                      DeterministicRng& rng) {
  DefenseToggles toggles;
  toggles.multi_server = multi_server;
  TrialWorld world = run_trial(Strategy::LengthClassifier, config.scenario, toggles,
                               config.target_savvy, 1, rng.derive("selective-dos"));
  SelectiveDosOutcome outcome;
  outcome.multi_server = multi_server;
  outcome.identified =
      guess_length_classifier(view_of(world), world.target_id, world.honest_envelope_len);
  if (outcome.identified && world.bulletin.real_plaintexts.size() == 1) {
    auto parsed = wire::parse_plaintext(world.bulletin.real_plaintexts[0]);
    if (parsed && !parsed->is_dummy) outcome.exposed_payload = parsed->payload;
  }
  return outcome;
}

Bytes FloodReport::canonical_encode() const {
  std::string policy_name = policy == mixnet::MixPolicyKind::Threshold
                                ? "threshold"
                                : (policy == mixnet::MixPolicyKind::Timed ? "timed"
                                                                          : "threshold-and-timed");
  json j;
  j["fired"] = fired;
  j["honest_anonymity"] = honest_anonymity;
  j["policy"] = policy_name;
  j["pool_total"] = pool_total;
  j["signed_count"] = signed_count;
  j["sybils"] = sybils;
  return bytes_of(j.dump());
}

FloodReport run_flood_attack(const mixnet::MixPolicy& policy, size_t sybil_count,
                             const FloodPopulation& population, const crypto::GroupSpec& group_spec,
                             DeterministicRng& rng) {
  policy.validate();
  const crypto::Group& group = crypto::Group::get(group_spec);
  const uint64_t round = 1;

  DeterministicRng keys_rng = rng.derive("mix-keys");
  mixnet::Cascade cascade(group_spec, 2, policy, round, keys_rng);
  const auto& params = cascade.params();

  // Honest profiles; the first `registered` savvy users hold roster keys.
  DeterministicRng roster_rng = rng.derive("roster");
  std::vector<ClientProfile> honest;
  mixnet::Roster roster;
  for (size_t i = 0; i < population.honest_savvy; i++) {
    ClientProfile p;
    p.id = "savvy-" + std::to_string(i);
    p.kind = i < population.registered ? ClientKind::RegisteredSavvy : ClientKind::Savvy;
    p.queued_payload = bytes_of("flood-payload-" + std::to_string(i));
    if (p.kind == ClientKind::RegisteredSavvy) {
      p.roster_key = crypto::keygen(group, roster_rng);
      roster.keys.push_back(p.roster_key->public_key);
    }
    honest.push_back(std::move(p));
  }
  for (size_t i = 0; i < population.honest_casual; i++) {
    ClientProfile p;
    p.id = "casual-" + std::to_string(i);
    honest.push_back(std::move(p));
  }
  if (!roster.keys.empty()) cascade.set_roster(std::move(roster));

  auto make_envelope = [&](const ClientProfile& p, DeterministicRng& r) {
    wire::SubmissionEnvelope env;
    env.system = SystemTag::Mixnet;
    env.round = round;
    Bytes plaintext = p.queued_payload ? wire::make_plaintext(*p.queued_payload, false)
                                       : wire::make_plaintext({}, true);
    env.body = mixnet::onion_encrypt(plaintext, params, r);
    if (p.kind == ClientKind::RegisteredSavvy) env = participants::roster_sign(group, p, env, r);
    return wire::canonical_encode(env);
  };

  FloodReport report;
  report.policy = policy.kind;
  report.sybils = sybil_count;

  size_t honest_in_pool = 0;
  bool fired = false;
  uint64_t clock = 0;

  auto maybe_fire = [&]() {
    if (!fired && cascade.should_fire(clock)) fired = true;
  };

  // The flood: sybil dummies hit the pool before any honest traffic.
  DeterministicRng sybil_rng = rng.derive("sybils");
  for (size_t i = 0; i < sybil_count && !fired; i++) {
    wire::SubmissionEnvelope env;
    env.system = SystemTag::Mixnet;
    env.round = round;
    env.body = mixnet::onion_encrypt(wire::make_plaintext({}, true), params, sybil_rng);
    cascade.submit(wire::canonical_encode(env));
    maybe_fire();
  }

  DeterministicRng honest_rng = rng.derive("honest");
  for (const auto& p : honest) {
    if (fired) break;
    if (cascade.submit(make_envelope(p, honest_rng)) == mixnet::SubmitStatus::Ack)
      honest_in_pool++;
    maybe_fire();
  }

  // Timed component: everyone has submitted; let the clock pass T.
  clock = std::max<uint64_t>(policy.fire_after_seconds, 1);
  maybe_fire();

  report.fired = fired;
  report.pool_total = cascade.stats().total;
  report.signed_count = cascade.stats().signed_count;
  report.honest_anonymity = fired ? honest_in_pool : 0;
  if (fired) cascade.fire_all();
  return report;
}

std::pair<size_t, size_t> dummy_count_leak(const AdversaryView& view) {
  if (!view.last_mix_counts)
    throw UnavailableError("dummy counts require an adversarial last mix server");
  return *view.last_mix_counts;
}

}  // namespace conscript::adversary
