#pragma once

#include "conscript/adversary.hpp"
#include "conscript/simclock.hpp"

namespace conscript::sim {

using participants::CorsConfig;
using participants::RatePolicy;
using participants::ServingPolicyKind;
using wire::SystemTag;

struct WebServerConfig {
  std::string origin;
  bool adversarial = false;
  ServingPolicyKind policy = ServingPolicyKind::Honest;
  std::vector<std::string> honest_set;
  std::optional<size_t> casual_visitors;
};

struct AttackConfig {
  bool multi_server = false;
  bool target_savvy = true;
  size_t sybils = 0;
};

// Declarative experiment description. Everything a run touches — counts,
// policies, trust flags, the seed — lives here so runs are reproducible.
struct ScenarioConfig {
  SystemTag system = SystemTag::Mixnet;
  crypto::GroupSpec group = crypto::GroupSpec::toy();
  size_t servers = 1;
  mixnet::MixPolicy policy{mixnet::MixPolicyKind::Timed, 3600, 0, false};
  size_t savvy = 0;
  size_t casual = 0;
  size_t sybils = 0;
  size_t registered = 0;
  std::vector<std::string> payloads;  // per savvy user; defaults generated
  std::vector<WebServerConfig> webservers;
  std::string consent_mode = "opt-out";
  size_t consent_declined = 0;
  RatePolicy rate;
  size_t casual_mobile = 0;
  size_t authorities = 3;
  uint64_t round_duration = 3600;
  bool last_server_adversarial = false;
  CorsConfig cors;
  uint64_t seed = 0;
  participants::DefenseToggles toggles;

  std::optional<adversary::GameConfig> game;
  AttackConfig attack;

  std::string payload_for(size_t savvy_index) const;
};

// Field-addressed validation problems, collected rather than thrown one at
// a time so the CLI can print them all.
class ConfigValidationError final : public std::runtime_error {
 public:
  explicit ConfigValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

ScenarioConfig validate_config(BytesView raw);

struct MetricsReport {
  SystemTag system = SystemTag::Mixnet;
  uint64_t seed = 0;
  uint64_t round = 1;
  size_t emitted = 0;
  size_t blocked = 0;
  size_t rejected = 0;
  size_t delivered = 0;
  size_t savvy_delivered = 0;
  size_t casual_delivered = 0;
  size_t effective_anonymity = 0;
  std::optional<mixnet::BulletinBoard> bulletin;
  std::optional<dcnet::DcReconstruction> reconstruction;
  std::optional<std::pair<size_t, size_t>> last_mix_leak;  // (real, dummy)

  Bytes canonical_encode() const;
};

// serve -> run_visit -> cors_submit -> one anonymity-system round -> metrics.
// Deterministic in cfg.seed, byte for byte.
MetricsReport run_scenario(const ScenarioConfig& cfg);

struct BenchEntry {
  std::string name;
  size_t iterations = 0;
  double mean_ms = 0.0;
  double stddev_ms = 0.0;
};

struct BenchReport {
  std::vector<BenchEntry> entries;

  Bytes canonical_encode() const;
  const BenchEntry* find(std::string_view name) const;
};

// Native dummy-generation timings for the two client workloads (plus the
// toy group for comparison). Wall-clock, so never part of golden files.
BenchReport run_bench(size_t iterations);

}  // namespace conscript::sim
