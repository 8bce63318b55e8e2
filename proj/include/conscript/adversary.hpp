#pragma once

#include "conscript/participants.hpp"

namespace conscript::adversary {

using participants::DefenseToggles;
using participants::GeneratorId;

// One observed submission: a network eavesdropper sees both the page fetch
// and the upload, so the generation delay (submit - visit) is visible.
struct WireRecord {
  std::string client_id;
  uint64_t round = 0;
  uint64_t visit_time = 0;
  uint64_t submit_time = 0;
  Bytes bytes;
};

// A serving adversary's log entry, including its own prediction of what the
// served script will emit (exact for marked probes, empty otherwise).
struct ServingRecord {
  std::string client_id;
  GeneratorId generator = GeneratorId::HonestMixnet;
  Bytes predicted_output;
};

// Only what the configured adversary legitimately observes: the wire is
// public, serving logs exist only for adversarial web servers, the
// dummy/real split only when the last mix server is adversarial, and the
// bulletin's real plaintexts are public output by design.
struct AdversaryView {
  std::vector<WireRecord> wire;
  std::optional<std::vector<ServingRecord>> serving_log;
  std::optional<std::pair<size_t, size_t>> last_mix_counts;  // (real, dummy)
  std::vector<Bytes> public_bulletin_reals;
};

enum class Strategy { LengthClassifier, FormatFingerprinter, TimingObserver, BundleProber };

std::string_view strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(std::string_view name);

// Small fixed world the game instantiates fresh for every trial.
struct GameScenario {
  crypto::GroupSpec group = crypto::GroupSpec::toy();
  size_t mix_layers = 3;
  size_t background_casual = 20;
  uint64_t round_duration = 3600;
  std::string target_payload = "attack at dawn";
};

struct GameConfig {
  size_t trials = 200;
  Strategy strategy = Strategy::LengthClassifier;
  DefenseToggles toggles;
  GameScenario scenario;
};

struct GameResult {
  Strategy strategy = Strategy::LengthClassifier;
  DefenseToggles toggles;
  size_t trials = 0;
  size_t correct = 0;
  double advantage = 0.0;
  double confidence_half_width = 0.0;

  Bytes canonical_encode() const;
};

// Savvy-vs-casual distinguishing game: the challenger assigns the target's
// role (balanced across trials), runs one full round, hands the strategy its
// view, and scores the guess. Advantage is |2 * Pr[correct] - 1|.
GameResult run_distinguishing_game(const GameConfig& config, DeterministicRng& rng);

struct SelectiveDosConfig {
  GameScenario scenario;
  bool target_savvy = true;
};

struct SelectiveDosOutcome {
  bool identified = false;
  std::optional<Bytes> exposed_payload;
  bool multi_server = false;

  Bytes canonical_encode() const;
};

// The trickle-style attack of serving broken script to everyone but the
// target, then reading the bulletin. With a second honest server the
// target's message mixes into that server's casual traffic.
SelectiveDosOutcome run_selective_dos(const SelectiveDosConfig& config, bool multi_server,
                                      DeterministicRng& rng);

struct FloodPopulation {
  size_t honest_savvy = 0;
  size_t honest_casual = 0;
  size_t registered = 0;  // subset of the savvy users that signs
};

struct FloodReport {
  bool fired = false;
  size_t honest_anonymity = 0;
  size_t pool_total = 0;
  size_t signed_count = 0;
  size_t sybils = 0;
  mixnet::MixPolicyKind policy = mixnet::MixPolicyKind::Threshold;

  Bytes canonical_encode() const;
};

// Sybil flood against a threshold-family mix: the adversary pre-inserts
// sybil messages, honest users follow, and the report states how much
// anonymity the honest users actually got.
FloodReport run_flood_attack(const mixnet::MixPolicy& policy, size_t sybil_count,
                             const FloodPopulation& population, const crypto::GroupSpec& group,
                             DeterministicRng& rng);

class UnavailableError final : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The last-hop leak: how many dummies (and so how many savvy users) this
// round had. Only an adversarial last mix server sees it.
std::pair<size_t, size_t> dummy_count_leak(const AdversaryView& view);

}  // namespace conscript::adversary
