#pragma once

#include "conscript/pke.hpp"
#include "conscript/wire.hpp"

namespace conscript::mixnet {

using crypto::Group;
using crypto::GroupSpec;
using crypto::KeyPair;

struct MixnetParams {
  GroupSpec group;
  std::vector<Bytes> server_public_keys;  // hop order: index 0 is the entry server
  size_t plaintext_len = wire::kPlaintextLen;

  size_t layers() const { return server_public_keys.size(); }
  // Ciphertext length entering hop `position` (1-based).
  size_t hop_length(size_t position) const;
};

// E(pk_1, ... E(pk_M, m) ...): innermost layer under the last server's key.
Bytes onion_encrypt(BytesView plaintext, const MixnetParams& params, DeterministicRng& rng);

enum class MixPolicyKind { Timed, Threshold, ThresholdAndTimed };

struct MixPolicy {
  MixPolicyKind kind = MixPolicyKind::Timed;
  uint64_t fire_after_seconds = 0;
  size_t min_messages = 0;
  bool count_only_roster_signed = false;

  // Throws std::invalid_argument on inconsistent combinations.
  void validate() const;
};

struct PoolStats {
  size_t total = 0;
  size_t signed_count = 0;
};

bool should_fire(const MixPolicy& policy, const PoolStats& stats, uint64_t clock_seconds);

// Public output of the final hop. `real_plaintexts` keeps the emission
// order (the order after the last shuffle); the canonical export sorts.
struct BulletinBoard {
  uint64_t round = 0;
  std::vector<Bytes> real_plaintexts;
  size_t dummy_count = 0;
  size_t duplicate_count = 0;
  size_t drop_count = 0;

  Bytes canonical_encode() const;
};

enum class SubmitStatus {
  Ack,
  RejectBadLength,
  RejectNonCanonical,
  RejectBadSignature,
  RejectWrongContext,  // valid envelope for a different round or system
};

std::string_view submit_status_name(SubmitStatus s);

// Registered-user public keys. Signatures are checked against this list
// before a submission counts toward a roster-gated threshold.
struct Roster {
  std::vector<Bytes> keys;

  bool contains(BytesView key) const;
  Bytes canonical_encode() const;
  static Roster canonical_decode(BytesView raw);
};

class FiredTwiceError final : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class MixServer {
 public:
  MixServer(size_t position, KeyPair keypair, const MixnetParams& params, uint64_t round,
            DeterministicRng rng);

  size_t position() const { return position_; }
  const Bytes& public_key() const { return keypair_.public_key; }
  PoolStats stats() const { return PoolStats{pool_.size(), signed_count_}; }
  bool fired() const { return fired_; }

  // Entry-hop pool insert; only valid at position 1.
  SubmitStatus submit(BytesView envelope_bytes, const Roster* roster);

  // Downstream hops take the previous hop's batch directly.
  void receive_batch(std::vector<Bytes> batch);

  struct FireOutput {
    std::vector<Bytes> next_batch;                // empty at the last hop
    std::optional<BulletinBoard> bulletin;        // present only at the last hop
    size_t duplicate_count = 0;
    size_t drop_count = 0;
  };

  // Dedupe (exact bytes), shuffle (seeded Fisher-Yates), peel one layer.
  FireOutput fire();

 private:
  size_t position_;
  KeyPair keypair_;
  MixnetParams params_;
  uint64_t round_;
  DeterministicRng rng_;
  std::vector<Bytes> pool_;
  size_t signed_count_ = 0;
  bool fired_ = false;
};

// A full cascade of M servers plus the firing policy, driving one round.
class Cascade {
 public:
  Cascade(const GroupSpec& group, size_t num_servers, MixPolicy policy, uint64_t round,
          DeterministicRng& rng);

  const MixnetParams& params() const { return params_; }
  const MixPolicy& policy() const { return policy_; }
  uint64_t round() const { return round_; }
  const Roster* roster() const { return roster_.keys.empty() ? nullptr : &roster_; }
  void set_roster(Roster roster) { roster_ = std::move(roster); }

  SubmitStatus submit(BytesView envelope_bytes);
  PoolStats stats() const { return servers_.front().stats(); }
  bool should_fire(uint64_t clock_seconds) const;
  bool fired() const { return servers_.front().fired(); }

  // Runs every hop in order and returns the final bulletin with the
  // duplicate/drop counters accumulated across hops.
  BulletinBoard fire_all();

 private:
  MixnetParams params_;
  MixPolicy policy_;
  uint64_t round_;
  Roster roster_;
  std::vector<MixServer> servers_;
};

struct HonestCensus {
  size_t savvy_delivered = 0;   // j: honest savvy whose message reached the pool
  size_t casual_delivered = 0;  // k: honest casual (and savvy acting casually)
};

// The j + k metric.
size_t effective_anonymity(const BulletinBoard& bulletin, const HonestCensus& census);

}  // namespace conscript::mixnet
