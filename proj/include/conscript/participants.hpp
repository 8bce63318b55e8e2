#pragma once

#include <string>

#include "conscript/dcnet.hpp"
#include "conscript/mixnet.hpp"
#include "conscript/wire.hpp"

namespace conscript::participants {

using crypto::Group;
using crypto::GroupSpec;
using crypto::KeyPair;
using wire::SystemTag;

// What the served script does when it runs. Honest generators emit a
// canonical dummy submission; marked-probe is the "Bogus!"-style tampered
// script whose output the serving adversary can predict exactly;
// formatting-variant emits an honestly-generated dummy in a non-canonical
// serialization.
enum class GeneratorId { HonestMixnet, HonestDcnet, MarkedProbe, FormattingVariant };

std::string_view generator_name(GeneratorId id);

struct ScriptBundle {
  GeneratorId generator = GeneratorId::HonestMixnet;
  Bytes bytes;
  Bytes digest;  // hash of bytes — the plug-in's exact-match criterion

  static ScriptBundle make(GeneratorId id, SystemTag system, const GroupSpec& group,
                           size_t mix_layers, BytesView probe_seed);
};

enum class ServingPolicyKind { Honest, MalformedToAll, Selective, VariantToAll };

struct ServingPolicy {
  ServingPolicyKind kind = ServingPolicyKind::Honest;
  std::vector<std::string> honest_set;  // Selective: exactly who gets the honest bundle
};

enum class DeviceClass { Workstation, Mobile };

struct RatePolicy {
  double workstation = 1.0;
  double mobile = 1.0;

  double for_device(DeviceClass device) const {
    return device == DeviceClass::Workstation ? workstation : mobile;
  }
};

// Signed list of anonymity-system server keys, published by the directory
// authorities. Signatures cover the canonical {group, keys} payload, so any
// reordering or substitution invalidates them.
struct DirectoryList {
  std::string group_name;
  std::vector<Bytes> keys;
  std::vector<Bytes> authority_publics;
  std::vector<Bytes> signatures;  // one per authority, same order

  Bytes signed_payload() const;
  Bytes canonical_encode() const;
};

DirectoryList publish_directory(const Group& group, const std::vector<KeyPair>& authorities,
                                const std::vector<Bytes>& server_keys, DeterministicRng& rng);
bool verify_directory(const DirectoryList& list, const Group& group,
                      const std::vector<Bytes>& trusted_authorities);

struct PageResponse {
  ScriptBundle bundle;
  DirectoryList directory;
  uint64_t round = 0;
  RatePolicy rates;
  std::string web_origin;
  std::string mix_origin;
};

struct ServeRecord {
  std::string client_id;
  GeneratorId generator;
  Bytes digest;
};

class WebServer {
 public:
  WebServer(std::string origin, bool adversarial, ServingPolicy policy, RatePolicy rates,
            SystemTag system, const GroupSpec& group, size_t mix_layers, Bytes probe_seed);

  const std::string& origin() const { return origin_; }
  bool adversarial() const { return adversarial_; }
  const ServingPolicy& policy() const { return policy_; }
  const ScriptBundle& honest_bundle() const { return honest_; }
  const ScriptBundle& probe_bundle() const { return probe_; }
  const std::vector<ServeRecord>& log() const { return log_; }

  PageResponse serve(const std::string& client_id, const DirectoryList& directory,
                     uint64_t round, const std::string& mix_origin);

 private:
  std::string origin_;
  bool adversarial_;
  ServingPolicy policy_;
  RatePolicy rates_;
  Bytes probe_seed_;
  ScriptBundle honest_, probe_, variant_;
  std::vector<ServeRecord> log_;
};

enum class ClientKind { Casual, Savvy, RegisteredSavvy };

struct CachedEnvelope {
  uint64_t round = 0;
  Bytes envelope;
};

struct ClientProfile {
  std::string id;
  ClientKind kind = ClientKind::Casual;
  DeviceClass device = DeviceClass::Workstation;
  bool consent = true;
  std::optional<Bytes> expected_digest;   // savvy only
  std::optional<Bytes> queued_payload;    // savvy only
  std::optional<CachedEnvelope> cache;    // filled by pregenerate
  std::optional<KeyPair> roster_key;      // registered only
  std::optional<KeyPair> slot_owner_key;  // dcnet slot owner
  // A tampered bundle silences the plug-in for the whole round, even on
  // later honest pages.
  std::optional<uint64_t> suppressed_round;

  bool is_savvy() const { return kind != ClientKind::Casual; }
};

// Ambient parameters a generated script or plug-in works against. Mix or
// DC-net server keys arrive via the page's DirectoryList, not here.
struct NetContext {
  SystemTag system = SystemTag::Mixnet;
  GroupSpec group;
  uint64_t round = 0;
  Bytes slot_owner_public;                // dcnet only
  std::vector<Bytes> authority_publics;   // trust anchors for the directory
};

// Deployment-wide defense switches; the adversary harness ablates these.
struct DefenseToggles {
  bool canonicalization = true;
  bool digest_check = true;
  bool pregeneration = true;
  bool multi_server = true;
};

struct VisitOutcome {
  std::optional<Bytes> envelope;
  uint64_t cost_units = 0;  // simulated generation cost == time-to-submit
  Bytes bundle_digest;
  uint64_t visit_time = 0;
  bool swapped = false;  // plug-in replaced the dummy (harness accounting only)
};

// Simulated per-message generation cost, in abstract units that stand in
// for milliseconds of script time.
uint64_t dummy_generation_cost(SystemTag system, size_t mix_layers);

// Exactly what the served script would emit for this client, including the
// marked probe's predictable output.
Bytes run_generator(GeneratorId id, const NetContext& ctx, const std::vector<Bytes>& server_keys,
                    BytesView bundle_bytes, const std::string& client_id, DeterministicRng& rng);

// The serving adversary's own copy of the probe computation.
Bytes predict_probe_output(const NetContext& ctx, const std::vector<Bytes>& server_keys,
                           BytesView probe_bundle_bytes, const std::string& client_id);

VisitOutcome run_visit(ClientProfile& profile, const PageResponse& page, const NetContext& ctx,
                       const DefenseToggles& toggles, uint64_t clock, DeterministicRng& rng);

// Builds the savvy user's real submission for the coming round and parks it
// in the profile cache; the work is booked offline. Returns the cost units
// spent (0 when there is nothing to do).
uint64_t pregenerate(ClientProfile& profile, const NetContext& ctx,
                     const std::vector<Bytes>& server_keys, const DefenseToggles& toggles,
                     DeterministicRng& rng);

class UnregisteredCallerError final : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

wire::SubmissionEnvelope roster_sign(const Group& group, const ClientProfile& profile,
                                     wire::SubmissionEnvelope envelope, DeterministicRng& rng);

enum class CorsResult { Delivered, Blocked };

struct CorsConfig {
  bool allow_all = true;
  std::vector<std::string> allowed_origins;
};

// Models the preflight: the submission goes through only when the anonymity
// system's origin policy admits the page's origin.
CorsResult cors_submit(const CorsConfig& config, BytesView envelope,
                       const std::string& requesting_origin);

}  // namespace conscript::participants
