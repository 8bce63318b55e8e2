#include "conscript/mixnet.hpp"

#include "conscript/proofs.hpp"

#include "json.hpp"

#include <algorithm>
#include <unordered_set>

namespace conscript::mixnet {

using nlohmann::json;

size_t MixnetParams::hop_length(size_t position) const {
  const Group& g = Group::get(group);
  return plaintext_len + (layers() - position + 1) * crypto::ciphertext_overhead(g);
}

Bytes onion_encrypt(BytesView plaintext, const MixnetParams& params, DeterministicRng& rng) {
  if (params.layers() == 0) throw std::invalid_argument("no mix servers");
  if (plaintext.size() != params.plaintext_len)
    throw std::invalid_argument("plaintext has wrong fixed length");
  const Group& group = Group::get(params.group);
  Bytes layer(plaintext.begin(), plaintext.end());
  for (size_t i = params.layers(); i-- > 0;)
    layer = crypto::pke_encrypt_bytes(group, params.server_public_keys[i], layer, rng);
  return layer;
}

void MixPolicy::validate() const {
  switch (kind) {
    case MixPolicyKind::Timed:
      if (fire_after_seconds == 0) throw std::invalid_argument("timed policy needs fire_after_seconds");
      if (count_only_roster_signed)
        throw std::invalid_argument("roster counting is only valid with threshold policies");
      break;
    case MixPolicyKind::Threshold:
      if (min_messages == 0) throw std::invalid_argument("threshold policy needs min_messages");
      break;
    case MixPolicyKind::ThresholdAndTimed:
      if (fire_after_seconds == 0 || min_messages == 0)
        throw std::invalid_argument("threshold-and-timed needs both fire_after_seconds and min_messages");
      break;
  }
}

bool should_fire(const MixPolicy& policy, const PoolStats& stats, uint64_t clock_seconds) {
  size_t counted = policy.count_only_roster_signed ? stats.signed_count : stats.total;
  switch (policy.kind) {
    case MixPolicyKind::Timed:
      return clock_seconds >= policy.fire_after_seconds;
    case MixPolicyKind::Threshold:
      return counted >= policy.min_messages;
    case MixPolicyKind::ThresholdAndTimed:
      return clock_seconds >= policy.fire_after_seconds && counted >= policy.min_messages;
  }
  return false;
}

Bytes BulletinBoard::canonical_encode() const {
  std::vector<std::string> hexes;
  hexes.reserve(real_plaintexts.size());
  for (const auto& p : real_plaintexts) hexes.push_back(to_hex(p));
  std::sort(hexes.begin(), hexes.end());
  json j;
  j["drop_count"] = drop_count;
  j["dummy_count"] = dummy_count;
  j["duplicate_count"] = duplicate_count;
  j["plaintexts"] = hexes;
  j["round"] = round;
  return bytes_of(j.dump());
}

std::string_view submit_status_name(SubmitStatus s) {
  switch (s) {
    case SubmitStatus::Ack:
      return "ack";
    case SubmitStatus::RejectBadLength:
      return "reject-bad-length";
    case SubmitStatus::RejectNonCanonical:
      return "reject-non-canonical";
    case SubmitStatus::RejectBadSignature:
      return "reject-bad-signature";
    case SubmitStatus::RejectWrongContext:
      return "reject-wrong-context";
  }
  return "unknown";
}

bool Roster::contains(BytesView key) const {
  for (const auto& k : keys)
    if (bytes_equal(k, key)) return true;
  return false;
}

Bytes Roster::canonical_encode() const {
  std::vector<std::string> hexes;
  hexes.reserve(keys.size());
  for (const auto& k : keys) hexes.push_back(to_hex(k));
  json j;
  j["keys"] = hexes;
  return bytes_of(j.dump());
}

Roster Roster::canonical_decode(BytesView raw) {
  json j;
  try {
    j = json::parse(raw.begin(), raw.end());
  } catch (const json::exception&) {
    throw wire::MalformedEnvelopeError("roster file is not valid JSON");
  }
  if (!j.is_object() || !j.contains("keys") || !j["keys"].is_array() || j.size() != 1)
    throw wire::MalformedEnvelopeError("roster file must be {\"keys\": [...]}");
  Roster roster;
  for (const auto& k : j["keys"]) {
    if (!k.is_string()) throw wire::MalformedEnvelopeError("roster keys must be hex strings");
    roster.keys.push_back(from_hex(k.get<std::string>()));
  }
  if (!bytes_equal(roster.canonical_encode(), raw))
    throw wire::NonCanonicalError("roster file is not in canonical form");
  return roster;
}

MixServer::MixServer(size_t position, KeyPair keypair, const MixnetParams& params, uint64_t round,
                     DeterministicRng rng)
    : position_(position),
      keypair_(std::move(keypair)),
      params_(params),
      round_(round),
      rng_(std::move(rng)) {
  if (position_ == 0 || position_ > params_.layers())
    throw std::invalid_argument("server position out of range");
}

SubmitStatus MixServer::submit(BytesView envelope_bytes, const Roster* roster) {
  if (position_ != 1) throw std::logic_error("submit is only valid at the entry hop");
  wire::SubmissionEnvelope env;
  try {
    env = wire::canonical_decode(envelope_bytes);
  } catch (const wire::NonCanonicalError&) {
    return SubmitStatus::RejectNonCanonical;
  } catch (const wire::MalformedEnvelopeError&) {
    return SubmitStatus::RejectNonCanonical;
  }
  if (env.system != wire::SystemTag::Mixnet || env.round != round_)
    return SubmitStatus::RejectWrongContext;
  if (env.body.size() != params_.hop_length(1)) return SubmitStatus::RejectBadLength;

  bool counted_signed = false;
  if (env.signature) {
    const auto& sig = *env.signature;
    if (sig.scheme != "schnorr-v1" || roster == nullptr || !roster->contains(sig.signer_public))
      return SubmitStatus::RejectBadSignature;
    wire::SubmissionEnvelope unsigned_env = env;
    unsigned_env.signature.reset();
    Bytes message = wire::canonical_encode(unsigned_env);
    const Group& group = Group::get(params_.group);
    crypto::SchnorrProof proof;
    try {
      proof = crypto::SchnorrProof::parse(group, sig.proof, 1);
    } catch (const std::invalid_argument&) {
      return SubmitStatus::RejectBadSignature;
    }
    if (!crypto::schnorr_verify(group, sig.signer_public, proof, message))
      return SubmitStatus::RejectBadSignature;
    counted_signed = true;
  }

  pool_.push_back(env.body);
  if (counted_signed) signed_count_++;
  return SubmitStatus::Ack;
}

void MixServer::receive_batch(std::vector<Bytes> batch) {
  if (position_ == 1) throw std::logic_error("entry hop takes submissions, not batches");
  for (auto& entry : batch) pool_.push_back(std::move(entry));
}

MixServer::FireOutput MixServer::fire() {
  if (fired_) throw FiredTwiceError("mix server already fired this round");
  fired_ = true;

  FireOutput out;

  // Dedupe by exact ciphertext bytes, keeping first occurrences.
  std::vector<Bytes> unique;
  unique.reserve(pool_.size());
  std::unordered_set<std::string> seen;
  for (auto& entry : pool_) {
    std::string key(entry.begin(), entry.end());
    if (seen.insert(std::move(key)).second)
      unique.push_back(std::move(entry));
    else
      out.duplicate_count++;
  }
  pool_.clear();

  // Seeded Fisher-Yates.
  for (size_t i = unique.size(); i > 1; i--) {
    size_t j = static_cast<size_t>(rng_.uniform(i));
    std::swap(unique[i - 1], unique[j]);
  }

  const Group& group = Group::get(params_.group);
  bool last_hop = position_ == params_.layers();
  if (last_hop) out.bulletin = BulletinBoard{round_, {}, 0, 0, 0};

  for (const auto& entry : unique) {
    Bytes peeled;
    try {
      peeled = crypto::pke_decrypt_bytes(group, keypair_.secret, entry);
    } catch (const crypto::DecryptError&) {
      out.drop_count++;
      continue;
    }
    if (!last_hop) {
      out.next_batch.push_back(std::move(peeled));
      continue;
    }
    auto parsed = wire::parse_plaintext(peeled);
    if (!parsed) {
      out.drop_count++;
    } else if (parsed->is_dummy) {
      out.bulletin->dummy_count++;
    } else {
      out.bulletin->real_plaintexts.push_back(std::move(peeled));
    }
  }

  if (out.bulletin) {
    out.bulletin->duplicate_count = out.duplicate_count;
    out.bulletin->drop_count = out.drop_count;
  }
  return out;
}

Cascade::Cascade(const GroupSpec& group_spec, size_t num_servers, MixPolicy policy, uint64_t round,
                 DeterministicRng& rng)
    : policy_(policy), round_(round) {
  if (num_servers == 0) throw std::invalid_argument("cascade needs at least one server");
  policy_.validate();
  const Group& group = Group::get(group_spec);
  params_.group = group_spec;
  std::vector<KeyPair> keys;
  keys.reserve(num_servers);
  for (size_t i = 0; i < num_servers; i++) {
    keys.push_back(crypto::keygen(group, rng));
    params_.server_public_keys.push_back(keys.back().public_key);
  }
  for (size_t i = 0; i < num_servers; i++) {
    servers_.emplace_back(i + 1, std::move(keys[i]), params_, round_,
                          rng.derive("mix-server/" + std::to_string(i + 1)));
  }
}

SubmitStatus Cascade::submit(BytesView envelope_bytes) {
  return servers_.front().submit(envelope_bytes, roster());
}

bool Cascade::should_fire(uint64_t clock_seconds) const {
  return mixnet::should_fire(policy_, servers_.front().stats(), clock_seconds);
}

BulletinBoard Cascade::fire_all() {
  size_t duplicates = 0, drops = 0;
  std::vector<Bytes> batch;
  std::optional<BulletinBoard> bulletin;
  for (size_t i = 0; i < servers_.size(); i++) {
    if (i > 0) servers_[i].receive_batch(std::move(batch));
    auto out = servers_[i].fire();
    duplicates += out.duplicate_count;
    drops += out.drop_count;
    batch = std::move(out.next_batch);
    if (out.bulletin) bulletin = std::move(out.bulletin);
  }
  bulletin->duplicate_count = duplicates;
  bulletin->drop_count = drops;
  return std::move(*bulletin);
}

size_t effective_anonymity(const BulletinBoard&, const HonestCensus& census) {
  return census.savvy_delivered + census.casual_delivered;
}

}  // namespace conscript::mixnet
