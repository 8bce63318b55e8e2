#include "conscript/dcnet.hpp"

namespace conscript::dcnet {

namespace {

Bytes client_context(uint64_t round) {
  Bytes ctx = bytes_of("dcnet.client.v1");
  append_u64_be(ctx, round);
  return ctx;
}

Bytes share_context(uint64_t round, size_t client_index) {
  Bytes ctx = bytes_of("dcnet.share.v1");
  append_u64_be(ctx, round);
  append_u32_be(ctx, static_cast<uint32_t>(client_index));
  return ctx;
}

crypto::OrStatement client_statement(const Group& group, const DcRoundParams& params,
                                     BytesView commitment, BytesView ciphertext) {
  crypto::OrStatement stmt;
  stmt.left.base_g = group.generator();
  stmt.left.base_h = params.combined_key();
  stmt.left.gx = Bytes(commitment.begin(), commitment.end());
  stmt.left.hx = Bytes(ciphertext.begin(), ciphertext.end());
  stmt.right_statement = params.slot_owner_public;
  return stmt;
}

}  // namespace

Bytes DcRoundParams::combined_key() const {
  const Group& g = Group::get(group);
  if (server_public_keys.empty()) throw std::invalid_argument("no DC-net servers");
  Bytes acc = g.identity();
  for (const auto& key : server_public_keys) acc = g.mul(acc, key);
  return acc;
}

Bytes DcClientCiphertext::serialize(const Group& group) const {
  (void)group;
  return concat({view(commitment), view(ciphertext), view(proof.serialize())});
}

size_t DcClientCiphertext::serialized_size(const Group& group) {
  return 2 * group.element_size() + OrProof::serialized_size(group);
}

DcClientCiphertext DcClientCiphertext::parse(const Group& group, BytesView raw) {
  if (raw.size() != serialized_size(group))
    throw std::invalid_argument("bad DC-net ciphertext length");
  DcClientCiphertext ct;
  size_t e = group.element_size();
  ct.commitment.assign(raw.begin(), raw.begin() + e);
  ct.ciphertext.assign(raw.begin() + e, raw.begin() + 2 * e);
  ct.proof = OrProof::parse(group, raw.subspan(2 * e));
  return ct;
}

DcClientCiphertext dc_client_submit_with_secret(const DcRoundParams& params,
                                                const DcClientRole& role, BytesView pad_secret,
                                                DeterministicRng& rng) {
  const Group& group = Group::get(params.group);
  if (!group.scalar_valid(pad_secret)) throw std::invalid_argument("bad pad secret");

  DcClientCiphertext ct;
  ct.commitment = group.exp(group.generator(), pad_secret);
  Bytes pad = group.exp(params.combined_key(), pad_secret);

  if (role.is_owner) {
    if (role.payload.size() > group.max_payload())
      throw crypto::PayloadEncodeError("payload too long");
    if (!bytes_equal(group.exp(group.generator(), role.owner_secret), params.slot_owner_public))
      throw OwnerKeyMismatchError("owner secret does not match the registered slot key");
    ct.ciphertext = group.mul(pad, group.encode_payload(role.payload));
  } else {
    ct.ciphertext = pad;
  }

  auto stmt = client_statement(group, params, ct.commitment, ct.ciphertext);
  Bytes ctx = client_context(params.round);
  if (role.is_owner) {
    ct.proof = crypto::or_prove(group, crypto::OrBranch::Right, role.owner_secret, stmt, ctx, rng);
  } else {
    ct.proof = crypto::or_prove(group, crypto::OrBranch::Left, pad_secret, stmt, ctx, rng);
  }
  return ct;
}

DcClientCiphertext dc_client_submit(const DcRoundParams& params, const DcClientRole& role,
                                    DeterministicRng& rng) {
  const Group& group = Group::get(params.group);
  Bytes pad_secret = group.random_scalar(rng);
  return dc_client_submit_with_secret(params, role, pad_secret, rng);
}

bool dc_verify_client(const DcRoundParams& params, const DcClientCiphertext& ct) {
  const Group& group = Group::get(params.group);
  if (!group.element_valid(ct.commitment) || !group.element_valid(ct.ciphertext)) return false;
  auto stmt = client_statement(group, params, ct.commitment, ct.ciphertext);
  return crypto::or_verify(group, stmt, ct.proof, client_context(params.round));
}

DcServerShare dc_server_share(const Group& group, const KeyPair& server_key, size_t server_index,
                              const std::vector<Bytes>& commitments, uint64_t round,
                              DeterministicRng& rng) {
  DcServerShare share;
  share.server_index = server_index;
  share.shares.reserve(commitments.size());
  share.proofs.reserve(commitments.size());
  for (size_t i = 0; i < commitments.size(); i++) {
    if (!group.element_valid(commitments[i])) throw std::invalid_argument("bad commitment");
    Bytes s = group.exp(commitments[i], server_key.secret);
    crypto::DleqStatement stmt{group.generator(), commitments[i], server_key.public_key, s};
    share.proofs.push_back(crypto::dleq_prove(group, server_key.secret, stmt,
                                              share_context(round, i), rng));
    share.shares.push_back(std::move(s));
  }
  return share;
}

bool dc_verify_share(const DcRoundParams& params, const DcServerShare& share,
                     const std::vector<Bytes>& commitments) {
  const Group& group = Group::get(params.group);
  if (share.server_index >= params.server_public_keys.size()) return false;
  if (share.shares.size() != commitments.size() || share.proofs.size() != commitments.size())
    return false;
  const Bytes& server_public = params.server_public_keys[share.server_index];
  for (size_t i = 0; i < commitments.size(); i++) {
    crypto::DleqStatement stmt{group.generator(), commitments[i], server_public, share.shares[i]};
    if (!crypto::dleq_verify(group, stmt, share.proofs[i], share_context(params.round, i)))
      return false;
  }
  return true;
}

DcReconstruction dc_reconstruct(const DcRoundParams& params,
                                const std::vector<DcClientCiphertext>& ciphertexts,
                                const std::vector<DcServerShare>& shares) {
  const Group& group = Group::get(params.group);
  if (shares.size() != params.server_public_keys.size())
    throw UnverifiedInputError("need exactly one share set per server");

  std::vector<Bytes> commitments;
  commitments.reserve(ciphertexts.size());
  for (const auto& ct : ciphertexts) {
    if (!dc_verify_client(params, ct)) throw UnverifiedInputError("client proof failed");
    commitments.push_back(ct.commitment);
  }

  std::vector<bool> seen(shares.size(), false);
  for (const auto& share : shares) {
    if (!dc_verify_share(params, share, commitments))
      throw UnverifiedInputError("server share proof failed");
    if (seen[share.server_index]) throw UnverifiedInputError("duplicate server share set");
    seen[share.server_index] = true;
  }

  Bytes aggregate = group.identity();
  for (const auto& ct : ciphertexts) aggregate = group.mul(aggregate, ct.ciphertext);
  for (const auto& share : shares)
    for (const auto& s : share.shares) aggregate = group.mul(aggregate, group.inverse(s));

  DcReconstruction result;
  if (group.is_identity(aggregate)) {
    result.kind = DcReconstruction::Kind::Empty;
    return result;
  }
  if (auto payload = group.decode_payload(aggregate); payload && !payload->empty()) {
    result.kind = DcReconstruction::Kind::Payload;
    result.payload = std::move(*payload);
    return result;
  }
  result.kind = DcReconstruction::Kind::Garbage;
  return result;
}

}  // namespace conscript::dcnet
