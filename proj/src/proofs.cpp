#include "conscript/proofs.hpp"

#include <stdexcept>

namespace conscript::crypto {

namespace {

constexpr std::string_view kFsDomain = "conscript.fs.v1";

// Challenge = H(domain || label || group || len-prefixed items) mod q.
Bytes fs_challenge(const Group& group, std::string_view label,
                   std::initializer_list<BytesView> items, BytesView context) {
  Bytes transcript = bytes_of(kFsDomain);
  append(transcript, bytes_of(label));
  append(transcript, bytes_of(group.spec().name()));
  for (const auto& item : items) {
    append_u32_be(transcript, static_cast<uint32_t>(item.size()));
    append(transcript, item);
  }
  append_u32_be(transcript, static_cast<uint32_t>(context.size()));
  append(transcript, context);
  return group.scalar_reduce(sha256(transcript));
}

bool proof_shape_ok(const Group& group, const SchnorrProof& p, size_t commitment_count) {
  if (p.commitments.size() != commitment_count) return false;
  for (const auto& c : p.commitments)
    if (!group.element_valid(c)) return false;
  return group.scalar_valid(p.challenge) && group.scalar_valid(p.response);
}

// g^response == commitment * statement^challenge
bool equation_holds(const Group& group, BytesView base, BytesView statement,
                    BytesView commitment, BytesView challenge, BytesView response) {
  Bytes lhs = group.exp(base, response);
  Bytes rhs = group.mul(commitment, group.exp(statement, challenge));
  return bytes_equal(lhs, rhs);
}

}  // namespace

Bytes SchnorrProof::serialize() const {
  Bytes out;
  for (const auto& c : commitments) append(out, c);
  append(out, challenge);
  append(out, response);
  return out;
}

size_t SchnorrProof::serialized_size(const Group& group, size_t commitment_count) {
  return commitment_count * group.element_size() + 2 * group.scalar_size();
}

SchnorrProof SchnorrProof::parse(const Group& group, BytesView raw, size_t commitment_count) {
  if (raw.size() != serialized_size(group, commitment_count))
    throw std::invalid_argument("bad proof length");
  SchnorrProof p;
  size_t off = 0;
  for (size_t i = 0; i < commitment_count; i++) {
    p.commitments.emplace_back(raw.begin() + off, raw.begin() + off + group.element_size());
    off += group.element_size();
  }
  p.challenge.assign(raw.begin() + off, raw.begin() + off + group.scalar_size());
  off += group.scalar_size();
  p.response.assign(raw.begin() + off, raw.begin() + off + group.scalar_size());
  return p;
}

SchnorrProof schnorr_prove(const Group& group, BytesView secret, BytesView statement,
                           BytesView context, DeterministicRng& rng) {
  if (!group.scalar_valid(secret)) throw std::invalid_argument("bad witness scalar");
  Bytes nonce = group.random_scalar(rng);
  SchnorrProof proof;
  proof.commitments.push_back(group.exp(group.generator(), nonce));
  proof.challenge =
      fs_challenge(group, "schnorr", {statement, view(proof.commitments[0])}, context);
  proof.response = group.scalar_add(nonce, group.scalar_mul(proof.challenge, secret));
  return proof;
}

bool schnorr_verify(const Group& group, BytesView statement, const SchnorrProof& proof,
                    BytesView context) {
  if (!group.element_valid(statement)) return false;
  if (!proof_shape_ok(group, proof, 1)) return false;
  Bytes expected = fs_challenge(group, "schnorr", {statement, view(proof.commitments[0])}, context);
  if (!bytes_equal(expected, proof.challenge)) return false;
  return equation_holds(group, group.generator(), statement, proof.commitments[0],
                        proof.challenge, proof.response);
}

SchnorrProof dleq_prove(const Group& group, BytesView secret, const DleqStatement& stmt,
                        BytesView context, DeterministicRng& rng) {
  if (!group.scalar_valid(secret)) throw std::invalid_argument("bad witness scalar");
  Bytes nonce = group.random_scalar(rng);
  SchnorrProof proof;
  proof.commitments.push_back(group.exp(stmt.base_g, nonce));
  proof.commitments.push_back(group.exp(stmt.base_h, nonce));
  proof.challenge = fs_challenge(group, "dleq",
                                 {view(stmt.base_g), view(stmt.base_h), view(stmt.gx),
                                  view(stmt.hx), view(proof.commitments[0]),
                                  view(proof.commitments[1])},
                                 context);
  proof.response = group.scalar_add(nonce, group.scalar_mul(proof.challenge, secret));
  return proof;
}

bool dleq_verify(const Group& group, const DleqStatement& stmt, const SchnorrProof& proof,
                 BytesView context) {
  for (const auto* e : {&stmt.base_g, &stmt.base_h, &stmt.gx, &stmt.hx})
    if (!group.element_valid(*e)) return false;
  if (!proof_shape_ok(group, proof, 2)) return false;
  Bytes expected = fs_challenge(group, "dleq",
                                {view(stmt.base_g), view(stmt.base_h), view(stmt.gx),
                                 view(stmt.hx), view(proof.commitments[0]),
                                 view(proof.commitments[1])},
                                context);
  if (!bytes_equal(expected, proof.challenge)) return false;
  return equation_holds(group, stmt.base_g, stmt.gx, proof.commitments[0], proof.challenge,
                        proof.response) &&
         equation_holds(group, stmt.base_h, stmt.hx, proof.commitments[1], proof.challenge,
                        proof.response);
}

Bytes OrProof::serialize() const { return concat({view(left.serialize()), view(right.serialize())}); }

size_t OrProof::serialized_size(const Group& group) {
  return SchnorrProof::serialized_size(group, 2) + SchnorrProof::serialized_size(group, 1);
}

OrProof OrProof::parse(const Group& group, BytesView raw) {
  if (raw.size() != serialized_size(group)) throw std::invalid_argument("bad proof length");
  size_t left_size = SchnorrProof::serialized_size(group, 2);
  OrProof p;
  p.left = SchnorrProof::parse(group, raw.subspan(0, left_size), 2);
  p.right = SchnorrProof::parse(group, raw.subspan(left_size), 1);
  return p;
}

namespace {

Bytes or_challenge(const Group& group, const OrStatement& stmt, const OrProof& proof,
                   BytesView context) {
  return fs_challenge(group, "or",
                      {view(stmt.left.base_g), view(stmt.left.base_h), view(stmt.left.gx),
                       view(stmt.left.hx), view(stmt.right_statement),
                       view(proof.left.commitments[0]), view(proof.left.commitments[1]),
                       view(proof.right.commitments[0])},
                      context);
}

// Simulated transcript for a chosen challenge: pick the response first and
// solve for the commitment base^response * statement^-challenge.
Bytes simulate_commitment(const Group& group, BytesView base, BytesView statement,
                          BytesView challenge, BytesView response) {
  Bytes neg = group.inverse(group.exp(statement, challenge));
  return group.mul(group.exp(base, response), neg);
}

}  // namespace

OrProof or_prove(const Group& group, OrBranch real_branch, BytesView witness,
                 const OrStatement& stmt, BytesView context, DeterministicRng& rng) {
  if (!group.scalar_valid(witness)) throw std::invalid_argument("bad witness scalar");
  OrProof proof;
  Bytes nonce = group.random_scalar(rng);
  if (real_branch == OrBranch::Left) {
    // Simulate the right branch.
    proof.right.challenge = group.random_scalar(rng);
    proof.right.response = group.random_scalar(rng);
    proof.right.commitments.push_back(simulate_commitment(group, group.generator(),
                                                          stmt.right_statement,
                                                          proof.right.challenge,
                                                          proof.right.response));
    proof.left.commitments.push_back(group.exp(stmt.left.base_g, nonce));
    proof.left.commitments.push_back(group.exp(stmt.left.base_h, nonce));
    Bytes total = or_challenge(group, stmt, proof, context);
    proof.left.challenge = group.scalar_sub(total, proof.right.challenge);
    proof.left.response = group.scalar_add(nonce, group.scalar_mul(proof.left.challenge, witness));
  } else {
    // Simulate the left (DLEQ) branch.
    proof.left.challenge = group.random_scalar(rng);
    proof.left.response = group.random_scalar(rng);
    proof.left.commitments.push_back(simulate_commitment(group, stmt.left.base_g, stmt.left.gx,
                                                         proof.left.challenge,
                                                         proof.left.response));
    proof.left.commitments.push_back(simulate_commitment(group, stmt.left.base_h, stmt.left.hx,
                                                         proof.left.challenge,
                                                         proof.left.response));
    proof.right.commitments.push_back(group.exp(group.generator(), nonce));
    Bytes total = or_challenge(group, stmt, proof, context);
    proof.right.challenge = group.scalar_sub(total, proof.left.challenge);
    proof.right.response =
        group.scalar_add(nonce, group.scalar_mul(proof.right.challenge, witness));
  }
  return proof;
}

bool or_verify(const Group& group, const OrStatement& stmt, const OrProof& proof,
               BytesView context) {
  for (const auto* e : {&stmt.left.base_g, &stmt.left.base_h, &stmt.left.gx, &stmt.left.hx,
                        &stmt.right_statement})
    if (!group.element_valid(*e)) return false;
  if (!proof_shape_ok(group, proof.left, 2) || !proof_shape_ok(group, proof.right, 1))
    return false;
  Bytes total = or_challenge(group, stmt, proof, context);
  if (!bytes_equal(total, group.scalar_add(proof.left.challenge, proof.right.challenge)))
    return false;
  return equation_holds(group, stmt.left.base_g, stmt.left.gx, proof.left.commitments[0],
                        proof.left.challenge, proof.left.response) &&
         equation_holds(group, stmt.left.base_h, stmt.left.hx, proof.left.commitments[1],
                        proof.left.challenge, proof.left.response) &&
         equation_holds(group, group.generator(), stmt.right_statement,
                        proof.right.commitments[0], proof.right.challenge,
                        proof.right.response);
}

}  // namespace conscript::crypto
