#pragma once

#include "conscript/group.hpp"

namespace conscript::crypto {

// Sigma-protocol transcript made non-interactive with Fiat-Shamir. The same
// shape serves plain Schnorr (one commitment) and Chaum-Pedersen DLEQ (two
// commitments); verification always recomputes the challenge from the full
// transcript, so proofs are bound to their context bytes.
struct SchnorrProof {
  std::vector<Bytes> commitments;
  Bytes challenge;
  Bytes response;

  Bytes serialize() const;
  static SchnorrProof parse(const Group& group, BytesView raw, size_t commitment_count);
  static size_t serialized_size(const Group& group, size_t commitment_count);
};

// Proves knowledge of secret with statement = g^secret.
SchnorrProof schnorr_prove(const Group& group, BytesView secret, BytesView statement,
                           BytesView context, DeterministicRng& rng);
bool schnorr_verify(const Group& group, BytesView statement, const SchnorrProof& proof,
                    BytesView context);

// log_{base_g}(gx) == log_{base_h}(hx), i.e. gx = base_g^x and hx = base_h^x.
struct DleqStatement {
  Bytes base_g;
  Bytes base_h;
  Bytes gx;
  Bytes hx;
};

SchnorrProof dleq_prove(const Group& group, BytesView secret, const DleqStatement& stmt,
                        BytesView context, DeterministicRng& rng);
bool dleq_verify(const Group& group, const DleqStatement& stmt, const SchnorrProof& proof,
                 BytesView context);

// Disjunction: either the DLEQ relation on the left holds, or the prover
// knows the discrete log of right_statement to base g. The branch not held
// is simulated, and serialized proofs have one fixed length either way.
enum class OrBranch { Left, Right };

struct OrStatement {
  DleqStatement left;
  Bytes right_statement;  // K = g^k
};

struct OrProof {
  SchnorrProof left;   // two commitments
  SchnorrProof right;  // one commitment

  Bytes serialize() const;
  static OrProof parse(const Group& group, BytesView raw);
  static size_t serialized_size(const Group& group);
};

OrProof or_prove(const Group& group, OrBranch real_branch, BytesView witness,
                 const OrStatement& stmt, BytesView context, DeterministicRng& rng);
bool or_verify(const Group& group, const OrStatement& stmt, const OrProof& proof,
               BytesView context);

}  // namespace conscript::crypto
