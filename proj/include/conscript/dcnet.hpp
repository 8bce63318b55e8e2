#pragma once

#include "conscript/pke.hpp"
#include "conscript/proofs.hpp"

namespace conscript::dcnet {

using crypto::Group;
using crypto::GroupSpec;
using crypto::KeyPair;
using crypto::OrProof;
using crypto::SchnorrProof;

// One round of the verifiable client/server DC-net. Clients only need the
// server keys (combined into Y-hat) and the slot owner's public key K.
struct DcRoundParams {
  GroupSpec group;
  std::vector<Bytes> server_public_keys;
  uint64_t round = 0;
  Bytes slot_owner_public;  // K = g^k, registered before the round

  Bytes combined_key() const;  // product of all server keys
};

// X = g^x commits to the pad exponent; C is the padded slot contribution;
// the OR proof shows either C = Yhat^x (a dummy) or knowledge of the slot
// owner key — without revealing which.
struct DcClientCiphertext {
  Bytes commitment;  // X
  Bytes ciphertext;  // C
  OrProof proof;

  Bytes serialize(const Group& group) const;
  static DcClientCiphertext parse(const Group& group, BytesView raw);
  static size_t serialized_size(const Group& group);
};

struct DcClientRole {
  bool is_owner = false;
  Bytes payload;       // owner only, <= group max_payload()
  Bytes owner_secret;  // owner only, k with g^k = K

  static DcClientRole dummy() { return {}; }
  static DcClientRole owner(Bytes payload, Bytes secret) {
    return {true, std::move(payload), std::move(secret)};
  }
};

class OwnerKeyMismatchError final : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

DcClientCiphertext dc_client_submit(const DcRoundParams& params, const DcClientRole& role,
                                    DeterministicRng& rng);
// Deterministic-pad variant for oracle tests: the caller fixes x.
DcClientCiphertext dc_client_submit_with_secret(const DcRoundParams& params,
                                                const DcClientRole& role, BytesView pad_secret,
                                                DeterministicRng& rng);

bool dc_verify_client(const DcRoundParams& params, const DcClientCiphertext& ct);

// S_{j,i} = X_i^{y_j} with a DLEQ proof per client that the share uses the
// same exponent as the server's published key.
struct DcServerShare {
  size_t server_index = 0;
  std::vector<Bytes> shares;
  std::vector<SchnorrProof> proofs;
};

DcServerShare dc_server_share(const Group& group, const KeyPair& server_key, size_t server_index,
                              const std::vector<Bytes>& commitments, uint64_t round,
                              DeterministicRng& rng);
bool dc_verify_share(const DcRoundParams& params, const DcServerShare& share,
                     const std::vector<Bytes>& commitments);

class UnverifiedInputError final : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DcReconstruction {
  enum class Kind { Empty, Payload, Garbage };
  Kind kind = Kind::Empty;
  Bytes payload;
};

// Aggregate-only opening: A = prod C_i / prod S_{j,i}. Identity means all
// dummies; a decodable element is the single owner's payload; anything else
// (two owners colliding in the slot) is flagged as garbage. Re-verifies
// every input and throws UnverifiedInputError on any failure.
DcReconstruction dc_reconstruct(const DcRoundParams& params,
                                const std::vector<DcClientCiphertext>& ciphertexts,
                                const std::vector<DcServerShare>& shares);

}  // namespace conscript::dcnet
