#pragma once

#include <optional>
#include <stdexcept>

#include "conscript/group.hpp"

namespace conscript::wire {

using crypto::GroupSpec;

// Every plaintext in the system is exactly this long:
// [1-byte control][2-byte big-endian payload length][payload][zero padding].
// A dummy is the all-zero block; a real message has control byte 0x01.
inline constexpr size_t kPlaintextLen = 256;
inline constexpr size_t kMaxPayloadLen = kPlaintextLen - 3;

class OversizePayloadError final : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DummyPayloadError final : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

Bytes make_plaintext(BytesView payload, bool is_dummy);

struct ParsedPlaintext {
  bool is_dummy = false;
  Bytes payload;
};

// nullopt when the block violates the layout (bad control byte, nonzero
// padding, implausible length field, dummy bytes after a zero control).
std::optional<ParsedPlaintext> parse_plaintext(BytesView block);

enum class SystemTag { Mixnet, Dcnet };

std::string_view system_name(SystemTag tag);
std::optional<SystemTag> system_from_name(std::string_view name);

struct RosterSignature {
  std::string scheme;  // "schnorr-v1"
  Bytes signer_public;
  Bytes proof;

  bool operator==(const RosterSignature&) const = default;
};

// The one object every client hands to the network. All unsigned envelopes
// for the same (system, params, round) serialize to the same length, so the
// wire leaks nothing about dummy vs. real.
struct SubmissionEnvelope {
  SystemTag system = SystemTag::Mixnet;
  uint64_t round = 0;
  Bytes body;
  std::optional<RosterSignature> signature;

  bool operator==(const SubmissionEnvelope&) const = default;
};

// Input parses but is not the canonical byte form (reordered keys, stray
// whitespace, uppercase hex, ...).
class NonCanonicalError final : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input is structurally broken: not an object, missing or mistyped fields,
// unknown system tag, non-hex body.
class MalformedEnvelopeError final : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Canonical form: UTF-8 JSON, keys sorted, no insignificant whitespace,
// lowercase hex, "sig" omitted entirely when absent.
Bytes canonical_encode(const SubmissionEnvelope& envelope);
SubmissionEnvelope canonical_decode(BytesView raw);

// Same content in a deliberately different (still parseable) formatting —
// the "two serialization libraries" fingerprint the canonical form exists
// to rule out. Used by the adversary harness when canonicalization is off.
Bytes variant_encode(const SubmissionEnvelope& envelope);

class InvalidParamsError final : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EnvelopeParams {
  GroupSpec group;
  size_t mix_layers = 0;  // ignored for dcnet
};

// The unique legal body length (bytes, before hex expansion) of an unsigned
// envelope for the given system and parameters.
size_t envelope_length(SystemTag system, const EnvelopeParams& params);

}  // namespace conscript::wire
