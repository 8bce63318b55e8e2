#include "conscript/wire.hpp"

#include "json.hpp"

#include "conscript/pke.hpp"
#include "conscript/proofs.hpp"

namespace conscript::wire {

using nlohmann::json;

Bytes make_plaintext(BytesView payload, bool is_dummy) {
  if (is_dummy && !payload.empty()) throw DummyPayloadError("dummy payload must be empty");
  if (payload.size() > kMaxPayloadLen) throw OversizePayloadError("payload exceeds 253 bytes");
  Bytes block(kPlaintextLen, 0);
  if (is_dummy) return block;
  block[0] = 0x01;
  block[1] = static_cast<uint8_t>(payload.size() >> 8);
  block[2] = static_cast<uint8_t>(payload.size() & 0xff);
  std::copy(payload.begin(), payload.end(), block.begin() + 3);
  return block;
}

std::optional<ParsedPlaintext> parse_plaintext(BytesView block) {
  if (block.size() != kPlaintextLen) return std::nullopt;
  if (block[0] == 0x00) {
    for (uint8_t b : block)
      if (b != 0) return std::nullopt;
    return ParsedPlaintext{true, {}};
  }
  if (block[0] != 0x01) return std::nullopt;
  size_t len = (static_cast<size_t>(block[1]) << 8) | block[2];
  if (len > kMaxPayloadLen) return std::nullopt;
  for (size_t i = 3 + len; i < block.size(); i++)
    if (block[i] != 0) return std::nullopt;
  return ParsedPlaintext{false, Bytes(block.begin() + 3, block.begin() + 3 + len)};
}

std::string_view system_name(SystemTag tag) {
  return tag == SystemTag::Mixnet ? "mixnet" : "dcnet";
}

std::optional<SystemTag> system_from_name(std::string_view name) {
  if (name == "mixnet") return SystemTag::Mixnet;
  if (name == "dcnet") return SystemTag::Dcnet;
  return std::nullopt;
}

Bytes canonical_encode(const SubmissionEnvelope& envelope) {
  json j;
  j["body"] = to_hex(envelope.body);
  j["round"] = envelope.round;
  j["sys"] = std::string(system_name(envelope.system));
  if (envelope.signature) {
    j["sig"] = json{{"key", to_hex(envelope.signature->signer_public)},
                    {"proof", to_hex(envelope.signature->proof)},
                    {"scheme", envelope.signature->scheme}};
  }
  return bytes_of(j.dump());
}

namespace {

Bytes hex_field(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) throw MalformedEnvelopeError(std::string(key) + " missing or not a string");
  try {
    return from_hex(j[key].get<std::string>());
  } catch (const std::invalid_argument&) {
    throw MalformedEnvelopeError(std::string(key) + " is not hex");
  }
}

}  // namespace

SubmissionEnvelope canonical_decode(BytesView raw) {
  json j;
  try {
    j = json::parse(raw.begin(), raw.end());
  } catch (const json::exception&) {
    throw MalformedEnvelopeError("not valid JSON");
  }
  if (!j.is_object()) throw MalformedEnvelopeError("not a JSON object");
  for (const auto& item : j.items()) {
    const std::string& k = item.key();
    if (k != "body" && k != "round" && k != "sig" && k != "sys")
      throw MalformedEnvelopeError("unknown field: " + k);
  }

  SubmissionEnvelope env;
  env.body = hex_field(j, "body");
  if (!j.contains("round") || !j["round"].is_number_unsigned())
    throw MalformedEnvelopeError("round missing or not an unsigned integer");
  env.round = j["round"].get<uint64_t>();
  if (!j.contains("sys") || !j["sys"].is_string())
    throw MalformedEnvelopeError("sys missing or not a string");
  auto sys = system_from_name(j["sys"].get<std::string>());
  if (!sys) throw MalformedEnvelopeError("unknown system tag");
  env.system = *sys;

  if (j.contains("sig")) {
    const json& s = j["sig"];
    if (!s.is_object()) throw MalformedEnvelopeError("sig is not an object");
    for (const auto& item : s.items()) {
      const std::string& k = item.key();
      if (k != "key" && k != "proof" && k != "scheme")
        throw MalformedEnvelopeError("unknown sig field: " + k);
    }
    if (!s.contains("scheme") || !s["scheme"].is_string())
      throw MalformedEnvelopeError("sig scheme missing");
    RosterSignature sig;
    sig.scheme = s["scheme"].get<std::string>();
    sig.signer_public = hex_field(s, "key");
    sig.proof = hex_field(s, "proof");
    env.signature = std::move(sig);
  }

  // The canonical form is the only legal byte form: anything that survives
  // parsing but re-encodes differently is rejected outright.
  if (!bytes_equal(canonical_encode(env), raw))
    throw NonCanonicalError("input is not in canonical form");
  return env;
}

Bytes variant_encode(const SubmissionEnvelope& envelope) {
  std::string canonical = string_of(canonical_encode(envelope));
  std::string variant;
  variant.reserve(canonical.size() + 16);
  for (size_t i = 0; i < canonical.size(); i++) {
    variant.push_back(canonical[i]);
    if (canonical[i] == ':' && i > 0 && canonical[i - 1] == '"') variant.push_back(' ');
  }
  return bytes_of(variant);
}

size_t envelope_length(SystemTag system, const EnvelopeParams& params) {
  const crypto::Group& group = crypto::Group::get(params.group);
  if (system == SystemTag::Mixnet) {
    if (params.mix_layers == 0) throw InvalidParamsError("mixnet needs at least one layer");
    return kPlaintextLen + params.mix_layers * crypto::ciphertext_overhead(group);
  }
  // commitment + ciphertext element + OR proof
  return 2 * group.element_size() + crypto::OrProof::serialized_size(group);
}

}  // namespace conscript::wire
