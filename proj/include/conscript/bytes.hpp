#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace conscript {

using Bytes = std::vector<uint8_t>;
using BytesView = std::span<const uint8_t>;

// Lowercase hex, two digits per byte.
std::string to_hex(BytesView data);

// Accepts upper- and lowercase digits; throws std::invalid_argument on
// odd length or non-hex characters. Canonicality (lowercase-only) is
// enforced one level up, by re-encoding.
Bytes from_hex(std::string_view hex);

Bytes bytes_of(std::string_view s);
std::string string_of(BytesView b);

void append(Bytes& out, BytesView part);
void append_u32_be(Bytes& out, uint32_t v);
void append_u64_be(Bytes& out, uint64_t v);
Bytes concat(std::initializer_list<BytesView> parts);

Bytes sha256(BytesView data);

// Fixed-point decimal rendering ("0.041250"), locale-independent, used for
// byte-stable report fields.
std::string format_fixed(double value, int digits);

inline bool bytes_equal(BytesView a, BytesView b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

inline BytesView view(const Bytes& b) { return BytesView(b); }

}  // namespace conscript
