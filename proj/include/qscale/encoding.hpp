#pragma once

#include "qscale/protocol/messages.hpp"

#include <optional>

// Canonical byte form of the protocol objects. Layout is described in
// docs/encoding.md; hashes are taken over these bytes.
namespace qscale::encoding {

using crypto::ByteView;
using crypto::Bytes;

inline constexpr std::uint8_t tag_propose = 1;
inline constexpr std::uint8_t tag_vote = 2;
inline constexpr std::uint8_t tag_certified = 3;

Bytes encode(const protocol::Block& b);
Bytes encode_body(const protocol::Proposal& p);  // everything but the leader signature
Bytes encode(const protocol::Proposal& p);
Bytes encode(const protocol::Vote& v);
Bytes encode(const protocol::CertifiedAnnounce& c);
Bytes encode(const protocol::Message& m);

/// Inverse of encode(Message). Any truncation, trailing garbage, unknown tag
/// or out-of-range length yields nullopt. Derived proposal hashes are
/// recomputed from the decoded fields.
std::optional<protocol::Message> decode(ByteView bytes);

}  // namespace qscale::encoding
