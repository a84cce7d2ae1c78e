#pragma once

#include "qscale/crypto.hpp"

#include <cstdint>
#include <memory>
#include <string_view>
#include <variant>
#include <vector>

namespace qscale::protocol {

using crypto::Bytes;
using crypto::Hash;
using crypto::ProcessId;
using Epoch = std::uint64_t;
using Height = std::uint64_t;
using Round = std::uint64_t;

struct Block {
    Epoch epoch = 0;
    std::vector<Bytes> txs;
    Hash parent_hash;
    Height height = 0;

    bool operator==(const Block&) const = default;
};

Hash block_hash(const Block& b);
Hash txs_digest(const Block& b);

const Block& genesis_block();
const Hash& genesis_hash();

/// Aggregated vote signature over a proposal hash; the signer list is Q.
struct Certificate {
    crypto::MultiSignature sig;

    const std::vector<ProcessId>& signers() const { return sig.signers; }
    const Hash& proposal_hash() const { return sig.digest; }
    bool is_genesis() const;

    bool operator==(const Certificate&) const = default;
};

/// Distinguished certificate accepted only for the genesis block.
const Certificate& genesis_certificate();
/// Stand-in "proposal hash" that the genesis certificate signs.
const Hash& genesis_proposal_hash();

struct Proposal {
    Block block;
    Certificate parent_cert;
    crypto::VrfOutput vrf;
    ProcessId leader = 0;
    crypto::Signature leader_sig;

    // derived from the fields above by finalize()
    Hash block_hash;
    Hash txs_digest;
    Hash body_digest;  // what the leader signs
    Hash hash;         // H(p), what voters sign

    Epoch epoch() const { return block.epoch; }
    Height height() const { return block.height; }
};
using ProposalPtr = std::shared_ptr<const Proposal>;

struct Vote {
    Epoch epoch = 0;
    Hash proposal_hash;
    ProcessId voter = 0;
    crypto::Signature sig;
    crypto::VrfOutput vrf;  // voter VRF over the epoch vote seed
};
using VotePtr = std::shared_ptr<const Vote>;

/// A certificate pushed by a vote-forwarding aggregator.
struct CertifiedAnnounce {
    Hash proposal_hash;
    Height height = 0;
    Certificate cert;
};
using AnnouncePtr = std::shared_ptr<const CertifiedAnnounce>;

enum class MsgKind : std::uint8_t { propose, disseminate, propagate, vote, vote_forward, certified };
inline constexpr std::size_t msg_kind_count = 6;
std::string_view to_string(MsgKind k);

struct Message {
    using Body = std::variant<ProposalPtr, VotePtr, AnnouncePtr>;

    MsgKind kind = MsgKind::propose;
    Body body;

    const Proposal* proposal() const;
    const Vote* vote() const;
    const CertifiedAnnounce* announce() const;
};

struct Envelope {
    ProcessId from = 0;
    ProcessId to = 0;
    Message msg;
};

/// Round-robin leader, 1-based: leader(e) = ((e - 1) mod n) + 1.
ProcessId leader_of(Epoch e, std::uint32_t n);

/// Fills the derived hashes of a proposal from its fields.
void finalize(Proposal& p);
ProposalPtr make_proposal(Block block, Certificate parent_cert, crypto::VrfOutput vrf, ProcessId leader,
                          const crypto::KeyRing& keys);

/// Synthetic transactions: `count` payloads of `size` bytes derived from the
/// epoch, the leader and a salt (the salt lets a leader equivocate).
std::vector<Bytes> make_txs(Epoch e, ProcessId leader, std::uint32_t count, std::uint64_t salt = 0,
                            std::uint32_t size = 250);

// Seeds used for the VRF draws.
Bytes propose_seed(Epoch e);
Bytes disseminate_seed(Epoch e);
Bytes vote_seed(Epoch e);
Bytes propagate_seed(Round r);
Hash voteset_prefix(Epoch e);

}  // namespace qscale::protocol
