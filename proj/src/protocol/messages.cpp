#include "qscale/protocol/messages.hpp"

#include "qscale/encoding.hpp"

namespace qscale::protocol {

Hash block_hash(const Block& b)
{
    return crypto::hash_bytes(encoding::encode(b));
}

Hash txs_digest(const Block& b)
{
    crypto::Hasher h;
    h.update("txs").update_u32(static_cast<std::uint32_t>(b.txs.size()));
    for (const auto& tx : b.txs) h.update_u32(static_cast<std::uint32_t>(tx.size())).update(tx);
    return h.digest();
}

const Block& genesis_block()
{
    static const Block g{};
    return g;
}

const Hash& genesis_hash()
{
    static const Hash h = block_hash(genesis_block());
    return h;
}

const Hash& genesis_proposal_hash()
{
    static const Hash h = crypto::hash_string("qscale/genesis-proposal");
    return h;
}

const Certificate& genesis_certificate()
{
    static const Certificate c{crypto::MultiSignature{genesis_proposal_hash(), {}, crypto::hash_string("qscale/genesis-cert")}};
    return c;
}

bool Certificate::is_genesis() const
{
    return *this == genesis_certificate();
}

std::string_view to_string(MsgKind k)
{
    switch (k) {
    case MsgKind::propose: return "propose";
    case MsgKind::disseminate: return "disseminate";
    case MsgKind::propagate: return "propagate";
    case MsgKind::vote: return "vote";
    case MsgKind::vote_forward: return "vote_forward";
    case MsgKind::certified: return "certified";
    }
    return "?";
}

const Proposal* Message::proposal() const
{
    auto p = std::get_if<ProposalPtr>(&body);
    return p ? p->get() : nullptr;
}

const Vote* Message::vote() const
{
    auto p = std::get_if<VotePtr>(&body);
    return p ? p->get() : nullptr;
}

const CertifiedAnnounce* Message::announce() const
{
    auto p = std::get_if<AnnouncePtr>(&body);
    return p ? p->get() : nullptr;
}

ProcessId leader_of(Epoch e, std::uint32_t n)
{
    if (e == 0 || n == 0) return 0;
    return static_cast<ProcessId>((e - 1) % n) + 1;
}

void finalize(Proposal& p)
{
    p.block_hash = block_hash(p.block);
    p.txs_digest = txs_digest(p.block);
    p.body_digest = crypto::hash_bytes(encoding::encode_body(p));
    p.hash = crypto::hash_bytes(encoding::encode(p));
}

ProposalPtr make_proposal(Block block, Certificate parent_cert, crypto::VrfOutput vrf, ProcessId leader,
                          const crypto::KeyRing& keys)
{
    Proposal p;
    p.block = std::move(block);
    p.parent_cert = std::move(parent_cert);
    p.vrf = std::move(vrf);
    p.leader = leader;
    p.body_digest = crypto::hash_bytes(encoding::encode_body(p));
    p.leader_sig = keys.sign(leader, p.body_digest);
    finalize(p);
    return std::make_shared<const Proposal>(std::move(p));
}

std::vector<Bytes> make_txs(Epoch e, ProcessId leader, std::uint32_t count, std::uint64_t salt, std::uint32_t size)
{
    std::vector<Bytes> out(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Bytes& tx = out[i];
        tx.resize(size);
        crypto::Hasher base;
        base.update("tx").update_u64(e).update_u32(leader).update_u64(salt).update_u32(i);
        for (std::uint32_t off = 0, block = 0; off < size; off += 32, ++block) {
            const Hash h = crypto::Hasher(base).update_u32(block).digest();
            for (std::uint32_t b = 0; b < 32 && off + b < size; ++b) tx[off + b] = h.bytes[b];
        }
    }
    return out;
}

Bytes propose_seed(Epoch e) { return crypto::seed_of(e, "propose"); }
Bytes disseminate_seed(Epoch e) { return crypto::seed_of(e, "disseminate"); }
Bytes vote_seed(Epoch e) { return crypto::seed_of(e, "vote"); }
Bytes propagate_seed(Round r) { return crypto::seed_of(r, "propagate"); }

Hash voteset_prefix(Epoch e)
{
    return crypto::hash_bytes(crypto::seed_of(e, "voteset"));
}

}  // namespace qscale::protocol
