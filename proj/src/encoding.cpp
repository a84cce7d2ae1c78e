#include "qscale/encoding.hpp"

#include <stdexcept>

namespace qscale::encoding {

using namespace protocol;

namespace {

constexpr std::uint32_t max_txs = 1u << 12;
constexpr std::uint32_t max_blob = 1u << 16;
constexpr std::uint32_t max_signers = 1u << 20;

class Writer {
public:
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void hash(const Hash& h) { out_.insert(out_.end(), h.bytes.begin(), h.bytes.end()); }
    void blob(ByteView b)
    {
        u32(static_cast<std::uint32_t>(b.size()));
        out_.insert(out_.end(), b.begin(), b.end());
    }

    void block(const Block& b)
    {
        u64(b.epoch);
        u64(b.height);
        hash(b.parent_hash);
        u32(static_cast<std::uint32_t>(b.txs.size()));
        for (const auto& tx : b.txs) blob(tx);
    }
    void sig(const crypto::Signature& s)
    {
        hash(s.digest);
        u32(static_cast<std::uint32_t>(s.signers.size()));
        for (auto id : s.signers) u32(id);
        hash(s.tag);
    }
    void vrf(const crypto::VrfOutput& v)
    {
        hash(v.value);
        hash(v.proof);
        u32(v.prover);
        blob(v.seed);
    }
    void proposal_body(const Proposal& p)
    {
        block(p.block);
        sig(p.parent_cert.sig);
        vrf(p.vrf);
        u32(p.leader);
    }

    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

struct Truncated {};

class Reader {
public:
    explicit Reader(ByteView in) : in_(in) {}

    bool done() const { return pos_ == in_.size(); }

    std::uint8_t u8()
    {
        need(1);
        return in_[pos_++];
    }
    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * i);
        return v;
    }
    std::uint64_t u64()
    {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * i);
        return v;
    }
    Hash hash()
    {
        need(32);
        Hash h;
        for (auto& b : h.bytes) b = in_[pos_++];
        return h;
    }
    Bytes blob()
    {
        const auto len = u32();
        if (len > max_blob) throw Truncated{};
        need(len);
        Bytes out(in_.begin() + static_cast<std::ptrdiff_t>(pos_), in_.begin() + static_cast<std::ptrdiff_t>(pos_ + len));
        pos_ += len;
        return out;
    }

    Block block()
    {
        Block b;
        b.epoch = u64();
        b.height = u64();
        b.parent_hash = hash();
        const auto n = u32();
        if (n > max_txs) throw Truncated{};
        b.txs.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i) b.txs.push_back(blob());
        return b;
    }
    crypto::Signature sig()
    {
        crypto::Signature s;
        s.digest = hash();
        const auto n = u32();
        if (n > max_signers) throw Truncated{};
        need(4ull * n);
        s.signers.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i) s.signers.push_back(u32());
        s.tag = hash();
        return s;
    }
    crypto::VrfOutput vrf()
    {
        crypto::VrfOutput v;
        v.value = hash();
        v.proof = hash();
        v.prover = u32();
        v.seed = blob();
        return v;
    }

private:
    void need(std::uint64_t n) const
    {
        if (in_.size() - pos_ < n) throw Truncated{};
    }

    ByteView in_;
    std::size_t pos_ = 0;
};

}  // namespace

Bytes encode(const Block& b)
{
    Writer w;
    w.block(b);
    return w.take();
}

Bytes encode_body(const Proposal& p)
{
    Writer w;
    w.u8(tag_propose);
    w.proposal_body(p);
    return w.take();
}

Bytes encode(const Proposal& p)
{
    Writer w;
    w.u8(tag_propose);
    w.proposal_body(p);
    w.sig(p.leader_sig);
    return w.take();
}

Bytes encode(const Vote& v)
{
    Writer w;
    w.u8(tag_vote);
    w.u64(v.epoch);
    w.hash(v.proposal_hash);
    w.u32(v.voter);
    w.sig(v.sig);
    w.vrf(v.vrf);
    return w.take();
}

Bytes encode(const CertifiedAnnounce& c)
{
    Writer w;
    w.u8(tag_certified);
    w.hash(c.proposal_hash);
    w.u64(c.height);
    w.sig(c.cert.sig);
    return w.take();
}

Bytes encode(const Message& m)
{
    Bytes body;
    if (auto p = m.proposal()) body = encode(*p);
    else if (auto v = m.vote()) body = encode(*v);
    else if (auto c = m.announce()) body = encode(*c);
    else throw std::invalid_argument("encode: empty message");
    // kind byte goes after the tag so the tag stays the first byte
    body.insert(body.begin() + 1, static_cast<std::uint8_t>(m.kind));
    return body;
}

std::optional<Message> decode(ByteView bytes)
{
    try {
        Reader r(bytes);
        const auto tag = r.u8();
        const auto kind_byte = r.u8();
        if (kind_byte >= msg_kind_count) return std::nullopt;
        Message m;
        m.kind = static_cast<MsgKind>(kind_byte);

        switch (tag) {
        case tag_propose: {
            if (m.kind != MsgKind::propose && m.kind != MsgKind::disseminate && m.kind != MsgKind::propagate)
                return std::nullopt;
            Proposal p;
            p.block = r.block();
            p.parent_cert.sig = r.sig();
            p.vrf = r.vrf();
            p.leader = r.u32();
            p.leader_sig = r.sig();
            finalize(p);
            m.body = std::make_shared<const Proposal>(std::move(p));
            break;
        }
        case tag_vote: {
            if (m.kind != MsgKind::vote && m.kind != MsgKind::vote_forward) return std::nullopt;
            Vote v;
            v.epoch = r.u64();
            v.proposal_hash = r.hash();
            v.voter = r.u32();
            v.sig = r.sig();
            v.vrf = r.vrf();
            m.body = std::make_shared<const Vote>(std::move(v));
            break;
        }
        case tag_certified: {
            if (m.kind != MsgKind::certified) return std::nullopt;
            CertifiedAnnounce c;
            c.proposal_hash = r.hash();
            c.height = r.u64();
            c.cert.sig = r.sig();
            m.body = std::make_shared<const CertifiedAnnounce>(std::move(c));
            break;
        }
        default:
            return std::nullopt;
        }
        if (!r.done()) return std::nullopt;
        return m;
    } catch (const Truncated&) {
        return std::nullopt;
    }
}

}  // namespace qscale::encoding
