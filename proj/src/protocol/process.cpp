#include "qscale/protocol/process.hpp"

#include <algorithm>
#include <stdexcept>

namespace qscale::protocol {

namespace {

constexpr std::size_t max_pending = 1u << 14;
constexpr std::size_t max_loose_certs = 1u << 12;
constexpr std::size_t max_tx_size = 1u << 12;
constexpr std::size_t max_tx_count = 1u << 10;

bool txs_valid(const Block& b)
{
    if (b.txs.empty() || b.txs.size() > max_tx_count) return false;
    return std::all_of(b.txs.begin(), b.txs.end(), [](const Bytes& tx) { return !tx.empty() && tx.size() <= max_tx_size; });
}

std::vector<ProcessId> with_next_leader(std::vector<ProcessId> members, ProcessId next, ProcessId self)
{
    if (next != 0 && !std::binary_search(members.begin(), members.end(), next))
        members.insert(std::upper_bound(members.begin(), members.end(), next), next);
    std::erase(members, self);
    return members;
}

}  // namespace

std::shared_ptr<const Context> Context::make(const ProtocolParams& params, std::uint64_t master_seed)
{
    auto ctx = std::make_shared<Context>();
    ctx->params = params;
    ctx->keys = std::make_shared<const crypto::KeyRing>(master_seed, params.n);
    return ctx;
}

CertifiedBlock CertifiedBlock::genesis()
{
    CertifiedBlock g;
    g.cert = genesis_certificate();
    g.hash = genesis_hash();
    g.txs = txs_digest(genesis_block());
    return g;
}

std::vector<Hash> Ledger::hashes() const
{
    std::vector<Hash> out;
    out.reserve(chain.size());
    for (const auto& b : chain) out.push_back(b.hash);
    return out;
}

bool height_order_before(Height h1, Epoch e1, const Hash& x1, Height h2, Epoch e2, const Hash& x2)
{
    if (h1 != h2) return h1 > h2;
    if (e1 != e2) return e1 < e2;
    return x1 < x2;
}

ProcessState::ProcessState(ProcessId id, std::shared_ptr<const Context> ctx) : id_(id), ctx_(std::move(ctx))
{
    if (!ctx_ || !ctx_->keys) throw std::invalid_argument("ProcessState: missing context");
    if (!keys().contains(id)) throw std::invalid_argument("ProcessState: id outside [1, n]");
    certified_.emplace(genesis_hash(), CertifiedBlock::genesis());
    certified_by_height_[0].push_back(genesis_hash());
    rooted_[genesis_hash()] = 0;
    best_rooted_ = genesis_hash();
}

Sample ProcessState::get_sample(double prob, crypto::ByteView seed) const
{
    Sample s;
    s.vrf = keys().vrf_prove(id_, seed);
    const crypto::CoinStream coin(s.vrf.value, prob);
    for (ProcessId j = 1; j <= params().n; ++j)
        if (coin(j)) s.members.push_back(j);
    return s;
}

bool ProcessState::cert_valid(const Certificate& cert) const
{
    return cert.signers().size() >= params().q && keys().validate(cert.proposal_hash(), cert.sig);
}

ProposalVerdict ProcessState::check_proposal(const Proposal& p) const
{
    if (proposals_.contains(p.hash)) return ProposalVerdict::duplicate;
    const Block& b = p.block;
    if (b.epoch < 1 || b.height < 1 || !txs_valid(b)) return ProposalVerdict::invalid;
    if (p.leader != leader_of(b.epoch, params().n)) return ProposalVerdict::invalid;
    const ProcessId leader[] = {p.leader};
    if (!keys().validate(p.body_digest, p.leader_sig, leader)) return ProposalVerdict::invalid;

    if (p.parent_cert.is_genesis())
        return b.parent_hash == genesis_hash() && b.height == 1 ? ProposalVerdict::stored : ProposalVerdict::invalid;
    if (!cert_valid(p.parent_cert)) return ProposalVerdict::invalid;

    auto it = proposals_.find(p.parent_cert.proposal_hash());
    if (it == proposals_.end()) return ProposalVerdict::pending;
    const Proposal& parent = *it->second;
    if (parent.block_hash != b.parent_hash || parent.height() + 1 != b.height) return ProposalVerdict::invalid;
    return ProposalVerdict::stored;
}

ProposalVerdict ProcessState::on_propose(const ProposalPtr& p)
{
    if (!p) return ProposalVerdict::invalid;
    const auto verdict = check_proposal(*p);
    if (verdict == ProposalVerdict::pending) {
        auto& slot = pending_[p->parent_cert.proposal_hash()];
        const bool known = std::any_of(slot.begin(), slot.end(), [&](const ProposalPtr& x) { return x->hash == p->hash; });
        if (!known && pending_count_ < max_pending) {
            slot.push_back(p);
            ++pending_count_;
        }
        return verdict;
    }
    if (verdict != ProposalVerdict::stored) return verdict;

    store(p);
    // proposals that were only waiting on this one (or on its descendants)
    while (!release_queue_.empty()) {
        const Hash h = release_queue_.back();
        release_queue_.pop_back();
        auto it = pending_.find(h);
        if (it == pending_.end()) continue;
        auto waiting = std::move(it->second);
        pending_.erase(it);
        pending_count_ -= waiting.size();
        for (const auto& w : waiting)
            if (check_proposal(*w) == ProposalVerdict::stored) store(w);
    }
    return verdict;
}

void ProcessState::store(const ProposalPtr& p)
{
    proposals_.emplace(p->hash, p);
    by_epoch_[p->epoch()].push_back(p);
    if (!max_proposal_
        || height_order_before(p->height(), p->epoch(), p->hash, max_proposal_->height(), max_proposal_->epoch(),
                               max_proposal_->hash))
        max_proposal_ = p;
    fresh_.push_back(p);

    if (!p->parent_cert.is_genesis()) certify(proposals_.at(p->parent_cert.proposal_hash()), p->parent_cert);
    if (auto it = loose_certs_.find(p->hash); it != loose_certs_.end()) {
        certify(p, it->second);
        loose_certs_.erase(it);
    }
    release_queue_.push_back(p->hash);
}

bool ProcessState::certify(const ProposalPtr& p, const Certificate& cert)
{
    if (auto it = certified_.find(p->block_hash); it != certified_.end()) {
        // several valid certificates may arrive; keep the smallest tag so the
        // stored one does not depend on arrival order
        if (cert.sig.tag < it->second.cert.sig.tag) it->second.cert = cert;
        return false;
    }
    CertifiedBlock cb;
    cb.proposal = p;
    cb.cert = cert;
    cb.hash = p->block_hash;
    cb.parent_hash = p->block.parent_hash;
    cb.txs = p->txs_digest;
    cb.height = p->height();
    cb.epoch = p->epoch();
    const Hash h = cb.hash;
    certified_.emplace(h, std::move(cb));
    certified_by_height_[p->height()].push_back(h);
    max_certified_height_ = std::max(max_certified_height_, p->height());
    ++certified_version_;
    certified_events_.push_back(h);

    if (rooted_.contains(p->block.parent_hash)) root_from(h);
    else waiting_children_[p->block.parent_hash].push_back(h);
    return true;
}

void ProcessState::root_from(const Hash& block)
{
    std::vector<Hash> work{block};
    while (!work.empty()) {
        const Hash h = work.back();
        work.pop_back();
        const CertifiedBlock& cb = certified_.at(h);
        const CertifiedBlock& parent = certified_.at(cb.parent_hash);
        const std::uint32_t run = parent.epoch + 1 == cb.epoch ? rooted_.at(cb.parent_hash) + 1 : 1;
        rooted_[h] = run;
        index_rooted(cb, run);
        if (auto it = waiting_children_.find(h); it != waiting_children_.end()) {
            work.insert(work.end(), it->second.begin(), it->second.end());
            waiting_children_.erase(it);
        }
    }
}

void ProcessState::index_rooted(const CertifiedBlock& cb, std::uint32_t run)
{
    const CertifiedBlock& best = certified_.at(best_rooted_);
    if (height_order_before(cb.height, cb.epoch, cb.hash, best.height, best.epoch, best.hash)) best_rooted_ = cb.hash;
    for (auto& [kappa, idx] : kappa_) {
        if (run < kappa) continue;
        const CertifiedBlock* b1 = ancestor(cb, kappa - 1);
        idx.b1.emplace(b1->height, b1->hash);
    }
}

const CertifiedBlock* ProcessState::ancestor(const CertifiedBlock& b, std::uint32_t steps) const
{
    const CertifiedBlock* cur = &b;
    for (std::uint32_t i = 0; i < steps; ++i) cur = &certified_.at(cur->parent_hash);
    return cur;
}

ProcessState::KappaIndex& ProcessState::kappa_index(std::uint32_t kappa)
{
    if (auto it = kappa_.find(kappa); it != kappa_.end()) return it->second;
    KappaIndex idx;
    for (const auto& [h, run] : rooted_) {
        if (run < kappa) continue;
        const CertifiedBlock* b1 = ancestor(certified_.at(h), kappa - 1);
        idx.b1.emplace(b1->height, b1->hash);
    }
    return kappa_.emplace(kappa, std::move(idx)).first->second;
}

bool ProcessState::conflicts_at_height(const CertifiedBlock& b1) const
{
    auto it = certified_by_height_.find(b1.height);
    if (it == certified_by_height_.end()) return false;
    return std::any_of(it->second.begin(), it->second.end(),
                       [&](const Hash& h) { return certified_.at(h).txs != b1.txs; });
}

const CertifiedBlock* ProcessState::best_b1(std::uint32_t kappa)
{
    kappa = std::max<std::uint32_t>(kappa, 1);
    for (const auto& [height, hash] : kappa_index(kappa).b1) {
        const CertifiedBlock& cb = certified_.at(hash);
        if (!conflicts_at_height(cb)) return &cb;
    }
    return nullptr;
}

std::optional<Ledger> ProcessState::get_ledger(std::uint32_t kappa)
{
    const CertifiedBlock* b1 = best_b1(kappa);
    if (!b1) return std::nullopt;
    Ledger out;
    for (const CertifiedBlock* cur = b1;; cur = &certified_.at(cur->parent_hash)) {
        out.chain.push_back(*cur);
        if (cur->height == 0) break;
    }
    std::reverse(out.chain.begin(), out.chain.end());
    return out;
}

std::optional<LedgerTip> ProcessState::ledger_tip(std::uint32_t kappa)
{
    auto& slot = tip_cache_[kappa];
    if (slot.first == certified_version_ + 1) return slot.second;
    const CertifiedBlock* b1 = best_b1(kappa);
    slot.first = certified_version_ + 1;
    slot.second = b1 ? std::optional<LedgerTip>(LedgerTip{b1->hash, b1->height}) : std::nullopt;
    return slot.second;
}

void ProcessState::create_cert(Epoch e)
{
    if (e >= 2) {
        auto vit = votes_.find(e - 1);
        auto pit = by_epoch_.find(e - 1);
        if (vit != votes_.end() && pit != by_epoch_.end()) {
            for (const auto& p : pit->second) {
                auto it = vit->second.find(p->hash);
                if (it == vit->second.end() || it->second.size() < params().q) continue;
                std::vector<crypto::Signature> sigs;
                sigs.reserve(it->second.size());
                for (const auto& [voter, v] : it->second) sigs.push_back(v->sig);
                certify(p, Certificate{crypto::aggregate(sigs)});
            }
        }
    }
    // votes older than the previous epoch can never be used again
    votes_.erase(votes_.begin(), votes_.lower_bound(e >= 1 ? e - 1 : 0));
}

bool ProcessState::can_disseminate(const Proposal& p) const
{
    if (p.vrf.prover != p.leader) return false;
    if (!keys().vrf_verify(propose_seed(p.epoch()), p.vrf)) return false;
    return crypto::CoinStream(p.vrf.value, params().p_sample)(id_);
}

std::pair<bool, crypto::VrfOutput> ProcessState::can_vote(const Proposal& p) const
{
    const auto seed = vote_seed(p.epoch());
    crypto::VrfOutput vrf = keys().vrf_prove(id_, seed);
    if (!crypto::local_coin(vrf.value.bytes, params().p_vote)) return {false, vrf};
    if (p.epoch() != cur_epoch_ || voted_ || !proposals_.contains(p.hash)) return {false, vrf};

    auto is_ancestor = [&](const CertifiedBlock& cb) {
        for (const CertifiedBlock* cur = find_certified(p.block.parent_hash); cur && cur->height >= cb.height;
             cur = cur->height == 0 ? nullptr : find_certified(cur->parent_hash))
            if (cur->hash == cb.hash) return true;
        return false;
    };
    // lock: no certified block at height >= h, ancestors exempt under that rule
    for (auto it = certified_by_height_.lower_bound(p.height()); it != certified_by_height_.end(); ++it) {
        for (const Hash& h : it->second) {
            if (params().lock_rule == LockRule::ancestor_exempt && is_ancestor(certified_.at(h))) continue;
            return {false, vrf};
        }
    }
    if (!rooted_.contains(p.block.parent_hash)) return {false, vrf};
    return {true, vrf};
}

void ProcessState::send(std::vector<Envelope>& out, const std::vector<ProcessId>& dests, MsgKind kind,
                        const Message::Body& body) const
{
    for (ProcessId d : dests) {
        if (d == id_) continue;
        out.push_back(Envelope{id_, d, Message{kind, body}});
    }
}

std::vector<Envelope> ProcessState::propagate() const
{
    std::vector<Envelope> out;
    if (!max_proposal_) return out;
    const Sample s = get_sample(params().p_prop, propagate_seed(cur_round_));
    send(out, s.members, MsgKind::propagate, max_proposal_);
    return out;
}

std::size_t ProcessState::try_to_certify()
{
    std::size_t made = 0;
    for (auto it = loose_certs_.begin(); it != loose_certs_.end();) {
        auto p = proposals_.find(it->first);
        if (p == proposals_.end()) {
            ++it;
            continue;
        }
        made += certify(p->second, it->second);
        it = loose_certs_.erase(it);
    }
    for (const auto& p : fresh_) {
        if (p->parent_cert.is_genesis()) continue;
        if (auto it = proposals_.find(p->parent_cert.proposal_hash()); it != proposals_.end())
            made += certify(it->second, p->parent_cert);
    }
    fresh_.clear();
    return made;
}

bool ProcessState::in_voteset(Epoch e) const
{
    return crypto::CoinStream(voteset_prefix(e), params().p_sample)(id_);
}

bool ProcessState::on_vote(const VotePtr& v)
{
    if (!v) return false;
    const Epoch e = v->epoch;
    if (e != cur_epoch_ || e == 0) return false;
    const bool collector =
        leader_of(e + 1, params().n) == id_ || (params().vote_forwarding && in_voteset(e));
    if (!collector) return false;
    if (!proposals_.contains(v->proposal_hash) || !keys().contains(v->voter)) return false;

    auto& slot = votes_[e][v->proposal_hash];
    if (slot.contains(v->voter)) return false;
    const ProcessId voter[] = {v->voter};
    if (!keys().validate(v->proposal_hash, v->sig, voter)) return false;
    if (params().verify_vote_vrf) {
        if (v->vrf.prover != v->voter || !keys().vrf_verify(vote_seed(e), v->vrf)) return false;
        if (!crypto::local_coin(v->vrf.value.bytes, params().p_vote)) return false;
    }
    slot.emplace(v->voter, v);
    return true;
}

bool ProcessState::on_announce(const AnnouncePtr& c)
{
    if (!c || c->cert.is_genesis() || c->cert.proposal_hash() != c->proposal_hash) return false;
    if (!cert_valid(c->cert)) return false;
    if (auto it = proposals_.find(c->proposal_hash); it != proposals_.end()) {
        if (it->second->height() != c->height) return false;
        return certify(it->second, c->cert);
    }
    if (loose_certs_.size() >= max_loose_certs) return false;
    return loose_certs_.emplace(c->proposal_hash, c->cert).second;
}

std::vector<Envelope> ProcessState::step_round(Round r, std::span<const Message> inbox, const Deviation& dev)
{
    if (r <= cur_round_)
        throw std::logic_error("step_round: round " + std::to_string(r) + " after round " + std::to_string(cur_round_));

    // Deliveries are handled by type so that arrival order inside the batch
    // cannot change the outcome.
    for (const auto& m : inbox)
        if (auto p = std::get_if<ProposalPtr>(&m.body)) on_propose(*p);
    for (const auto& m : inbox)
        if (auto c = std::get_if<AnnouncePtr>(&m.body)) on_announce(*c);
    for (const auto& m : inbox)
        if (auto v = std::get_if<VotePtr>(&m.body)) on_vote(*v);

    cur_round_ = r;
    const Epoch e = (r + 2) / 3;
    if (e != cur_epoch_) {
        cur_epoch_ = e;
        voted_ = false;
    }

    std::vector<Envelope> out = propagate();
    try_to_certify();

    std::vector<Envelope> phase;
    switch (r % 3) {
    case 1:
        if (params().vote_forwarding && e >= 2 && leader_of(e, params().n) != id_ && in_voteset(e - 1))
            phase = aggregate_forwarded(e - 1);
        if (leader_of(e, params().n) == id_) {
            auto prop = do_propose(e, dev);
            phase.insert(phase.end(), prop.begin(), prop.end());
        }
        break;
    case 2: phase = do_disseminate(e); break;
    default: phase = do_vote(e, dev); break;
    }
    out.insert(out.end(), std::make_move_iterator(phase.begin()), std::make_move_iterator(phase.end()));
    return out;
}

std::vector<Envelope> ProcessState::do_propose(Epoch e, const Deviation& dev)
{
    std::vector<Envelope> out;
    if (!dev.skip_create_cert) create_cert(e);
    if (dev.silent_propose) return out;

    const CertifiedBlock& parent = certified_.at(best_rooted_);
    const ProcessId next = leader_of(e + 1, params().n);
    Sample s = get_sample(params().p_sample, propose_seed(e));

    auto build = [&](std::uint64_t salt) {
        Block b;
        b.epoch = e;
        b.txs = make_txs(e, id_, params().txs_per_block, salt);
        b.parent_hash = parent.hash;
        b.height = parent.height + 1;
        return make_proposal(std::move(b), parent.cert, s.vrf, id_, keys());
    };

    const ProposalPtr p = build(0);
    on_propose(p);
    std::vector<ProcessId> dests;
    if (dev.broadcast_proposal) {
        for (ProcessId j = 1; j <= params().n; ++j) dests.push_back(j);
    } else {
        dests = with_next_leader(s.members, next, id_);
    }
    send(out, dests, MsgKind::propose, p);

    if (dev.equivocate) {
        const ProposalPtr p2 = build(1);
        on_propose(p2);
        const Hash alt = crypto::Hasher().update(s.vrf.value).update("equivocate").digest();
        const crypto::CoinStream coin(alt, params().p_sample);
        std::vector<ProcessId> second;
        for (ProcessId j = 1; j <= params().n; ++j)
            if (coin(j)) second.push_back(j);
        send(out, with_next_leader(std::move(second), next, id_), MsgKind::propose, p2);
    }
    return out;
}

std::vector<Envelope> ProcessState::do_disseminate(Epoch e)
{
    std::vector<Envelope> out;
    std::optional<Sample> fresh;
    for (const auto& p : proposals_in_epoch(e)) {
        if (!can_disseminate(*p)) continue;
        if (!fresh) fresh = get_sample(params().p_sample, disseminate_seed(e));
        send(out, with_next_leader(fresh->members, leader_of(e + 1, params().n), id_), MsgKind::disseminate, p);
    }
    return out;
}

std::vector<Envelope> ProcessState::do_vote(Epoch e, const Deviation& dev)
{
    std::vector<Envelope> out;
    const auto props = proposals_in_epoch(e);
    const ProcessId next = leader_of(e + 1, params().n);

    auto emit = [&](const ProposalPtr& p, const crypto::VrfOutput& vrf) {
        auto v = std::make_shared<Vote>();
        v->epoch = e;
        v->proposal_hash = p->hash;
        v->voter = id_;
        v->sig = keys().sign(id_, p->hash);
        v->vrf = vrf;
        const VotePtr vote = std::move(v);
        vote_log_.push_back(VoteRecord{e, p->hash, p->height(), max_certified_height_});
        voted_ = true;

        if (next == id_) on_vote(vote);
        else send(out, {next}, MsgKind::vote, vote);

        if (params().vote_forwarding) {
            const crypto::CoinStream coin(voteset_prefix(e), params().p_sample);
            std::vector<ProcessId> set;
            for (ProcessId j = 1; j <= params().n; ++j)
                if (j != next && coin(j)) set.push_back(j);
            if (std::erase(set, id_) > 0) on_vote(vote);
            send(out, set, MsgKind::vote_forward, vote);
        }
    };

    if (dev.always_vote) {
        const crypto::VrfOutput vrf = keys().vrf_prove(id_, vote_seed(e));
        if (!crypto::local_coin(vrf.value.bytes, params().p_vote)) return out;
        for (const auto& p : props) emit(p, vrf);
        return out;
    }

    // a candidate holds exactly one valid proposal for the epoch
    if (props.size() != 1) return out;
    auto [ok, vrf] = can_vote(*props.front());
    if (ok) emit(props.front(), vrf);
    return out;
}

std::vector<Envelope> ProcessState::aggregate_forwarded(Epoch e)
{
    std::vector<Envelope> out;
    auto vit = votes_.find(e);
    if (vit == votes_.end()) return out;
    for (const auto& p : proposals_in_epoch(e)) {
        auto it = vit->second.find(p->hash);
        if (it == vit->second.end() || it->second.size() < params().q) continue;
        std::vector<crypto::Signature> sigs;
        for (const auto& [voter, v] : it->second) sigs.push_back(v->sig);
        Certificate cert{crypto::aggregate(sigs)};
        if (!certify(p, cert)) continue;
        auto ann = std::make_shared<const CertifiedAnnounce>(CertifiedAnnounce{p->hash, p->height(), cert});
        const Sample s = get_sample(params().p_prop, crypto::seed_of(e, "announce"));
        send(out, s.members, MsgKind::certified, ann);
    }
    return out;
}

const CertifiedBlock* ProcessState::find_certified(const Hash& block) const
{
    auto it = certified_.find(block);
    return it == certified_.end() ? nullptr : &it->second;
}

const CertifiedBlock& ProcessState::max_height_certified() const
{
    return certified_.at(best_rooted_);
}

std::size_t ProcessState::vote_count(Epoch e, const Hash& proposal) const
{
    auto it = votes_.find(e);
    if (it == votes_.end()) return 0;
    auto jt = it->second.find(proposal);
    return jt == it->second.end() ? 0 : jt->second.size();
}

std::vector<ProposalPtr> ProcessState::proposals_in_epoch(Epoch e) const
{
    auto it = by_epoch_.find(e);
    if (it == by_epoch_.end()) return {};
    auto out = it->second;
    std::sort(out.begin(), out.end(), [](const ProposalPtr& a, const ProposalPtr& b) { return a->hash < b->hash; });
    return out;
}

Hash ProcessState::state_digest() const
{
    auto sorted_keys = [](const auto& map) {
        std::vector<Hash> keys;
        keys.reserve(map.size());
        for (const auto& kv : map) keys.push_back(kv.first);
        std::sort(keys.begin(), keys.end());
        return keys;
    };

    crypto::Hasher h;
    h.update_u32(id_).update_u64(cur_round_).update_u64(cur_epoch_).update_u32(voted_ ? 1 : 0);
    for (const Hash& k : sorted_keys(proposals_)) h.update(k);
    h.update("certified");
    for (const Hash& k : sorted_keys(certified_)) h.update(k).update(certified_.at(k).cert.sig.tag);
    h.update("votes");
    for (const auto& [e, per] : votes_) {
        for (const Hash& k : sorted_keys(per)) {
            h.update_u64(e).update(k);
            for (const auto& [voter, v] : per.at(k)) h.update_u32(voter);
        }
    }
    h.update("pending");
    std::vector<Hash> pend;
    for (const auto& [k, list] : pending_)
        for (const auto& p : list) pend.push_back(p->hash);
    std::sort(pend.begin(), pend.end());
    for (const Hash& k : pend) h.update(k);
    h.update("loose");
    for (const Hash& k : sorted_keys(loose_certs_)) h.update(k);
    h.update("log");
    for (const auto& r : vote_log_) h.update_u64(r.epoch).update(r.proposal_hash);
    return h.digest();
}

}  // namespace qscale::protocol
