#pragma once

#include "qscale/params.hpp"
#include "qscale/protocol/messages.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

namespace qscale::protocol {

struct Context {
    ProtocolParams params;
    std::shared_ptr<const crypto::KeyRing> keys;

    static std::shared_ptr<const Context> make(const ProtocolParams& params, std::uint64_t master_seed);
};

struct CertifiedBlock {
    ProposalPtr proposal;  // null for genesis
    Certificate cert;
    Hash hash;
    Hash parent_hash;
    Hash txs;
    Height height = 0;
    Epoch epoch = 0;

    const Block& block() const { return proposal ? proposal->block : genesis_block(); }
    static CertifiedBlock genesis();
};

struct Ledger {
    std::vector<CertifiedBlock> chain;  // genesis first

    Height height() const { return chain.empty() ? 0 : chain.back().height; }
    std::vector<Hash> hashes() const;
};

struct LedgerTip {
    Hash hash;
    Height height = 0;

    bool operator==(const LedgerTip&) const = default;
};

/// Behaviour changes applied to a corrupted process for one step. A correct
/// process always steps with the default (all false).
struct Deviation {
    bool silent_propose = false;
    bool equivocate = false;
    bool skip_create_cert = false;
    bool always_vote = false;
    bool broadcast_proposal = false;

    bool any() const { return silent_propose || equivocate || skip_create_cert || always_vote || broadcast_proposal; }
};

struct VoteRecord {
    Epoch epoch = 0;
    Hash proposal_hash;
    Height height = 0;
    Height max_certified_height = 0;  // at vote time
};

enum class ProposalVerdict { stored, duplicate, invalid, pending };

struct Sample {
    std::vector<ProcessId> members;
    crypto::VrfOutput vrf;
};

class ProcessState {
public:
    ProcessState(ProcessId id, std::shared_ptr<const Context> ctx);

    ProcessId id() const { return id_; }
    const ProtocolParams& params() const { return ctx_->params; }
    const crypto::KeyRing& keys() const { return *ctx_->keys; }
    Round cur_round() const { return cur_round_; }
    Epoch cur_epoch() const { return cur_epoch_; }
    bool voted() const { return voted_; }

    // Algorithm operations
    Sample get_sample(double prob, crypto::ByteView seed) const;
    ProposalVerdict check_proposal(const Proposal& p) const;
    bool valid_proposal(const Proposal& p) const { return check_proposal(p) == ProposalVerdict::stored; }
    void create_cert(Epoch e);
    bool can_disseminate(const Proposal& p) const;
    std::pair<bool, crypto::VrfOutput> can_vote(const Proposal& p) const;
    std::vector<Envelope> step_round(Round r, std::span<const Message> inbox, const Deviation& dev = {});
    ProposalVerdict on_propose(const ProposalPtr& p);
    bool on_vote(const VotePtr& v);
    bool on_announce(const AnnouncePtr& c);
    std::size_t try_to_certify();
    std::vector<Envelope> propagate() const;
    std::optional<Ledger> get_ledger(std::uint32_t kappa);
    std::optional<LedgerTip> ledger_tip(std::uint32_t kappa);

    // Inspection
    const std::unordered_map<Hash, ProposalPtr, crypto::HashHasher>& proposals() const { return proposals_; }
    const std::unordered_map<Hash, CertifiedBlock, crypto::HashHasher>& certified() const { return certified_; }
    const CertifiedBlock* find_certified(const Hash& block) const;
    bool is_rooted(const Hash& block) const { return rooted_.contains(block); }
    std::size_t vote_count(Epoch e, const Hash& proposal) const;
    std::vector<ProposalPtr> proposals_in_epoch(Epoch e) const;
    ProposalPtr max_height_proposal() const { return max_proposal_; }
    const CertifiedBlock& max_height_certified() const;
    Height max_certified_height() const { return max_certified_height_; }
    std::uint64_t certified_version() const { return certified_version_; }
    std::size_t pending_count() const { return pending_count_; }
    const std::vector<VoteRecord>& vote_log() const { return vote_log_; }
    std::vector<Hash> take_certified_events() { return std::exchange(certified_events_, {}); }
    bool in_voteset(Epoch e) const;

    /// Digest over every observable piece of state, for equality checks.
    Hash state_digest() const;

private:
    struct KappaIndex {
        // candidate B_1 blocks, highest first
        std::set<std::pair<Height, Hash>, std::greater<>> b1;
    };

    void store(const ProposalPtr& p);
    bool certify(const ProposalPtr& p, const Certificate& cert);
    void root_from(const Hash& block);
    void index_rooted(const CertifiedBlock& cb, std::uint32_t run);
    bool cert_valid(const Certificate& cert) const;
    bool conflicts_at_height(const CertifiedBlock& b1) const;
    const CertifiedBlock* ancestor(const CertifiedBlock& b, std::uint32_t steps) const;
    KappaIndex& kappa_index(std::uint32_t kappa);
    const CertifiedBlock* best_b1(std::uint32_t kappa);

    std::vector<Envelope> do_propose(Epoch e, const Deviation& dev);
    std::vector<Envelope> do_disseminate(Epoch e);
    std::vector<Envelope> do_vote(Epoch e, const Deviation& dev);
    std::vector<Envelope> aggregate_forwarded(Epoch e);
    void send(std::vector<Envelope>& out, const std::vector<ProcessId>& dests, MsgKind kind, const Message::Body& body) const;

    ProcessId id_;
    std::shared_ptr<const Context> ctx_;
    Round cur_round_ = 0;
    Epoch cur_epoch_ = 0;
    bool voted_ = false;

    std::unordered_map<Hash, ProposalPtr, crypto::HashHasher> proposals_;
    std::map<Epoch, std::vector<ProposalPtr>> by_epoch_;
    ProposalPtr max_proposal_;
    std::unordered_map<Hash, std::vector<ProposalPtr>, crypto::HashHasher> pending_;  // keyed by parent proposal hash
    std::size_t pending_count_ = 0;
    std::vector<ProposalPtr> fresh_;  // stored since the last try_to_certify

    std::map<Epoch, std::unordered_map<Hash, std::map<ProcessId, VotePtr>, crypto::HashHasher>> votes_;
    std::unordered_map<Hash, Certificate, crypto::HashHasher> loose_certs_;

    std::unordered_map<Hash, CertifiedBlock, crypto::HashHasher> certified_;
    std::map<Height, std::vector<Hash>> certified_by_height_;
    std::unordered_map<Hash, std::vector<Hash>, crypto::HashHasher> waiting_children_;
    std::unordered_map<Hash, std::uint32_t, crypto::HashHasher> rooted_;  // block -> consecutive-epoch run length
    Hash best_rooted_;
    Height max_certified_height_ = 0;
    std::uint64_t certified_version_ = 0;
    std::vector<Hash> certified_events_;
    std::map<std::uint32_t, KappaIndex> kappa_;
    std::map<std::uint32_t, std::pair<std::uint64_t, std::optional<LedgerTip>>> tip_cache_;
    std::vector<Hash> release_queue_;

    std::vector<VoteRecord> vote_log_;
};

/// Free-function forms of the per-process operations.
inline std::vector<Envelope> step_round(ProcessState& s, Round r, std::span<const Message> inbox,
                                        const Deviation& dev = {})
{
    return s.step_round(r, inbox, dev);
}
inline std::optional<Ledger> get_ledger(ProcessState& s, std::uint32_t kappa) { return s.get_ledger(kappa); }

/// Max-height ordering with ties broken by smaller epoch, then smaller hash.
/// True iff (h1, e1, x1) comes first.
bool height_order_before(Height h1, Epoch e1, const Hash& x1, Height h2, Epoch e2, const Hash& x2);

}  // namespace qscale::protocol
