#pragma once

#include "qscale/params.hpp"
#include "qscale/protocol/process.hpp"
#include "qscale/size_model.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

namespace qscale::simnet {

using protocol::Epoch;
using protocol::Hash;
using protocol::Height;
using protocol::ProcessId;
using protocol::Round;

enum class PreGstPolicy { drop_to_correct, adversary_chosen_subset, delay_until_gst };
std::string_view to_string(PreGstPolicy p);
PreGstPolicy parse_pre_gst_policy(std::string_view s);

struct Schedule {
    NetworkModel model = NetworkModel::synchronous;
    Round gst_round = 0;  // first round with guaranteed delivery
    PreGstPolicy pre_gst = PreGstPolicy::drop_to_correct;
    double drop_rate = 0.5;

    bool synchronous_at(Round r) const { return model == NetworkModel::synchronous || r >= gst_round; }
};

enum class StrategyKind {
    honest_all,
    silent_leader,
    equivocating_leader,
    vote_suppressing_leader,
    always_voting_byzantine,
    broadcast_proposal_byzantine,
    composite,
};

struct AdversaryStrategy {
    StrategyKind kind = StrategyKind::honest_all;
    std::vector<Epoch> epochs;               // targeted epochs; empty = all
    std::vector<AdversaryStrategy> parts;    // composite only

    static AdversaryStrategy honest() { return {}; }
    static AdversaryStrategy of(StrategyKind k, std::vector<Epoch> epochs = {});
    /// "equivocating-leader", "silent-leader:1-4,9", "a+b" for a composite.
    static AdversaryStrategy parse(std::string_view text);
    std::string name() const;

    bool targets(Epoch e) const;
    protocol::Deviation deviation(ProcessId id, Round r, std::uint32_t n) const;
    /// Leader-side strategy with no epoch list. The corrupted set is then
    /// spread evenly over the leader rotation.
    bool targets_every_leader() const;
    /// Leaders of the explicitly targeted epochs within the first `epochs` epochs.
    std::vector<ProcessId> wanted_leaders(Epoch max_epoch, std::uint32_t n) const;
};

struct SimConfig {
    ProtocolParams params;
    std::uint64_t seed = 1;
    Round rounds = 300;
    Schedule schedule;
    AdversaryStrategy adversary;
    std::vector<ProcessId> corrupted;  // empty: chosen from the seed, |set| = f
    bool shuffle_inboxes = false;
    double fuzz_rate = 0.0;            // share of corrupted-sender messages that get byte-corrupted
    bool check_invariants = true;
    SizeModel size_model = SizeModel::wire();
};

/// Fixes the corrupted set: explicit ids if given; evenly spaced ids for a
/// strategy aimed at every leader; otherwise targeted leaders first and then
/// a seeded draw. Throws when the result does not have f ids.
std::vector<ProcessId> pick_corrupted(const SimConfig& config);

struct RoundRecord {
    Round round = 0;
    Epoch epoch = 0;
    std::array<std::uint64_t, protocol::msg_kind_count> messages{};
    std::array<std::uint64_t, protocol::msg_kind_count> bytes{};
    std::uint64_t dropped = 0;
    std::uint64_t delayed = 0;
    std::uint64_t malformed = 0;
    std::uint32_t certifications = 0;  // new certified blocks at correct processes
    std::uint32_t commits = 0;         // ledger extensions at correct processes

    std::uint64_t total_messages() const;
    std::uint64_t total_bytes() const;
};

struct BlockEvent {
    Round round = 0;
    ProcessId process = 0;
    Hash block;
    Height height = 0;
    Epoch block_epoch = 0;
};

struct RoundTrace {
    std::vector<RoundRecord> rounds;
    std::vector<std::uint64_t> sends_per_process;  // cumulative, index id-1
    std::vector<BlockEvent> first_certifications;  // first correct process to certify each block
    std::vector<BlockEvent> first_commits;         // first correct process to commit each block
    std::vector<ProcessId> corrupted;
    std::uint32_t kappa = 0;

    /// Mean messages per epoch over epochs [first, last] (complete epochs only).
    double messages_per_epoch(Epoch first, Epoch last) const;
    double bytes_per_epoch(Epoch first, Epoch last) const;
};

struct SafetyWitness {
    ProcessId a = 0, b = 0;
    std::vector<Hash> ledger_a, ledger_b;
    Round round = 0;
};

struct SafetyVerdict {
    bool violated = false;
    std::optional<SafetyWitness> witness;
};

struct InvariantReport {
    std::uint64_t votes_checked = 0;
    std::uint64_t certificates_checked = 0;
    std::uint64_t ledgers_checked = 0;
    std::uint64_t double_votes = 0;
    std::uint64_t lock_violations = 0;
    std::uint64_t ledger_regressions = 0;
    std::uint64_t unsound_certificates = 0;
    std::vector<std::string> notes;  // first few violations, human readable

    bool ok() const { return double_votes + lock_violations + ledger_regressions + unsound_certificates == 0; }
};

struct BlockLiveness {
    Hash block;
    Height height = 0;
    Epoch proposed_epoch = 0;
    ProcessId leader = 0;
    bool corrupted_leader = false;
    std::optional<Epoch> certified_epoch;
    std::optional<Epoch> committed_epoch;
};

struct LivenessReport {
    std::vector<BlockLiveness> blocks;  // ordered by proposal epoch, then hash

    /// Share of epochs in [first, last] whose block got certified somewhere.
    double certification_rate(Epoch first, Epoch last) const;
    std::uint64_t commit_count() const;
    double mean_commit_latency() const;  // committed_epoch - proposed_epoch
};

struct RunResult {
    RoundTrace trace;
    SafetyVerdict safety;
    LivenessReport liveness;
    InvariantReport invariants;
    std::vector<Hash> final_state_digests;  // index id-1
};

/// Step-by-step driver; run() below wraps it.
class Simulation {
public:
    explicit Simulation(SimConfig config);

    const SimConfig& config() const { return config_; }
    Round round() const { return round_; }
    bool done() const { return round_ >= config_.rounds; }
    void step();
    void run_to_end();

    const protocol::ProcessState& process(ProcessId id) const { return processes_.at(id - 1); }
    bool is_corrupted(ProcessId id) const { return corrupted_set_.contains(id); }
    const RoundTrace& trace() const { return trace_; }
    const SafetyVerdict& safety() const { return safety_; }
    const InvariantReport& invariants() const { return invariants_; }
    LivenessReport liveness() const;
    RunResult result() const;

private:
    struct BlockInfo {
        Hash parent;
        Height height = 0;
        Epoch epoch = 0;
        ProcessId leader = 0;
        std::optional<Epoch> certified_epoch;
        std::optional<Epoch> committed_epoch;
    };

    void deliver(std::vector<protocol::Envelope>&& out, Round r, RoundRecord& rec);
    void register_block(const protocol::Proposal& p);
    void check_process(ProcessId id, const std::vector<protocol::Envelope>& out, Round r, RoundRecord& rec);
    void check_ledger(ProcessId id, Round r, RoundRecord& rec);
    std::vector<Hash> chain_to(const Hash& tip) const;
    std::optional<Hash> ancestor_at(const Hash& tip, Height h) const;
    void violation(ProcessId a, ProcessId b, Round r);
    void note(std::string s);

    SimConfig config_;
    std::shared_ptr<const protocol::Context> ctx_;
    std::vector<protocol::ProcessState> processes_;
    std::vector<ProcessId> corrupted_;
    std::unordered_set<ProcessId> corrupted_set_;
    std::vector<std::uint8_t> partition_;  // pre-GST side of each correct process
    std::vector<std::vector<protocol::Message>> inbox_;
    std::vector<std::pair<Round, protocol::Envelope>> delayed_;
    std::mt19937_64 net_rng_;
    Round round_ = 0;

    std::unordered_map<Hash, BlockInfo, crypto::HashHasher> blocks_;
    std::vector<Hash> canonical_;  // committed chain by height
    ProcessId canonical_owner_ = 0;
    std::vector<std::optional<protocol::LedgerTip>> tips_;
    std::vector<std::unordered_map<Epoch, Hash>> votes_cast_;

    RoundTrace trace_;
    SafetyVerdict safety_;
    InvariantReport invariants_;
};

RunResult run(const SimConfig& config);

struct Stat {
    double mean = 0.0;
    double variance = 0.0;
    std::size_t count = 0;
};

struct BatchResult {
    std::vector<RunResult> runs;
    Stat certification_rate;
    Stat commit_latency;
    Stat messages_per_epoch;
    std::size_t safety_violations = 0;
};

/// Runs every config (up to `parallelism` at a time); each result equals run(config).
BatchResult run_batch(const std::vector<SimConfig>& configs, unsigned parallelism = 1);

/// Plain propagation experiment: chi of n processes hold a message and, in
/// each of k rounds, every holder sends it to every other process
/// independently with probability p_prop. Returns how many of `trials` ended
/// with all n holding it.
std::uint64_t propagation_trials(std::uint32_t n, std::uint32_t chi, double p_prop, std::uint32_t k,
                                 std::uint64_t trials, std::uint64_t seed);

/// True iff one hash sequence is a prefix of (or equal to) the other.
bool check_prefix(const std::vector<Hash>& a, const std::vector<Hash>& b);
bool check_prefix(const protocol::Ledger& a, const protocol::Ledger& b);

}  // namespace qscale::simnet
