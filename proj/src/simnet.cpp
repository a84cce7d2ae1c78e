#include "qscale/simnet.hpp"

#include "qscale/encoding.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace qscale::simnet {

using namespace protocol;

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::string_view label, std::uint64_t a = 0, std::uint64_t b = 0)
{
    return crypto::Hasher().update("qscale/sim").update_u64(seed).update(label).update_u64(a).update_u64(b).digest64();
}

std::size_t kind_index(MsgKind k) { return static_cast<std::size_t>(k); }

Epoch epoch_of(Round r) { return (r + 2) / 3; }

std::vector<Epoch> parse_epochs(std::string_view list)
{
    std::vector<Epoch> out;
    while (!list.empty()) {
        const auto comma = list.find(',');
        const std::string item(list.substr(0, comma));
        list = comma == std::string_view::npos ? std::string_view{} : list.substr(comma + 1);
        if (item.empty()) continue;
        const auto dash = item.find('-');
        try {
            if (dash == std::string::npos) {
                out.push_back(std::stoull(item));
            } else {
                const Epoch lo = std::stoull(item.substr(0, dash)), hi = std::stoull(item.substr(dash + 1));
                if (hi < lo || hi - lo > 1'000'000) throw std::invalid_argument("range");
                for (Epoch e = lo; e <= hi; ++e) out.push_back(e);
            }
        } catch (const std::exception&) {
            throw std::invalid_argument("bad epoch list item '" + item + "'");
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

struct KindName {
    StrategyKind kind;
    std::string_view name;
};
constexpr KindName kind_names[] = {
    {StrategyKind::honest_all, "honest-all"},
    {StrategyKind::silent_leader, "silent-leader"},
    {StrategyKind::equivocating_leader, "equivocating-leader"},
    {StrategyKind::vote_suppressing_leader, "vote-suppressing-leader"},
    {StrategyKind::always_voting_byzantine, "always-voting-byzantine"},
    {StrategyKind::broadcast_proposal_byzantine, "broadcast-proposal-byzantine"},
    {StrategyKind::composite, "composite"},
};

bool leader_kind(StrategyKind k)
{
    return k == StrategyKind::silent_leader || k == StrategyKind::equivocating_leader
        || k == StrategyKind::vote_suppressing_leader || k == StrategyKind::broadcast_proposal_byzantine;
}

void add_stat(Stat& s, const std::vector<double>& xs)
{
    s.count = xs.size();
    if (xs.empty()) return;
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.variance = ss / static_cast<double>(xs.size() - 1);
    }
}

}  // namespace

std::string_view to_string(PreGstPolicy p)
{
    switch (p) {
    case PreGstPolicy::drop_to_correct: return "drop-to-correct";
    case PreGstPolicy::adversary_chosen_subset: return "adversary-chosen-subset";
    case PreGstPolicy::delay_until_gst: return "delay-until-gst";
    }
    return "?";
}

PreGstPolicy parse_pre_gst_policy(std::string_view s)
{
    for (auto p : {PreGstPolicy::drop_to_correct, PreGstPolicy::adversary_chosen_subset, PreGstPolicy::delay_until_gst})
        if (s == to_string(p)) return p;
    throw std::invalid_argument("unknown pre-GST policy '" + std::string(s) + "'");
}

AdversaryStrategy AdversaryStrategy::of(StrategyKind k, std::vector<Epoch> epochs)
{
    AdversaryStrategy s;
    s.kind = k;
    s.epochs = std::move(epochs);
    return s;
}

AdversaryStrategy AdversaryStrategy::parse(std::string_view text)
{
    if (text.starts_with("composite:")) text.remove_prefix(10);
    if (text.find('+') != std::string_view::npos) {
        AdversaryStrategy c;
        c.kind = StrategyKind::composite;
        while (!text.empty()) {
            const auto plus = text.find('+');
            c.parts.push_back(parse(text.substr(0, plus)));
            text = plus == std::string_view::npos ? std::string_view{} : text.substr(plus + 1);
        }
        return c;
    }
    std::string name(text.substr(0, text.find(':')));
    std::replace(name.begin(), name.end(), '_', '-');
    for (const auto& kn : kind_names) {
        if (kn.name != name || kn.kind == StrategyKind::composite) continue;
        AdversaryStrategy s;
        s.kind = kn.kind;
        if (const auto colon = text.find(':'); colon != std::string_view::npos) s.epochs = parse_epochs(text.substr(colon + 1));
        return s;
    }
    throw std::invalid_argument("unknown adversary strategy '" + std::string(text) + "'");
}

std::string AdversaryStrategy::name() const
{
    if (kind == StrategyKind::composite) {
        std::string out = "composite:";
        for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? "+" : "") + parts[i].name();
        return out;
    }
    std::string out;
    for (const auto& kn : kind_names)
        if (kn.kind == kind) out = std::string(kn.name);
    if (!epochs.empty()) {
        out += ':';
        for (std::size_t i = 0; i < epochs.size(); ++i) out += (i ? "," : "") + std::to_string(epochs[i]);
    }
    return out;
}

bool AdversaryStrategy::targets(Epoch e) const
{
    return epochs.empty() || std::binary_search(epochs.begin(), epochs.end(), e);
}

Deviation AdversaryStrategy::deviation(ProcessId id, Round r, std::uint32_t n) const
{
    Deviation d;
    const Epoch e = epoch_of(r);
    const bool leading = leader_of(e, n) == id && targets(e);
    switch (kind) {
    case StrategyKind::honest_all: break;
    case StrategyKind::silent_leader: d.silent_propose = leading; break;
    case StrategyKind::equivocating_leader: d.equivocate = leading; break;
    case StrategyKind::vote_suppressing_leader: d.skip_create_cert = leading; break;
    case StrategyKind::always_voting_byzantine: d.always_vote = true; break;
    case StrategyKind::broadcast_proposal_byzantine: d.broadcast_proposal = leading; break;
    case StrategyKind::composite:
        for (const auto& part : parts) {
            const Deviation p = part.deviation(id, r, n);
            d.silent_propose |= p.silent_propose;
            d.equivocate |= p.equivocate;
            d.skip_create_cert |= p.skip_create_cert;
            d.always_vote |= p.always_vote;
            d.broadcast_proposal |= p.broadcast_proposal;
        }
        break;
    }
    return d;
}

bool AdversaryStrategy::targets_every_leader() const
{
    if (kind == StrategyKind::composite)
        return std::any_of(parts.begin(), parts.end(), [](const AdversaryStrategy& p) { return p.targets_every_leader(); });
    return leader_kind(kind) && epochs.empty();
}

std::vector<ProcessId> AdversaryStrategy::wanted_leaders(Epoch max_epoch, std::uint32_t n) const
{
    std::vector<ProcessId> out;
    if (kind == StrategyKind::composite) {
        for (const auto& part : parts) {
            auto w = part.wanted_leaders(max_epoch, n);
            out.insert(out.end(), w.begin(), w.end());
        }
        return out;
    }
    if (!leader_kind(kind)) return out;
    for (Epoch e : epochs)
        if (e >= 1 && e <= max_epoch) out.push_back(leader_of(e, n));
    return out;
}

std::vector<ProcessId> pick_corrupted(const SimConfig& config)
{
    const auto n = config.params.n;
    const auto f = config.params.f;
    std::vector<ProcessId> out;
    if (!config.corrupted.empty()) {
        out = config.corrupted;
        std::sort(out.begin(), out.end());
        if (std::adjacent_find(out.begin(), out.end()) != out.end())
            throw std::invalid_argument("corrupted set has duplicate ids");
        if (out.front() < 1 || out.back() > n) throw std::invalid_argument("corrupted id outside [1, n]");
        if (out.size() != f)
            throw std::invalid_argument("corrupted set has " + std::to_string(out.size()) + " ids but f = " + std::to_string(f));
        return out;
    }
    if (config.adversary.targets_every_leader() && f > 0) {
        // evenly spaced over the rotation: the fewest consecutive honest leaders
        for (std::uint32_t i = 0; i < f; ++i)
            out.push_back(static_cast<ProcessId>(1 + static_cast<std::uint64_t>(i) * n / f));
        return out;
    }
    for (ProcessId id : config.adversary.wanted_leaders((config.rounds + 2) / 3, n)) {
        if (out.size() >= f) break;
        if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    }
    std::vector<ProcessId> rest;
    for (ProcessId id = 1; id <= n; ++id)
        if (std::find(out.begin(), out.end(), id) == out.end()) rest.push_back(id);
    std::mt19937_64 rng(derive_seed(config.seed, "corrupted"));
    std::shuffle(rest.begin(), rest.end(), rng);
    for (std::size_t i = 0; out.size() < f && i < rest.size(); ++i) out.push_back(rest[i]);
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t RoundRecord::total_messages() const
{
    return std::accumulate(messages.begin(), messages.end(), std::uint64_t{0});
}

std::uint64_t RoundRecord::total_bytes() const
{
    return std::accumulate(bytes.begin(), bytes.end(), std::uint64_t{0});
}

double RoundTrace::messages_per_epoch(Epoch first, Epoch last) const
{
    if (last < first) return 0.0;
    std::uint64_t total = 0;
    for (const auto& r : rounds)
        if (r.epoch >= first && r.epoch <= last) total += r.total_messages();
    return static_cast<double>(total) / static_cast<double>(last - first + 1);
}

double RoundTrace::bytes_per_epoch(Epoch first, Epoch last) const
{
    if (last < first) return 0.0;
    std::uint64_t total = 0;
    for (const auto& r : rounds)
        if (r.epoch >= first && r.epoch <= last) total += r.total_bytes();
    return static_cast<double>(total) / static_cast<double>(last - first + 1);
}

double LivenessReport::certification_rate(Epoch first, Epoch last) const
{
    if (last < first) return 0.0;
    std::vector<bool> hit(last - first + 1, false);
    for (const auto& b : blocks)
        if (b.certified_epoch && b.proposed_epoch >= first && b.proposed_epoch <= last) hit[b.proposed_epoch - first] = true;
    return static_cast<double>(std::count(hit.begin(), hit.end(), true)) / static_cast<double>(hit.size());
}

std::uint64_t LivenessReport::commit_count() const
{
    return static_cast<std::uint64_t>(
        std::count_if(blocks.begin(), blocks.end(), [](const BlockLiveness& b) { return b.committed_epoch.has_value(); }));
}

double LivenessReport::mean_commit_latency() const
{
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& b : blocks) {
        if (!b.committed_epoch) continue;
        sum += static_cast<double>(*b.committed_epoch - b.proposed_epoch);
        ++count;
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

Simulation::Simulation(SimConfig config) : config_(std::move(config))
{
    require_valid(config_.params);
    if (!(config_.fuzz_rate >= 0.0 && config_.fuzz_rate <= 1.0)) throw std::invalid_argument("fuzz_rate outside [0, 1]");
    if (!(config_.schedule.drop_rate >= 0.0 && config_.schedule.drop_rate <= 1.0))
        throw std::invalid_argument("drop_rate outside [0, 1]");
    const auto n = config_.params.n;
    ctx_ = Context::make(config_.params, config_.seed);
    corrupted_ = pick_corrupted(config_);
    corrupted_set_.insert(corrupted_.begin(), corrupted_.end());

    processes_.reserve(n);
    for (ProcessId id = 1; id <= n; ++id) processes_.emplace_back(id, ctx_);
    inbox_.resize(n);
    tips_.resize(n);
    votes_cast_.resize(n);

    std::vector<ProcessId> correct;
    for (ProcessId id = 1; id <= n; ++id)
        if (!is_corrupted(id)) correct.push_back(id);
    std::mt19937_64 prng(derive_seed(config_.seed, "partition"));
    std::shuffle(correct.begin(), correct.end(), prng);
    partition_.assign(n + 1, 2);
    for (std::size_t i = 0; i < correct.size(); ++i) partition_[correct[i]] = i < correct.size() / 2 ? 0 : 1;

    net_rng_.seed(derive_seed(config_.seed, "network"));

    BlockInfo g;
    g.certified_epoch = 0;
    g.committed_epoch = 0;
    blocks_.emplace(genesis_hash(), g);
    canonical_.push_back(genesis_hash());

    trace_.sends_per_process.assign(n, 0);
    trace_.corrupted = corrupted_;
    trace_.kappa = config_.params.kappa;
}

void Simulation::note(std::string s)
{
    if (invariants_.notes.size() < 16) invariants_.notes.push_back(std::move(s));
}

void Simulation::step()
{
    if (done()) return;
    const Round r = ++round_;
    const auto n = config_.params.n;
    RoundRecord rec;
    rec.round = r;
    rec.epoch = epoch_of(r);

    for (auto it = delayed_.begin(); it != delayed_.end();) {
        if (it->first <= r) {
            inbox_[it->second.to - 1].push_back(std::move(it->second.msg));
            it = delayed_.erase(it);
        } else {
            ++it;
        }
    }

    std::vector<std::vector<Envelope>> outs(n);
    for (ProcessId id = 1; id <= n; ++id) {
        auto inbox = std::exchange(inbox_[id - 1], {});
        if (config_.shuffle_inboxes) {
            std::mt19937_64 rng(derive_seed(config_.seed, "shuffle", r, id));
            std::shuffle(inbox.begin(), inbox.end(), rng);
        }
        const Deviation dev = is_corrupted(id) ? config_.adversary.deviation(id, r, n) : Deviation{};
        outs[id - 1] = processes_[id - 1].step_round(r, inbox, dev);
    }
    for (ProcessId id = 1; id <= n; ++id) {
        if (is_corrupted(id)) processes_[id - 1].take_certified_events();
        else check_process(id, outs[id - 1], r, rec);
    }
    for (ProcessId id = 1; id <= n; ++id) deliver(std::move(outs[id - 1]), r, rec);
    trace_.rounds.push_back(rec);
}

void Simulation::run_to_end()
{
    while (!done()) step();
}

void Simulation::register_block(const Proposal& p)
{
    if (blocks_.contains(p.block_hash)) return;
    BlockInfo info;
    info.parent = p.block.parent_hash;
    info.height = p.height();
    info.epoch = p.epoch();
    info.leader = p.leader;
    blocks_.emplace(p.block_hash, info);
}

void Simulation::deliver(std::vector<Envelope>&& out, Round r, RoundRecord& rec)
{
    const auto& sm = config_.size_model;
    const auto n = config_.params.n;
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (auto& env : out) {
        const auto k = kind_index(env.msg.kind);
        ++rec.messages[k];
        if (auto p = env.msg.proposal()) {
            rec.bytes[k] += sm.proposal(n, static_cast<std::uint32_t>(p->block.txs.size()));
            register_block(*p);
        } else if (env.msg.vote()) {
            rec.bytes[k] += sm.vote();
        } else {
            rec.bytes[k] += sm.certified(n);
        }
        ++trace_.sends_per_process[env.from - 1];

        if (config_.fuzz_rate > 0.0 && is_corrupted(env.from) && unit(net_rng_) < config_.fuzz_rate) {
            auto bytes = encoding::encode(env.msg);
            const int flips = 1 + static_cast<int>(net_rng_() % 3);
            for (int i = 0; i < flips; ++i)
                bytes[net_rng_() % bytes.size()] ^= static_cast<std::uint8_t>(1 + net_rng_() % 255);
            auto decoded = encoding::decode(bytes);
            if (!decoded) {
                ++rec.malformed;
                continue;
            }
            env.msg = std::move(*decoded);
        }

        if (!config_.schedule.synchronous_at(r)) {
            const bool to_correct = !is_corrupted(env.to);
            switch (config_.schedule.pre_gst) {
            case PreGstPolicy::drop_to_correct:
                if (to_correct && unit(net_rng_) < config_.schedule.drop_rate) {
                    ++rec.dropped;
                    continue;
                }
                break;
            case PreGstPolicy::adversary_chosen_subset:
                if (to_correct && !is_corrupted(env.from) && partition_[env.from] != partition_[env.to]) {
                    ++rec.dropped;
                    continue;
                }
                break;
            case PreGstPolicy::delay_until_gst:
                ++rec.delayed;
                delayed_.emplace_back(config_.schedule.gst_round, std::move(env));
                continue;
            }
        }
        inbox_[env.to - 1].push_back(std::move(env.msg));
    }
}

void Simulation::check_process(ProcessId id, const std::vector<Envelope>& out, Round r, RoundRecord& rec)
{
    auto& state = processes_[id - 1];
    const auto& keys = *ctx_->keys;

    for (const Hash& h : state.take_certified_events()) {
        const CertifiedBlock* cb = state.find_certified(h);
        if (!cb || !cb->proposal) continue;
        ++rec.certifications;
        if (config_.check_invariants) {
            ++invariants_.certificates_checked;
            const bool sound = cb->cert.signers().size() >= config_.params.q
                            && cb->cert.proposal_hash() == cb->proposal->hash && keys.validate(cb->proposal->hash, cb->cert.sig);
            if (!sound) {
                ++invariants_.unsound_certificates;
                note("round " + std::to_string(r) + ": process " + std::to_string(id) + " holds an unsound certificate");
            }
        }
        auto it = blocks_.find(h);
        if (it != blocks_.end() && !it->second.certified_epoch) {
            it->second.certified_epoch = epoch_of(r);
            trace_.first_certifications.push_back(BlockEvent{r, id, h, cb->height, cb->epoch});
        }
    }

    if (config_.check_invariants) {
        auto check_vote = [&](Epoch e, const Hash& proposal) {
            ++invariants_.votes_checked;
            auto [it, inserted] = votes_cast_[id - 1].emplace(e, proposal);
            if (!inserted && it->second != proposal) {
                ++invariants_.double_votes;
                note("round " + std::to_string(r) + ": process " + std::to_string(id) + " voted twice in epoch " + std::to_string(e));
            }
            auto p = state.proposals().find(proposal);
            if (p == state.proposals().end()) return;
            // every certified ancestor sits below the proposal, so any certified
            // block at or above its height breaks the lock
            if (state.max_certified_height() >= p->second->height()) {
                ++invariants_.lock_violations;
                note("round " + std::to_string(r) + ": process " + std::to_string(id) + " voted past its lock");
            }
        };
        for (const auto& env : out)
            if (auto v = env.msg.vote()) check_vote(v->epoch, v->proposal_hash);
        const auto& log = state.vote_log();
        for (auto it = log.rbegin(); it != log.rend() && it->epoch == rec.epoch && r % 3 == 0; ++it)
            check_vote(it->epoch, it->proposal_hash);
    }

    check_ledger(id, r, rec);
}

std::optional<Hash> Simulation::ancestor_at(const Hash& tip, Height h) const
{
    Hash cur = tip;
    while (true) {
        auto it = blocks_.find(cur);
        if (it == blocks_.end()) return std::nullopt;
        if (it->second.height == h) return cur;
        if (it->second.height < h || it->second.height == 0) return std::nullopt;
        cur = it->second.parent;
    }
}

std::vector<Hash> Simulation::chain_to(const Hash& tip) const
{
    std::vector<Hash> out;
    Hash cur = tip;
    while (true) {
        auto it = blocks_.find(cur);
        if (it == blocks_.end()) break;
        out.push_back(cur);
        if (it->second.height == 0) break;
        cur = it->second.parent;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

void Simulation::violation(ProcessId a, ProcessId b, Round r)
{
    if (safety_.violated) return;
    safety_.violated = true;
    SafetyWitness w;
    w.a = a;
    w.b = b;
    w.round = r;
    if (tips_[a - 1]) w.ledger_a = chain_to(tips_[a - 1]->hash);
    if (b >= 1 && tips_[b - 1]) w.ledger_b = chain_to(tips_[b - 1]->hash);
    safety_.witness = std::move(w);
}

void Simulation::check_ledger(ProcessId id, Round r, RoundRecord& rec)
{
    auto& state = processes_[id - 1];
    const auto tip = state.ledger_tip(config_.params.kappa);
    auto& prev = tips_[id - 1];
    if (tip == prev) return;
    ++invariants_.ledgers_checked;

    if (!tip) {
        ++invariants_.ledger_regressions;
        note("round " + std::to_string(r) + ": process " + std::to_string(id) + " lost its ledger");
        prev = tip;
        return;
    }
    if (prev) {
        const auto anc = tip->height >= prev->height ? ancestor_at(tip->hash, prev->height) : std::nullopt;
        if (!anc || *anc != prev->hash) {
            ++invariants_.ledger_regressions;
            note("round " + std::to_string(r) + ": process " + std::to_string(id) + " ledger is not an extension of its previous one");
        }
    }

    // newly committed blocks for this process
    const Height floor = prev ? prev->height : 0;
    for (Hash cur = tip->hash;;) {
        auto it = blocks_.find(cur);
        if (it == blocks_.end() || it->second.height <= floor) break;
        if (!it->second.committed_epoch) {
            it->second.committed_epoch = epoch_of(r);
            trace_.first_commits.push_back(BlockEvent{r, id, cur, it->second.height, it->second.epoch});
        }
        cur = it->second.parent;
    }
    ++rec.commits;
    prev = tip;

    // global prefix check against the longest committed chain seen so far
    if (tip->height < canonical_.size()) {
        if (canonical_[tip->height] != tip->hash) violation(id, canonical_owner_, r);
        return;
    }
    std::vector<Hash> path;
    Hash cur = tip->hash;
    while (true) {
        auto it = blocks_.find(cur);
        if (it == blocks_.end()) return;
        if (it->second.height < canonical_.size()) break;
        path.push_back(cur);
        cur = it->second.parent;
    }
    if (cur != canonical_.back()) {
        violation(id, canonical_owner_, r);
        return;
    }
    canonical_.insert(canonical_.end(), path.rbegin(), path.rend());
    canonical_owner_ = id;
}

LivenessReport Simulation::liveness() const
{
    LivenessReport rep;
    for (const auto& [h, info] : blocks_) {
        if (info.height == 0) continue;
        BlockLiveness b;
        b.block = h;
        b.height = info.height;
        b.proposed_epoch = info.epoch;
        b.leader = info.leader;
        b.corrupted_leader = is_corrupted(info.leader);
        b.certified_epoch = info.certified_epoch;
        b.committed_epoch = info.committed_epoch;
        rep.blocks.push_back(b);
    }
    std::sort(rep.blocks.begin(), rep.blocks.end(), [](const BlockLiveness& a, const BlockLiveness& b) {
        return a.proposed_epoch != b.proposed_epoch ? a.proposed_epoch < b.proposed_epoch : a.block < b.block;
    });
    return rep;
}

RunResult Simulation::result() const
{
    RunResult out;
    out.trace = trace_;
    out.safety = safety_;
    out.liveness = liveness();
    out.invariants = invariants_;
    out.final_state_digests.reserve(processes_.size());
    for (const auto& p : processes_) out.final_state_digests.push_back(p.state_digest());
    return out;
}

RunResult run(const SimConfig& config)
{
    Simulation sim(config);
    sim.run_to_end();
    return sim.result();
}

BatchResult run_batch(const std::vector<SimConfig>& configs, unsigned parallelism)
{
    BatchResult out;
    out.runs.resize(configs.size());
    if (configs.empty()) return out;
    for (const auto& c : configs) require_valid(c.params);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) out.runs[i] = run(configs[i]);
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(configs.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::vector<double> cert, latency, msgs;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto& res = out.runs[i];
        const Round rounds = configs[i].rounds;
        if ((rounds - 1) / 3 >= 1) cert.push_back(res.liveness.certification_rate(1, (rounds - 1) / 3));
        if (res.liveness.commit_count() > 0) latency.push_back(res.liveness.mean_commit_latency());
        if (rounds / 3 >= 2) msgs.push_back(res.trace.messages_per_epoch(2, rounds / 3));
        out.safety_violations += res.safety.violated;
    }
    add_stat(out.certification_rate, cert);
    add_stat(out.commit_latency, latency);
    add_stat(out.messages_per_epoch, msgs);
    return out;
}

bool check_prefix(const std::vector<Hash>& a, const std::vector<Hash>& b)
{
    const auto m = std::min(a.size(), b.size());
    return std::equal(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(m), b.begin());
}

bool check_prefix(const Ledger& a, const Ledger& b)
{
    return check_prefix(a.hashes(), b.hashes());
}

std::uint64_t propagation_trials(std::uint32_t n, std::uint32_t chi, double p_prop, std::uint32_t k,
                                 std::uint64_t trials, std::uint64_t seed)
{
    if (chi < 1 || chi > n) throw std::invalid_argument("propagation_trials: chi must lie in [1, n]");
    if (!(p_prop >= 0.0 && p_prop <= 1.0)) throw std::invalid_argument("propagation_trials: p_prop must lie in [0, 1]");
    std::mt19937_64 rng(seed);
    std::uint64_t complete = 0;
    std::vector<std::uint8_t> has(n), next(n);
    for (std::uint64_t t = 0; t < trials; ++t) {
        std::fill(has.begin(), has.end(), 0);
        std::fill(has.begin(), has.begin() + chi, 1);
        std::uint32_t count = chi;
        for (std::uint32_t r = 0; r < k && count < n && p_prop > 0.0; ++r) {
            next = has;
            for (std::uint32_t a = 0; a < n; ++a) {
                if (!has[a]) continue;
                if (p_prop >= 1.0) {
                    std::fill(next.begin(), next.end(), 1);
                    break;
                }
                // skip ahead to the next recipient instead of flipping n coins
                std::geometric_distribution<std::uint32_t> gap(p_prop);
                for (std::uint64_t b = gap(rng); b < n; b += 1 + static_cast<std::uint64_t>(gap(rng)))
                    if (b != a) next[b] = 1;
            }
            has.swap(next);
            count = static_cast<std::uint32_t>(std::count(has.begin(), has.end(), 1));
        }
        complete += count == n;
    }
    return complete;
}

}  // namespace qscale::simnet
