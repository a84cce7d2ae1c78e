#include <doctest.h>

#include "qscale/report.hpp"
#include "qscale/simnet.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

using namespace qscale;
using namespace qscale::simnet;

namespace {

ProtocolParams small(std::uint32_t n = 60, std::uint32_t q = 8, NetworkModel model = NetworkModel::synchronous)
{
    ProtocolParams p;
    p.n = n;
    p.q = q;
    p.p_sample = 3.0 / std::sqrt(static_cast<double>(n));
    p.p_vote = 1.6 * q / n;
    p.p_prop = 8.0 / n;
    p.model = model;
    return p;
}

std::string csv(const RoundTrace& t)
{
    std::ostringstream os;
    report::write_trace_csv(os, t);
    return os.str();
}

std::string json(const RoundTrace& t)
{
    std::ostringstream os;
    report::write_trace_json(os, t);
    return os.str();
}

}  // namespace

TEST_CASE("strategy names parse and print")
{
    auto s = AdversaryStrategy::parse("silent-leader:1-4,9");
    CHECK(s.kind == StrategyKind::silent_leader);
    CHECK(s.epochs == std::vector<Epoch>{1, 2, 3, 4, 9});
    CHECK(s.name() == "silent-leader:1,2,3,4,9");
    CHECK(AdversaryStrategy::parse(s.name()).epochs == s.epochs);
    CHECK(s.targets(3));
    CHECK_FALSE(s.targets(5));

    auto c = AdversaryStrategy::parse("equivocating-leader+always-voting-byzantine");
    CHECK(c.kind == StrategyKind::composite);
    REQUIRE(c.parts.size() == 2);
    auto d = c.deviation(1, 1, 10);  // process 1 leads epoch 1
    CHECK(d.equivocate);
    CHECK(d.always_vote);
    CHECK_FALSE(c.deviation(2, 1, 10).equivocate);

    CHECK(AdversaryStrategy::parse("honest-all").kind == StrategyKind::honest_all);
    CHECK_THROWS_AS(AdversaryStrategy::parse("sneaky"), std::invalid_argument);
    CHECK_THROWS(AdversaryStrategy::parse("silent-leader:4-1"));
}

TEST_CASE("corrupted set selection")
{
    SimConfig c;
    c.params = small();
    c.params.with_epsilon(0.2);
    c.rounds = 60;
    auto ids = pick_corrupted(c);
    CHECK(ids.size() == c.params.f);
    CHECK(std::is_sorted(ids.begin(), ids.end()));

    c.adversary = AdversaryStrategy::parse("equivocating-leader:3,5");
    ids = pick_corrupted(c);
    CHECK(std::binary_search(ids.begin(), ids.end(), 3u));
    CHECK(std::binary_search(ids.begin(), ids.end(), 5u));

    c.adversary = AdversaryStrategy::parse("silent-leader");
    ids = pick_corrupted(c);
    REQUIRE(ids.size() == 12);
    for (std::size_t i = 0; i < ids.size(); ++i) CHECK(ids[i] == 1 + i * 5);

    c.corrupted = {1, 2};
    CHECK_THROWS_AS(pick_corrupted(c), std::invalid_argument);
    c.corrupted.assign(12, 3);
    CHECK_THROWS_AS(pick_corrupted(c), std::invalid_argument);
}

TEST_CASE("identical configs give byte-identical traces")
{
    SimConfig c;
    c.params = small();
    c.params.with_epsilon(0.1);
    c.adversary = AdversaryStrategy::parse("equivocating-leader");
    c.rounds = 90;
    c.seed = 77;
    auto a = run(c), b = run(c);
    CHECK(csv(a.trace) == csv(b.trace));
    CHECK(json(a.trace) == json(b.trace));
    CHECK(a.final_state_digests == b.final_state_digests);

    c.seed = 78;
    CHECK(csv(run(c).trace) != csv(a.trace));
}

TEST_CASE("inbox order does not change the outcome")
{
    for (const char* adv : {"honest-all", "equivocating-leader", "always-voting-byzantine"}) {
        SimConfig c;
        c.params = small(50, 7, NetworkModel::partially_synchronous);
        c.params.with_epsilon(0.1);
        c.params.vote_forwarding = true;
        c.schedule.model = NetworkModel::partially_synchronous;
        c.schedule.gst_round = 30;
        c.adversary = AdversaryStrategy::parse(adv);
        c.rounds = 90;
        auto plain = run(c);
        c.shuffle_inboxes = true;
        auto shuffled = run(c);
        CHECK(plain.final_state_digests == shuffled.final_state_digests);
        CHECK(csv(plain.trace) == csv(shuffled.trace));
    }
}

TEST_CASE("every leader silent: nothing is proposed or certified")
{
    SimConfig c;
    c.params = small(10, 3);
    c.params.f = 4;
    c.adversary = AdversaryStrategy::parse("silent-leader:1-4");
    c.rounds = 12;
    auto r = run(c);
    CHECK(r.liveness.blocks.empty());
    CHECK(r.liveness.commit_count() == 0);
    CHECK(r.trace.first_certifications.empty());
    for (const auto& rec : r.trace.rounds) CHECK(rec.messages[0] == 0);
}

TEST_CASE("spread silent leaders block every commit")
{
    SimConfig c;
    c.params = small(40, 6);
    c.params.with_epsilon(0.25);  // every 4th leader silent
    c.params.kappa = 4;
    c.adversary = AdversaryStrategy::parse("silent-leader");
    c.rounds = 3 * 60;
    auto r = run(c);
    CHECK(r.liveness.commit_count() == 0);
    CHECK(r.trace.first_commits.empty());
    CHECK_FALSE(r.safety.violated);
    for (const auto& b : r.liveness.blocks) CHECK_FALSE(b.corrupted_leader);
}

TEST_CASE("batch results equal individual runs")
{
    std::vector<SimConfig> configs;
    for (std::uint64_t seed : {3u, 4u, 5u}) {
        SimConfig c;
        c.params = small();
        c.rounds = 45;
        c.seed = seed;
        configs.push_back(c);
    }
    auto batch = run_batch(configs, 2);
    REQUIRE(batch.runs.size() == 3);
    for (std::size_t i = 0; i < configs.size(); ++i) {
        auto single = run(configs[i]);
        CHECK(csv(batch.runs[i].trace) == csv(single.trace));
        CHECK(batch.runs[i].final_state_digests == single.final_state_digests);
    }
    CHECK(batch.certification_rate.count == 3);
    CHECK(batch.safety_violations == 0);

    auto empty = run_batch({}, 4);
    CHECK(empty.runs.empty());
    CHECK(empty.certification_rate.count == 0);
}

TEST_CASE("prefix check")
{
    using crypto::hash_string;
    std::vector<Hash> a{hash_string("g"), hash_string("1")}, b{hash_string("g"), hash_string("1"), hash_string("2")},
        c{hash_string("g"), hash_string("x")};
    CHECK(check_prefix(a, b));
    CHECK(check_prefix(b, a));
    CHECK(check_prefix(a, a));
    CHECK_FALSE(check_prefix(b, c));
    CHECK(check_prefix({}, c));
}

TEST_CASE("pre-GST policies")
{
    for (auto policy : {PreGstPolicy::drop_to_correct, PreGstPolicy::adversary_chosen_subset,
                        PreGstPolicy::delay_until_gst}) {
        SimConfig c;
        c.params = small(50, 7, NetworkModel::partially_synchronous);
        c.params.with_epsilon(0.1);
        c.schedule.model = NetworkModel::partially_synchronous;
        c.schedule.gst_round = 30;
        c.schedule.pre_gst = policy;
        c.rounds = 150;
        auto r = run(c);
        std::uint64_t dropped_before = 0, dropped_after = 0, delayed = 0;
        for (const auto& rec : r.trace.rounds) {
            (rec.round < c.schedule.gst_round ? dropped_before : dropped_after) += rec.dropped;
            delayed += rec.delayed;
        }
        CHECK(dropped_after == 0);
        if (policy == PreGstPolicy::delay_until_gst) {
            CHECK(delayed > 0);
            CHECK(dropped_before == 0);
        } else {
            CHECK(dropped_before > 0);
        }
        CHECK_FALSE(r.safety.violated);
        CHECK(r.invariants.ok());
        CHECK(parse_pre_gst_policy(to_string(policy)) == policy);
    }
}

TEST_CASE("corrupted byte streams are rejected, not trusted")
{
    SimConfig c;
    c.params = small();
    c.params.with_epsilon(0.2);
    c.adversary = AdversaryStrategy::parse("always-voting-byzantine");
    c.fuzz_rate = 0.5;
    c.rounds = 90;
    auto r = run(c);
    std::uint64_t malformed = 0;
    for (const auto& rec : r.trace.rounds) malformed += rec.malformed;
    CHECK(malformed > 0);
    CHECK(r.invariants.ok());
    CHECK_FALSE(r.safety.violated);
}

TEST_CASE("vote forwarding still certifies and announces")
{
    SimConfig c;
    c.params = small();
    c.params.vote_forwarding = true;
    c.rounds = 90;
    auto r = run(c);
    std::uint64_t announces = 0, forwards = 0;
    for (const auto& rec : r.trace.rounds) {
        announces += rec.messages[static_cast<std::size_t>(protocol::MsgKind::certified)];
        forwards += rec.messages[static_cast<std::size_t>(protocol::MsgKind::vote_forward)];
    }
    CHECK(forwards > 0);
    CHECK(announces > 0);
    CHECK(r.liveness.certification_rate(1, 29) > 0.8);
    CHECK(r.invariants.ok());
}

TEST_CASE("honest runs commit and keep the invariants")
{
    SimConfig c;
    c.params = small();
    c.params.kappa = 3;
    c.rounds = 3 * 40;
    auto r = run(c);
    CHECK(r.liveness.commit_count() > 20);
    CHECK(r.invariants.ok());
    CHECK(r.invariants.votes_checked > 0);
    CHECK(r.invariants.certificates_checked > 0);
    CHECK(r.invariants.ledgers_checked > 0);
    CHECK(r.trace.corrupted.empty());
    const auto sends = std::accumulate(r.trace.sends_per_process.begin(), r.trace.sends_per_process.end(), std::uint64_t{0});
    std::uint64_t msgs = 0;
    for (const auto& rec : r.trace.rounds) msgs += rec.total_messages();
    CHECK(sends == msgs);
}

TEST_CASE("invalid configurations are refused")
{
    SimConfig c;
    c.params = small();
    c.params.with_epsilon(0.6);
    CHECK_THROWS_AS(Simulation{c}, std::invalid_argument);
    c.params.with_epsilon(0.0);
    c.fuzz_rate = 2.0;
    CHECK_THROWS_AS(Simulation{c}, std::invalid_argument);
}
