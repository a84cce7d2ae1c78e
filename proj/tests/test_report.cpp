#include <doctest.h>

#include "qscale/report.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

using namespace qscale;
using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line, char sep = ',')
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) out.push_back(std::exchange(cur, {}));
        else cur += c;
    }
    out.push_back(cur);
    return out;
}

simnet::SimConfig tiny()
{
    simnet::SimConfig c;
    c.params.n = 20;
    c.params.q = 4;
    c.params.p_sample = 0.5;
    c.params.p_vote = 0.4;
    c.params.p_prop = 0.3;
    c.params.kappa = 3;
    c.rounds = 30;
    c.seed = 9;
    return c;
}

}  // namespace

TEST_CASE("trace CSV header")
{
    CHECK(report::trace_csv_header() ==
          "round,epoch,msgs_propose,msgs_disseminate,msgs_propagate,msgs_vote,msgs_vote_forward,msgs_certified,"
          "bytes_propose,bytes_disseminate,bytes_propagate,bytes_vote,bytes_vote_forward,bytes_certified,"
          "total_msgs,total_bytes,dropped,delayed,malformed,certifications,commits");
}

TEST_CASE("trace CSV and JSON carry the same counts")
{
    auto cfg = tiny();
    auto r = simnet::run(cfg);
    std::ostringstream c, j;
    report::write_trace_csv(c, r.trace);
    report::write_trace_json(j, r.trace);
    auto doc = json::parse(j.str());
    CHECK(doc["schema"] == report::trace_schema);
    REQUIRE(doc["rounds"].size() == cfg.rounds);

    std::istringstream lines(c.str());
    std::string line;
    std::getline(lines, line);
    const auto header = split(line);
    std::size_t i = 0;
    while (std::getline(lines, line)) {
        const auto cells = split(line);
        REQUIRE(cells.size() == header.size());
        const auto& row = doc["rounds"][i++];
        CHECK(std::to_string(row["round"].get<std::uint64_t>()) == cells[0]);
        CHECK(std::to_string(row["messages"]["vote"].get<std::uint64_t>()) == cells[5]);
        CHECK(std::to_string(row["bytes"]["propose"].get<std::uint64_t>()) == cells[8]);
        CHECK(std::to_string(row["commits"].get<std::uint64_t>()) == cells.back());
    }
    CHECK(i == cfg.rounds);
}

TEST_CASE("summary JSON")
{
    auto cfg = tiny();
    auto r = simnet::run(cfg);
    std::ostringstream os;
    report::write_summary_json(os, cfg, r);
    auto doc = json::parse(os.str());
    CHECK(doc["schema"] == report::summary_schema);
    CHECK(doc["config"]["params"]["n"] == 20);
    CHECK(doc["config"]["adversary"] == "honest-all");
    CHECK(doc["run"]["safety"]["violated"] == false);
    CHECK_FALSE(doc["run"]["safety"].contains("witness"));
    CHECK(doc["run"]["invariants"]["ok"] == true);
    CHECK(doc["run"]["final_state_digests"].size() == 20);
    CHECK(doc["run"]["liveness"]["commit_count"].get<std::uint64_t>() == r.liveness.commit_count());

    std::ostringstream b;
    report::write_batch_json(b, {cfg}, simnet::run_batch({cfg}));
    auto batch = json::parse(b.str());
    CHECK(batch["runs"].size() == 1);
    CHECK(batch["runs"][0] == doc["run"]);
}

TEST_CASE("numbers round-trip")
{
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 6.02e23, -2.5, 0.0}) {
        const auto s = report::format_number(x);
        double back = 0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == x);
    }
    CHECK(report::format_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("table formats agree")
{
    report::Table t({"name", "k", "p", "ok"});
    t.add({std::string("a,b"), std::int64_t{3}, 1.0 / 3.0, true});
    t.add({std::string("c"), std::int64_t{-1}, -std::numeric_limits<double>::infinity(), false});

    std::ostringstream c, j, p;
    t.write_csv(c);
    t.write_json(j);
    t.write(p, "pretty");
    CHECK(c.str() == "name,k,p,ok\n\"a,b\",3,0.3333333333333333,true\nc,-1,-inf,false\n");
    auto doc = json::parse(j.str());
    REQUIRE(doc.size() == 2);
    CHECK(doc[0]["name"] == "a,b");
    CHECK(doc[0]["k"] == 3);
    CHECK(doc[0]["p"].get<double>() == 1.0 / 3.0);
    CHECK(doc[0]["ok"] == true);
    CHECK(doc[1]["p"] == "-inf");
    CHECK(p.str().find("0.3333333333333333") != std::string::npos);
    CHECK_THROWS(t.write(p, "xml"));
    CHECK_THROWS(t.add({std::int64_t{1}}));
}
