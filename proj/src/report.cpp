#include "qscale/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qscale::report {

using nlohmann::json;
using protocol::msg_kind_count;
using protocol::MsgKind;

namespace {

json event_json(const simnet::BlockEvent& e)
{
    return {{"round", e.round}, {"process", e.process}, {"block", e.block.hex()}, {"height", e.height},
            {"block_epoch", e.block_epoch}};
}

json params_json(const ProtocolParams& p)
{
    return {{"n", p.n},
            {"f", p.f},
            {"p_sample", p.p_sample},
            {"p_vote", p.p_vote},
            {"p_prop", p.p_prop},
            {"q", p.q},
            {"kappa", p.kappa},
            {"model", to_string(p.model)},
            {"vote_forwarding", p.vote_forwarding},
            {"lock_rule", to_string(p.lock_rule)},
            {"verify_vote_vrf", p.verify_vote_vrf},
            {"txs_per_block", p.txs_per_block}};
}

json hashes_json(const std::vector<protocol::Hash>& hs)
{
    json a = json::array();
    for (const auto& h : hs) a.push_back(h.hex());
    return a;
}

json run_json(const simnet::SimConfig& config, const simnet::RunResult& r)
{
    const auto& trace = r.trace;
    const simnet::Epoch last = trace.rounds.empty() ? 0 : trace.rounds.back().epoch;
    // only epochs whose three rounds all ran
    const simnet::Epoch full = trace.rounds.empty() || trace.rounds.back().round % 3 == 0 ? last : last - 1;

    json safety = {{"violated", r.safety.violated}};
    if (r.safety.witness) {
        const auto& w = *r.safety.witness;
        safety["witness"] = {{"round", w.round},
                             {"process_a", w.a},
                             {"process_b", w.b},
                             {"ledger_a", hashes_json(w.ledger_a)},
                             {"ledger_b", hashes_json(w.ledger_b)}};
    }
    const auto& inv = r.invariants;
    json invariants = {{"ok", inv.ok()},
                       {"votes_checked", inv.votes_checked},
                       {"certificates_checked", inv.certificates_checked},
                       {"ledgers_checked", inv.ledgers_checked},
                       {"double_votes", inv.double_votes},
                       {"lock_violations", inv.lock_violations},
                       {"ledger_regressions", inv.ledger_regressions},
                       {"unsound_certificates", inv.unsound_certificates},
                       {"notes", inv.notes}};
    std::uint64_t messages = 0, bytes = 0;
    for (const auto& rec : trace.rounds) {
        messages += rec.total_messages();
        bytes += rec.total_bytes();
    }
    json liveness = {{"blocks", r.liveness.blocks.size()},
                     {"certification_rate", full >= 1 ? r.liveness.certification_rate(1, full) : 0.0},
                     {"commit_count", r.liveness.commit_count()},
                     {"mean_commit_latency", r.liveness.mean_commit_latency()}};
    return {{"seed", config.seed},
            {"rounds", config.rounds},
            {"epochs", full},
            {"corrupted", trace.corrupted},
            {"safety", safety},
            {"invariants", invariants},
            {"liveness", liveness},
            {"messages", {{"total", messages},
                          {"bytes", bytes},
                          {"per_epoch", full >= 1 ? trace.messages_per_epoch(1, full) : 0.0},
                          {"bytes_per_epoch", full >= 1 ? trace.bytes_per_epoch(1, full) : 0.0}}},
            {"final_state_digests", hashes_json(r.final_state_digests)}};
}

json config_json(const simnet::SimConfig& c)
{
    return {{"params", params_json(c.params)},
            {"schedule", {{"model", to_string(c.schedule.model)},
                          {"gst_round", c.schedule.gst_round},
                          {"pre_gst", to_string(c.schedule.pre_gst)},
                          {"drop_rate", c.schedule.drop_rate}}},
            {"adversary", c.adversary.name()},
            {"size_model", c.size_model.name},
            {"shuffle_inboxes", c.shuffle_inboxes},
            {"fuzz_rate", c.fuzz_rate}};
}

json stat_json(const simnet::Stat& s) { return {{"mean", s.mean}, {"variance", s.variance}, {"count", s.count}}; }

}  // namespace

std::string trace_csv_header()
{
    std::string h = "round,epoch";
    for (std::size_t k = 0; k < msg_kind_count; ++k) h += ",msgs_" + std::string(to_string(static_cast<MsgKind>(k)));
    for (std::size_t k = 0; k < msg_kind_count; ++k) h += ",bytes_" + std::string(to_string(static_cast<MsgKind>(k)));
    h += ",total_msgs,total_bytes,dropped,delayed,malformed,certifications,commits";
    return h;
}

void write_trace_csv(std::ostream& os, const simnet::RoundTrace& trace)
{
    os << trace_csv_header() << '\n';
    for (const auto& r : trace.rounds) {
        os << r.round << ',' << r.epoch;
        for (auto m : r.messages) os << ',' << m;
        for (auto b : r.bytes) os << ',' << b;
        os << ',' << r.total_messages() << ',' << r.total_bytes() << ',' << r.dropped << ',' << r.delayed << ','
           << r.malformed << ',' << r.certifications << ',' << r.commits << '\n';
    }
}

void write_trace_json(std::ostream& os, const simnet::RoundTrace& trace)
{
    json rounds = json::array();
    for (const auto& r : trace.rounds) {
        json msgs = json::object(), bytes = json::object();
        for (std::size_t k = 0; k < msg_kind_count; ++k) {
            const std::string name(to_string(static_cast<MsgKind>(k)));
            msgs[name] = r.messages[k];
            bytes[name] = r.bytes[k];
        }
        rounds.push_back({{"round", r.round},
                          {"epoch", r.epoch},
                          {"messages", msgs},
                          {"bytes", bytes},
                          {"dropped", r.dropped},
                          {"delayed", r.delayed},
                          {"malformed", r.malformed},
                          {"certifications", r.certifications},
                          {"commits", r.commits}});
    }
    json certs = json::array(), commits = json::array();
    for (const auto& e : trace.first_certifications) certs.push_back(event_json(e));
    for (const auto& e : trace.first_commits) commits.push_back(event_json(e));
    json doc = {{"schema", trace_schema},
                {"kappa", trace.kappa},
                {"corrupted", trace.corrupted},
                {"rounds", rounds},
                {"sends_per_process", trace.sends_per_process},
                {"first_certifications", certs},
                {"first_commits", commits}};
    os << doc.dump(1) << '\n';
}

void write_summary_json(std::ostream& os, const simnet::SimConfig& config, const simnet::RunResult& result)
{
    json doc = {{"schema", summary_schema}, {"config", config_json(config)}, {"run", run_json(config, result)}};
    os << doc.dump(2) << '\n';
}

void write_batch_json(std::ostream& os, const std::vector<simnet::SimConfig>& configs, const simnet::BatchResult& batch)
{
    json runs = json::array();
    for (std::size_t i = 0; i < batch.runs.size(); ++i) runs.push_back(run_json(configs.at(i), batch.runs[i]));
    json doc = {{"schema", summary_schema},
                {"config", configs.empty() ? json(nullptr) : config_json(configs.front())},
                {"runs", runs},
                {"aggregate", {{"certification_rate", stat_json(batch.certification_rate)},
                               {"commit_latency", stat_json(batch.commit_latency)},
                               {"messages_per_epoch", stat_json(batch.messages_per_epoch)},
                               {"safety_violations", batch.safety_violations}}}};
    os << doc.dump(2) << '\n';
}

std::string format_number(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

std::string cell_text(const Table::Cell& c)
{
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) return v;
            else if constexpr (std::is_same_v<T, bool>) return v ? "true" : "false";
            else if constexpr (std::is_same_v<T, double>) return format_number(v);
            else return std::to_string(v);
        },
        c);
}

std::string csv_escape(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

}  // namespace

void Table::add(std::vector<Cell> row)
{
    if (row.size() != columns_.size()) throw std::logic_error("Table::add: row width does not match the header");
    rows_.push_back(std::move(row));
}

void Table::write_csv(std::ostream& os) const
{
    for (std::size_t i = 0; i < columns_.size(); ++i) os << (i ? "," : "") << csv_escape(columns_[i]);
    os << '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(cell_text(row[i]));
        os << '\n';
    }
}

void Table::write_json(std::ostream& os) const
{
    // numbers go through format_number so CSV and JSON carry the same digits;
    // non-finite values become strings
    std::ostringstream body;
    body << "[";
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        body << (r ? ",\n " : "\n ") << "{";
        for (std::size_t i = 0; i < columns_.size(); ++i) {
            body << (i ? ", " : "") << json(columns_[i]).dump() << ": ";
            const auto& c = rows_[r][i];
            if (const auto* d = std::get_if<double>(&c); d && !std::isfinite(*d)) body << json(format_number(*d)).dump();
            else if (std::holds_alternative<std::string>(c)) body << json(std::get<std::string>(c)).dump();
            else body << cell_text(c);
        }
        body << "}";
    }
    body << (rows_.empty() ? "]" : "\n]");
    os << body.str() << '\n';
}

void Table::write_pretty(std::ostream& os) const
{
    std::vector<std::size_t> width(columns_.size());
    for (std::size_t i = 0; i < columns_.size(); ++i) width[i] = columns_[i].size();
    std::vector<std::vector<std::string>> text;
    for (const auto& row : rows_) {
        auto& t = text.emplace_back();
        for (std::size_t i = 0; i < row.size(); ++i) {
            t.push_back(cell_text(row[i]));
            width[i] = std::max(width[i], t.back().size());
        }
    }
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            os << (i ? "  " : "") << cells[i];
            if (i + 1 < cells.size()) os << std::string(width[i] - cells[i].size(), ' ');
        }
        os << '\n';
    };
    line(columns_);
    std::size_t total = 0;
    for (auto w : width) total += w + 2;
    os << std::string(total > 2 ? total - 2 : 0, '-') << '\n';
    for (const auto& t : text) line(t);
}

void Table::write(std::ostream& os, std::string_view format) const
{
    if (format == "csv") write_csv(os);
    else if (format == "json") write_json(os);
    else if (format == "pretty" || format == "pretty-table") write_pretty(os);
    else throw std::invalid_argument("unknown output format '" + std::string(format) + "'");
}

}  // namespace qscale::report
