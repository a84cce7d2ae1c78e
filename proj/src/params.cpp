#include "qscale/params.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qscale {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::uint32_t parse_u32(std::string_view key, std::string_view v)
{
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || out > UINT32_MAX)
        throw std::invalid_argument(std::string(key) + ": expected a non-negative integer, got '" + std::string(v) + "'");
    return static_cast<std::uint32_t>(out);
}

double parse_double(std::string_view key, std::string_view v)
{
    // from_chars for double is missing in older libstdc++, use strtod on a copy
    const std::string copy(v);
    char* end = nullptr;
    const double out = std::strtod(copy.c_str(), &end);
    if (copy.empty() || end != copy.c_str() + copy.size())
        throw std::invalid_argument(std::string(key) + ": expected a number, got '" + copy + "'");
    return out;
}

bool parse_bool(std::string_view key, std::string_view v)
{
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument(std::string(key) + ": expected a boolean, got '" + std::string(v) + "'");
}

std::string fmt_double(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string_view to_string(NetworkModel m)
{
    return m == NetworkModel::synchronous ? "synchronous" : "partially_synchronous";
}

std::string_view to_string(LockRule r)
{
    return r == LockRule::strict ? "strict" : "ancestor_exempt";
}

NetworkModel parse_network_model(std::string_view s)
{
    if (s == "synchronous" || s == "sync") return NetworkModel::synchronous;
    if (s == "partially_synchronous" || s == "psync" || s == "partially-synchronous")
        return NetworkModel::partially_synchronous;
    throw std::invalid_argument("unknown network model '" + std::string(s) + "'");
}

LockRule parse_lock_rule(std::string_view s)
{
    if (s == "strict") return LockRule::strict;
    if (s == "ancestor_exempt" || s == "ancestor-exempt") return LockRule::ancestor_exempt;
    throw std::invalid_argument("unknown lock rule '" + std::string(s) + "'");
}

ProtocolParams& ProtocolParams::with_epsilon(double eps)
{
    f = static_cast<std::uint32_t>(std::llround(eps * static_cast<double>(n)));
    return *this;
}

std::string Validation::describe() const
{
    std::string out;
    for (const auto& e : errors) out += "error: " + e.field + ": " + e.message + "\n";
    for (const auto& w : warnings) out += "warning: " + w.field + ": " + w.message + "\n";
    return out;
}

Validation validate(const ProtocolParams& p)
{
    Validation v;
    auto error = [&](std::string field, std::string msg) { v.errors.push_back({std::move(field), std::move(msg)}); };
    auto warn = [&](std::string field, std::string msg) { v.warnings.push_back({std::move(field), std::move(msg)}); };

    if (p.n == 0) error("n", "must be positive");
    if (p.f > p.n) error("f", "exceeds n");

    const double eps = p.epsilon();
    if (p.model == NetworkModel::synchronous && p.n > 0 && 2 * static_cast<std::uint64_t>(p.f) >= p.n)
        error("epsilon", "epsilon " + fmt_double(eps) + " >= 1/2 under the synchronous model");
    if (p.model == NetworkModel::partially_synchronous && p.n > 0 && 3 * static_cast<std::uint64_t>(p.f) >= p.n)
        error("epsilon", "epsilon " + fmt_double(eps) + " >= 1/3 under the partially synchronous model");

    auto check_prob = [&](const char* name, double x) {
        if (!(x >= 0.0 && x <= 1.0)) error(name, "probability out of range: " + fmt_double(x));
    };
    check_prob("p_sample", p.p_sample);
    check_prob("p_vote", p.p_vote);
    check_prob("p_prop", p.p_prop);

    if (p.q == 0) error("q", "must be positive");
    if (p.q > p.n) error("q", "exceeds n");
    if (p.kappa < 1) error("kappa", "must be at least 1");
    if (p.txs_per_block == 0) error("txs_per_block", "must be positive");

    if (p.q > 0 && p.q <= p.f)
        warn("q", "q <= f: the Byzantine processes alone can form a certificate");
    if (p.kappa == 1) warn("kappa", "kappa = 1 is outside the analysed range (kappa >= 2)");
    return v;
}

void require_valid(const ProtocolParams& params)
{
    const auto v = validate(params);
    if (!v.ok()) throw std::invalid_argument(v.describe());
}

ProtocolParams preset(std::string_view name)
{
    ProtocolParams p;
    p.n = 500;
    p.f = 0;
    p.p_sample = 3.0 / std::sqrt(static_cast<double>(p.n));
    p.kappa = 5;
    if (name == "sync-eval") {
        p.q = 49;
        p.p_vote = 1.9 * p.q / p.n;
        p.p_prop = 10.0 / p.n;
        p.model = NetworkModel::synchronous;
        return p;
    }
    for (std::uint32_t q : {49u, 74u, 98u}) {
        if (name == "psync-eval-" + std::to_string(q)) {
            p.q = q;
            p.p_vote = 1.45 * q / p.n;
            p.p_prop = 6.0 / p.n;
            p.model = NetworkModel::partially_synchronous;
            return p;
        }
    }
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> preset_names()
{
    return {"sync-eval", "psync-eval-49", "psync-eval-74", "psync-eval-98"};
}

std::string serialize(const ProtocolParams& p)
{
    std::ostringstream os;
    os << "n = " << p.n << "\n"
       << "f = " << p.f << "\n"
       << "p_sample = " << fmt_double(p.p_sample) << "\n"
       << "p_vote = " << fmt_double(p.p_vote) << "\n"
       << "p_prop = " << fmt_double(p.p_prop) << "\n"
       << "q = " << p.q << "\n"
       << "kappa = " << p.kappa << "\n"
       << "model = " << to_string(p.model) << "\n"
       << "vote_forwarding = " << (p.vote_forwarding ? "true" : "false") << "\n"
       << "lock_rule = " << to_string(p.lock_rule) << "\n"
       << "verify_vote_vrf = " << (p.verify_vote_vrf ? "true" : "false") << "\n"
       << "txs_per_block = " << p.txs_per_block << "\n";
    return os.str();
}

void assign_param(ProtocolParams& p, std::string_view key, std::string_view value)
{
    value = trim(value);
    if (key == "n") p.n = parse_u32(key, value);
    else if (key == "f") p.f = parse_u32(key, value);
    else if (key == "epsilon") p.with_epsilon(parse_double(key, value));
    else if (key == "p_sample") p.p_sample = parse_double(key, value);
    else if (key == "p_vote") p.p_vote = parse_double(key, value);
    else if (key == "p_prop") p.p_prop = parse_double(key, value);
    else if (key == "q") p.q = parse_u32(key, value);
    else if (key == "kappa") p.kappa = parse_u32(key, value);
    else if (key == "model") p.model = parse_network_model(value);
    else if (key == "vote_forwarding") p.vote_forwarding = parse_bool(key, value);
    else if (key == "lock_rule") p.lock_rule = parse_lock_rule(value);
    else if (key == "verify_vote_vrf") p.verify_vote_vrf = parse_bool(key, value);
    else if (key == "txs_per_block") p.txs_per_block = parse_u32(key, value);
    else throw std::invalid_argument("unknown parameter '" + std::string(key) + "'");
}

ProtocolParams parse_params(std::string_view text, ProtocolParams base)
{
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 'key = value'");
        assign_param(base, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return base;
}

ProtocolParams load_params_file(const std::string& path, ProtocolParams base)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_params(buf.str(), base);
}

}  // namespace qscale
