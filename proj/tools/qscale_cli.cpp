#include "qscale/analysis.hpp"
#include "qscale/report.hpp"
#include "qscale/simnet.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace qscale;
using namespace qscale::analysis;
using report::Table;
namespace fs = std::filesystem;

namespace {

// Options every subcommand shares.
struct Common {
    std::string format = "pretty";
    std::string output;
    std::string config;
    std::vector<std::string> set;
};

// Parameter selection: preset, then config file, then --set, then --epsilon.
struct ParamArgs {
    std::string preset;
    std::optional<double> epsilon;
    std::optional<std::string> model;
    std::optional<std::uint32_t> kappa;
};

void add_common(CLI::App* sub, Common& c)
{
    sub->add_option("--format", c.format, "Output format")
        ->check(CLI::IsMember({"csv", "json", "pretty", "pretty-table"}))
        ->capture_default_str();
    sub->add_option("--output,-o", c.output, "Write the table to this file instead of stdout");
    sub->add_option("--config", c.config, "Parameter file with key = value lines, applied over the preset")
        ->check(CLI::ExistingFile);
    sub->add_option("--set", c.set, "Override one parameter, e.g. --set q=60 (repeatable)");
}

void add_params(CLI::App* sub, ParamArgs& p, const std::string& default_preset, bool with_kappa = false)
{
    p.preset = default_preset;
    sub->add_option("--preset", p.preset, "Parameter preset")->check(CLI::IsMember(preset_names()))->capture_default_str();
    sub->add_option("--epsilon", p.epsilon, "Byzantine fraction; sets f = round(epsilon n)");
    sub->add_option("--model", p.model, "Network model override")
        ->check(CLI::IsMember({"sync", "psync", "synchronous", "partially_synchronous"}));
    if (with_kappa) sub->add_option("--kappa", p.kappa, "Commit depth");
}

ProtocolParams resolve(const std::string& preset_name, const Common& c, const ParamArgs& a)
{
    ProtocolParams p = preset(preset_name);
    if (!c.config.empty()) p = load_params_file(c.config, p);
    for (const auto& kv : c.set) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        auto trim = [](std::string s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
            return s;
        };
        assign_param(p, trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    if (a.model) p.model = parse_network_model(*a.model);
    if (a.epsilon) p.with_epsilon(*a.epsilon);
    if (a.kappa) p.kappa = *a.kappa;
    require_valid(p);
    return p;
}

ProtocolParams resolve(const Common& c, const ParamArgs& a) { return resolve(a.preset, c, a); }

void emit(const Table& t, const Common& c)
{
    if (c.output.empty()) {
        t.write(std::cout, c.format);
        return;
    }
    std::ofstream os(c.output);
    if (!os) throw std::runtime_error("cannot open '" + c.output + "' for writing");
    t.write(os, c.format);
}

bool pretty(const Common& c) { return c.format == "pretty" || c.format == "pretty-table"; }

std::string model_name(const ProtocolParams& p) { return p.model == NetworkModel::synchronous ? "sync" : "psync"; }

// ---------------------------------------------------------------------------

struct SafetyArgs {
    Common common;
    ParamArgs params;
    std::uint32_t kappa_max = 20;
    std::string mode = "exact";
};

int analyze_safety(const SafetyArgs& a)
{
    const auto p = resolve(a.common, a.params);
    const Mode mode = parse_mode(a.mode);
    Table t({"preset", "model", "epsilon", "mode", "kappa", "probability", "log2", "vacuous"});
    for (std::uint32_t k = 2; k <= a.kappa_max; ++k) {
        const auto r = p.model == NetworkModel::synchronous ? sync_safety_violation(p, k, mode)
                                                            : psync_safety_violation(p, k, mode);
        t.add({a.params.preset, model_name(p), p.epsilon(), std::string(to_string(mode)), std::int64_t{k}, r.value,
               std::log2(r.value), r.vacuous});
    }
    emit(t, a.common);
    return 0;
}

struct LivenessArgs {
    Common common;
    ParamArgs params;
    std::uint32_t kappa_max = 10;
    std::string mode = "exact";
};

int analyze_liveness(const LivenessArgs& a)
{
    const auto p = resolve(a.common, a.params);
    const Mode mode = parse_mode(a.mode);
    Table t({"preset", "model", "epsilon", "mode", "kappa", "qc", "propagation", "probability", "vacuous"});
    for (std::uint32_t k = 1; k <= a.kappa_max; ++k) {
        const auto r = liveness_commit_probability(p, k, mode);
        t.add({a.params.preset, model_name(p), p.epsilon(), std::string(to_string(mode)), std::int64_t{k},
               r.get("qc"), r.get("propagation_term"), r.value, r.vacuous});
    }
    emit(t, a.common);
    return 0;
}

struct PropagationArgs {
    Common common;
    std::uint32_t n = 500;
    std::vector<std::uint32_t> chi{76};
    double p_prop = 0.02;
    std::vector<std::uint32_t> k{4};
};

int propagation(const PropagationArgs& a)
{
    Table t({"n", "chi", "p_prop", "k", "exact", "failure", "strong_bound", "strong_vacuous", "weak_bound",
             "weak_vacuous"});
    for (auto chi : a.chi)
        for (auto k : a.k) {
            const auto lb = propagation_lower_bound(a.n, chi, a.p_prop, k);
            t.add({std::int64_t{a.n}, std::int64_t{chi}, a.p_prop, std::int64_t{k},
                   propagation_exact(a.n, chi, a.p_prop, k), propagation_exact_failure(a.n, chi, a.p_prop, k),
                   lb.strong.raw, lb.strong.vacuous, lb.weak.raw, lb.weak.vacuous});
        }
    emit(t, a.common);
    return 0;
}

struct CommitteeArgs {
    Common common;
    std::optional<std::uint32_t> n, f;
    std::vector<std::uint32_t> c;
    double target_log2 = -30;
    std::uint32_t grid = 100;
};

int committee(const CommitteeArgs& a)
{
    struct Row {
        std::uint32_t n, f, c;
    };
    std::vector<Row> rows;
    if (a.n || a.f || !a.c.empty()) {
        if (!a.n || !a.f || a.c.empty()) throw std::invalid_argument("committee: give --n, --f and --c together");
        for (auto c : a.c) rows.push_back({*a.n, *a.f, c});
    } else {
        for (auto c : {300u, 325u, 350u, 375u}) rows.push_back({500, 200, c});
        for (auto c : {550u, 575u, 600u, 625u}) rows.push_back({1000, 400, c});
    }
    Table t({"n", "f", "c", "t", "o", "safety", "log2_safety", "at_least", "liveness_cdf", "feasible"});
    for (const auto& r : rows) {
        const auto res = committee_optimize(r.n, r.f, r.c, std::exp2(a.target_log2), a.grid);
        t.add({std::int64_t{r.n}, std::int64_t{r.f}, std::int64_t{r.c}, std::int64_t{res.t}, res.o, res.safety,
               res.log2_safety, res.at_least, res.liveness_cdf, res.feasible});
    }
    emit(t, a.common);
    return 0;
}

struct ComplexityArgs {
    Common common;
    std::vector<std::string> presets{"psync-eval-49", "psync-eval-74", "psync-eval-98"};
    std::optional<double> epsilon;
    std::optional<std::uint32_t> kappa;
    std::string size_model = "block-payload";
};

int complexity(const ComplexityArgs& a)
{
    const auto sizes = SizeModel::by_name(a.size_model);
    Table t({"preset", "q", "propose", "disseminate", "vote", "propagate", "count", "next_leader", "total", "bytes",
             "leader_bytes", "size_model", "kappa", "amortized", "per_process_epoch"});
    for (const auto& name : a.presets) {
        ParamArgs pa;
        pa.epsilon = a.epsilon;
        pa.kappa = a.kappa;
        const auto p = resolve(name, a.common, pa);
        const auto e = expected_messages_per_epoch(p, sizes);
        const auto am = amortized_complexity(p, p.kappa);
        t.add({name, std::int64_t{p.q}, e.propose, e.disseminate, e.vote, e.propagate, e.count, e.next_leader, e.total,
               e.bytes, e.leader_bytes, e.size_model, std::int64_t{p.kappa}, am.value, am.per_epoch});
    }
    emit(t, a.common);
    return 0;
}

struct KappaArgs {
    Common common;
    std::vector<std::string> presets{"psync-eval-49", "psync-eval-74", "psync-eval-98"};
    std::vector<double> epsilons{0.1, 0.15};
    std::vector<int> targets_log2{-10, -20, -30};
    std::string mode = "exact";
    std::uint32_t kappa_max = 64;
};

int kappa_table_cmd(const KappaArgs& a)
{
    const Mode mode = parse_mode(a.mode);
    std::vector<ProtocolParams> ps;
    for (const auto& name : a.presets) ps.push_back(resolve(name, a.common, {}));
    std::vector<double> targets;
    for (int t : a.targets_log2) targets.push_back(std::ldexp(1.0, t));
    const auto cells = kappa_table(ps, a.epsilons, targets, mode, a.kappa_max);

    if (pretty(a.common)) {
        // one row per preset, one column per (epsilon, target)
        std::vector<std::string> cols{"preset", "q"};
        for (double e : a.epsilons)
            for (int t : a.targets_log2) cols.push_back("eps=" + report::format_number(e) + " 2^" + std::to_string(t));
        Table t(cols);
        const std::size_t per = a.epsilons.size() * targets.size();
        for (std::size_t i = 0; i < a.presets.size(); ++i) {
            std::vector<Table::Cell> row{a.presets[i], std::int64_t{ps[i].q}};
            for (std::size_t j = 0; j < per; ++j) {
                const auto& c = cells[i * per + j];
                row.push_back(c.kappa ? "kappa=" + std::to_string(*c.kappa) : std::string(">") + std::to_string(a.kappa_max));
            }
            t.add(row);
        }
        emit(t, a.common);
        return 0;
    }
    Table t({"preset", "q", "epsilon", "target_log2", "mode", "kappa", "value"});
    const std::size_t per = a.epsilons.size() * targets.size();
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        const int tl = a.targets_log2[i % targets.size()];
        t.add({a.presets[i / per], std::int64_t{c.q}, c.epsilon, std::int64_t{tl}, std::string(to_string(mode)),
               c.kappa ? Table::Cell{std::int64_t{*c.kappa}} : Table::Cell{std::string("")}, c.value});
    }
    emit(t, a.common);
    return 0;
}

// ---------------------------------------------------------------------------

struct SimArgs {
    Common common;
    ParamArgs params;
    std::uint64_t seed = 1;
    std::uint64_t rounds = 300;
    std::string adversary = "honest-all";
    std::string schedule = "sync";
    std::uint64_t gst_round = 0;
    double drop_rate = 0.5;
    std::uint32_t runs = 1;
    unsigned parallelism = 1;
    std::string out_dir = ".";
    std::vector<std::uint32_t> corrupted;
    bool shuffle = false;
    double fuzz_rate = 0.0;
    std::string size_model = "wire";
};

simnet::SimConfig sim_config(const SimArgs& a)
{
    simnet::SimConfig c;
    c.params = resolve(a.common, a.params);
    c.seed = a.seed;
    c.rounds = a.rounds;
    c.adversary = simnet::AdversaryStrategy::parse(a.adversary);
    if (a.schedule == "sync") {
        c.schedule.model = NetworkModel::synchronous;
    } else {
        c.schedule.model = NetworkModel::partially_synchronous;
        c.schedule.pre_gst = simnet::parse_pre_gst_policy(a.schedule);
        c.schedule.gst_round = a.gst_round;
        c.schedule.drop_rate = a.drop_rate;
    }
    c.corrupted.assign(a.corrupted.begin(), a.corrupted.end());
    c.shuffle_inboxes = a.shuffle;
    c.fuzz_rate = a.fuzz_rate;
    c.size_model = SizeModel::by_name(a.size_model);
    return c;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    body(os);
}

void dump_witness(const simnet::RunResult& r, std::uint64_t seed)
{
    const auto& w = *r.safety.witness;
    std::cerr << "safety violation (seed " << seed << ") at round " << w.round << " between processes " << w.a
              << " and " << w.b << "\n";
    auto dump = [](const char* label, const std::vector<protocol::Hash>& l) {
        std::cerr << "  " << label << ":";
        for (const auto& h : l) std::cerr << ' ' << h.hex().substr(0, 16);
        std::cerr << '\n';
    };
    dump("ledger a", w.ledger_a);
    dump("ledger b", w.ledger_b);
}

int simulate(const SimArgs& a)
{
    if (a.runs == 0) throw std::invalid_argument("--runs must be at least 1");
    const auto base = sim_config(a);
    std::vector<simnet::SimConfig> configs;
    for (std::uint32_t i = 0; i < a.runs; ++i) {
        auto c = base;
        c.seed = a.seed + i;
        configs.push_back(c);
    }
    const auto batch = simnet::run_batch(configs, a.parallelism);

    fs::create_directories(a.out_dir);
    Table t({"seed", "rounds", "violated", "invariants_ok", "certification_rate", "commits", "mean_commit_latency",
             "messages_per_epoch", "trace", "summary"});
    bool violated = false;
    for (std::size_t i = 0; i < batch.runs.size(); ++i) {
        const auto& r = batch.runs[i];
        const auto seed = configs[i].seed;
        const fs::path trace = fs::path(a.out_dir) / ("trace-" + std::to_string(seed) + ".csv");
        const fs::path summary = fs::path(a.out_dir) / ("summary-" + std::to_string(seed) + ".json");
        write_file(trace, [&](std::ostream& os) { report::write_trace_csv(os, r.trace); });
        write_file(summary, [&](std::ostream& os) { report::write_summary_json(os, configs[i], r); });
        const protocol::Epoch full = (configs[i].rounds - 1) / 3;
        t.add({static_cast<std::int64_t>(seed), static_cast<std::int64_t>(configs[i].rounds), r.safety.violated,
               r.invariants.ok(), full >= 1 ? r.liveness.certification_rate(1, full) : 0.0,
               static_cast<std::int64_t>(r.liveness.commit_count()), r.liveness.mean_commit_latency(),
               full >= 1 ? r.trace.messages_per_epoch(1, full) : 0.0, trace.string(), summary.string()});
        if (r.safety.violated) {
            violated = true;
            dump_witness(r, seed);
        }
        if (!r.invariants.ok())
            for (const auto& n : r.invariants.notes) std::cerr << "invariant: " << n << '\n';
    }
    if (a.runs > 1)
        write_file(fs::path(a.out_dir) / ("batch-" + std::to_string(a.seed) + ".json"),
                   [&](std::ostream& os) { report::write_batch_json(os, configs, batch); });
    emit(t, a.common);
    return violated ? 2 : 0;
}

// ---------------------------------------------------------------------------

struct CrossArgs {
    Common common;
    ParamArgs params;
    std::uint32_t runs = 4;
    std::uint64_t epochs = 100;
    std::uint64_t seed = 1;
    std::uint64_t trials = 100000;
    std::uint32_t tuples = 5;
};

int crosscheck(const CrossArgs& a)
{
    if (a.runs == 0) throw std::invalid_argument("--runs must be at least 1");
    if (a.epochs < 10) throw std::invalid_argument("--epochs must be at least 10");
    const auto p = resolve(a.common, a.params);
    Table t({"check", "measured", "predicted", "tolerance", "pass"});
    bool all = true;
    auto add = [&](const std::string& name, double measured, double predicted, double tol) {
        const bool ok = std::abs(measured - predicted) <= tol;
        all = all && ok;
        t.add({name, measured, predicted, tol, ok});
    };

    // propagation: Monte Carlo against the Markov chain on small random instances
    std::mt19937_64 rng(a.seed);
    for (std::uint32_t done = 0; done < a.tuples;) {
        const auto n = std::uniform_int_distribution<std::uint32_t>(5, 30)(rng);
        const auto chi = std::uniform_int_distribution<std::uint32_t>(1, n)(rng);
        const double pp = std::uniform_real_distribution<double>(0.01, 0.3)(rng);
        const auto k = std::uniform_int_distribution<std::uint32_t>(1, 8)(rng);
        const double ex = propagation_exact(n, chi, pp, k);
        if (ex < 0.01 || ex > 0.99) continue;
        const double emp = static_cast<double>(simnet::propagation_trials(n, chi, pp, k, a.trials, rng())) / a.trials;
        std::ostringstream name;
        name << "propagation n=" << n << " chi=" << chi << " p=" << report::format_number(pp) << " k=" << k;
        add(name.str(), emp, ex, 3 * std::sqrt(ex * (1 - ex) / a.trials));
        ++done;
    }

    std::vector<simnet::SimConfig> configs;
    for (std::uint32_t i = 0; i < a.runs; ++i) {
        simnet::SimConfig c;
        c.params = p;
        c.schedule.model = NetworkModel::synchronous;
        c.seed = a.seed + i;
        c.rounds = 3 * (a.epochs + 1);
        configs.push_back(c);
    }
    const auto batch = simnet::run_batch(configs, 1);
    double certified = 0, msgs = 0;
    for (const auto& r : batch.runs) {
        certified += r.liveness.certification_rate(1, a.epochs) * static_cast<double>(a.epochs);
        msgs += r.trace.messages_per_epoch(1, a.epochs);
    }
    const double total_epochs = static_cast<double>(a.runs) * static_cast<double>(a.epochs);
    const double qc = liveness_qc_probability(p, Mode::exact).value;
    add("certification rate", certified / total_epochs, qc, 3 * std::sqrt(qc * (1 - qc) / total_epochs));
    const double expected = expected_messages_per_epoch(p).total;
    add("messages per epoch", msgs / a.runs, expected, 0.05 * expected);
    for (const auto& r : batch.runs)
        if (r.safety.violated || !r.invariants.ok()) all = false;
    add("safety violations", static_cast<double>(batch.safety_violations), 0.0, 0.0);

    emit(t, a.common);
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"QScale analysis and simulation toolkit"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every subcommand");

    SafetyArgs safety;
    auto* s = app.add_subcommand("analyze-safety", "Safety-violation probability against kappa");
    add_common(s, safety.common);
    add_params(s, safety.params, "psync-eval-49");
    s->add_option("--kappa-max", safety.kappa_max, "Largest kappa")->check(CLI::Range(2u, 1000u))->capture_default_str();
    s->add_option("--mode", safety.mode, "bound (closed forms) or exact")->check(CLI::IsMember({"bound", "exact"}))
        ->capture_default_str();

    LivenessArgs liveness;
    auto* l = app.add_subcommand("analyze-liveness", "Probability that kappa consecutive epochs certify");
    add_common(l, liveness.common);
    add_params(l, liveness.params, "psync-eval-74");
    l->add_option("--kappa-max", liveness.kappa_max, "Largest kappa")->check(CLI::Range(1u, 1000u))->capture_default_str();
    l->add_option("--mode", liveness.mode, "bound or exact")->check(CLI::IsMember({"bound", "exact"}))->capture_default_str();

    PropagationArgs prop;
    auto* pr = app.add_subcommand("propagation", "Probability that a message reaches every process");
    add_common(pr, prop.common);
    pr->add_option("--n", prop.n, "Processes")->capture_default_str();
    pr->add_option("--chi", prop.chi, "Initial holders (list)")->capture_default_str();
    pr->add_option("--p-prop", prop.p_prop, "Per-pair forwarding probability")->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    pr->add_option("--k", prop.k, "Propagation rounds (list)")->capture_default_str();

    CommitteeArgs comm;
    auto* cm = app.add_subcommand("committee", "Static-committee safety violation (defaults to the n=500/1000 grid)");
    add_common(cm, comm.common);
    cm->add_option("--n", comm.n, "Processes");
    cm->add_option("--f", comm.f, "Byzantine processes");
    cm->add_option("--c", comm.c, "Committee sizes (list)");
    cm->add_option("--target-log2", comm.target_log2, "Liveness target as a power of two")->capture_default_str();
    cm->add_option("--grid", comm.grid, "Threshold grid steps; 0 scans every integer threshold")->capture_default_str();

    ComplexityArgs cx;
    auto* c = app.add_subcommand("complexity", "Expected messages and bytes per epoch");
    add_common(c, cx.common);
    c->add_option("--preset", cx.presets, "Presets (list)")->check(CLI::IsMember(preset_names()))->capture_default_str();
    c->add_option("--epsilon", cx.epsilon, "Byzantine fraction");
    c->add_option("--kappa", cx.kappa, "Commit depth for the amortized cost");
    c->add_option("--size-model", cx.size_model, "Byte accounting")->check(CLI::IsMember({"block-payload", "wire"}))
        ->capture_default_str();

    KappaArgs kt;
    auto* k = app.add_subcommand("kappa-table", "Smallest kappa meeting each safety target");
    add_common(k, kt.common);
    k->add_option("--preset", kt.presets, "Presets (list)")->check(CLI::IsMember(preset_names()))->capture_default_str();
    k->add_option("--epsilon", kt.epsilons, "Byzantine fractions (list)")->capture_default_str();
    k->add_option("--target-log2", kt.targets_log2, "Targets as powers of two (list)")->capture_default_str();
    k->add_option("--mode", kt.mode, "bound or exact")->check(CLI::IsMember({"bound", "exact"}))->capture_default_str();
    k->add_option("--kappa-max", kt.kappa_max, "Give up above this kappa")->capture_default_str();

    SimArgs sim;
    auto* sm = app.add_subcommand("simulate", "Run the protocol simulator; exit code 2 on a safety violation");
    add_common(sm, sim.common);
    add_params(sm, sim.params, "sync-eval", true);
    sm->add_option("--seed", sim.seed, "Seed of the first run")->envname("QSCALE_SEED")->capture_default_str();
    sm->add_option("--rounds", sim.rounds, "Rounds per run (3 per epoch)")->capture_default_str();
    sm->add_option("--adversary", sim.adversary, "Strategy, e.g. silent-leader:1-4 or a+b")->capture_default_str();
    sm->add_option("--schedule", sim.schedule, "sync or a pre-GST policy")
        ->check(CLI::IsMember({"sync", "drop-to-correct", "adversary-chosen-subset", "delay-until-gst"}))
        ->capture_default_str();
    sm->add_option("--gst-round", sim.gst_round, "First round with guaranteed delivery")->capture_default_str();
    sm->add_option("--drop-rate", sim.drop_rate, "Drop probability under drop-to-correct")
        ->check(CLI::Range(0.0, 1.0))->capture_default_str();
    sm->add_option("--runs", sim.runs, "Runs; run i uses seed + i")->capture_default_str();
    sm->add_option("--parallelism", sim.parallelism, "Runs executed at once")->check(CLI::Range(1u, 1024u))
        ->capture_default_str();
    sm->add_option("--out-dir", sim.out_dir, "Directory for trace-<seed>.csv and summary-<seed>.json")
        ->capture_default_str();
    sm->add_option("--corrupted", sim.corrupted, "Explicit corrupted ids (exactly f of them)");
    sm->add_flag("--shuffle-inboxes", sim.shuffle, "Deliver each inbox in a seeded random order");
    sm->add_option("--fuzz-rate", sim.fuzz_rate, "Share of corrupted-sender messages to byte-corrupt")
        ->check(CLI::Range(0.0, 1.0))->capture_default_str();
    sm->add_option("--size-model", sim.size_model, "Byte accounting")->check(CLI::IsMember({"block-payload", "wire"}))
        ->capture_default_str();

    CrossArgs cr;
    auto* x = app.add_subcommand("crosscheck", "Compare analysis against Monte Carlo and the simulator");
    add_common(x, cr.common);
    add_params(x, cr.params, "psync-eval-74");
    x->add_option("--runs", cr.runs, "Simulator runs")->capture_default_str();
    x->add_option("--epochs", cr.epochs, "Epochs per run")->capture_default_str();
    x->add_option("--seed", cr.seed, "Seed")->envname("QSCALE_SEED")->capture_default_str();
    x->add_option("--trials", cr.trials, "Monte Carlo trials per propagation instance")->capture_default_str();
    x->add_option("--tuples", cr.tuples, "Random propagation instances")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (s->parsed()) return analyze_safety(safety);
        if (l->parsed()) return analyze_liveness(liveness);
        if (pr->parsed()) return propagation(prop);
        if (cm->parsed()) return committee(comm);
        if (c->parsed()) return complexity(cx);
        if (k->parsed()) return kappa_table_cmd(kt);
        if (sm->parsed()) return simulate(sim);
        if (x->parsed()) return crosscheck(cr);
    } catch (const std::exception& e) {
        std::cerr << "qscale: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
