#include "qscale/analysis/bounds.hpp"

#include "qscale/analysis/numerics.hpp"
#include "qscale/analysis/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace qscale::analysis {

namespace {

using Im = std::vector<std::pair<std::string, double>>;

constexpr double inf = std::numeric_limits<double>::infinity();

// delta^2 E / (2 + delta) with delta = t/E - 1, rewritten as (t - E)^2 / (t + E)
// so that E = 0 is well defined.
double upper_exponent(double t, double E)
{
    if (t + E <= 0.0) return 0.0;
    return (t - E) * (t - E) / (t + E);
}

double delta_of(double t, double E) { return E > 0.0 ? t / E - 1.0 : inf; }

// count * log(1 - p), with 0 * log(0) = 0
double log_miss(std::int64_t count, double p)
{
    if (count == 0) return 0.0;
    if (p >= 1.0) return -inf;
    return static_cast<double>(count) * std::log1p(-p);
}

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

void require_kappa(std::uint32_t kappa, const char* what)
{
    if (kappa < 2) throw std::domain_error(std::string(what) + ": kappa must be >= 2");
}

}  // namespace

double chernoff_lower(double expectation, double delta)
{
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("chernoff_lower: delta must lie in (0, 1)");
    if (expectation < 0.0) throw std::domain_error("chernoff_lower: expectation must be >= 0");
    return std::exp(-delta * delta * expectation / 2.0);
}

double chernoff_upper(double expectation, double delta)
{
    if (!(delta >= 0.0)) throw std::domain_error("chernoff_upper: delta must be >= 0");
    if (expectation < 0.0) throw std::domain_error("chernoff_upper: expectation must be >= 0");
    return std::exp(-delta * delta * expectation / (2.0 + delta));
}

BoundResult psync_cert_bound(const ProtocolParams& params, Mode mode)
{
    const double m = static_cast<double>(params.n) + params.f;
    const double q = params.q;
    const double E = m * params.p_vote / 2.0;
    const std::int64_t cands = (static_cast<std::int64_t>(params.n) + params.f) / 2;
    if (mode == Mode::bound) {
        if (q < E)
            throw std::domain_error("psync_cert_bound: bound mode needs q >= (n+f) p_vote / 2 = " + fmt(E));
        return BoundResult::make(std::exp(-upper_exponent(q, E)), mode, Sense::failure,
                                 {{"delta", delta_of(q, E)}, {"mu", E}});
    }
    return BoundResult::make(binom_tail(cands, params.p_vote, params.q), mode, Sense::failure,
                             {{"candidates", static_cast<double>(cands)}, {"mu", static_cast<double>(cands) * params.p_vote}});
}

BoundResult psync_safety_violation(const ProtocolParams& params, std::uint32_t kappa, Mode mode)
{
    require_kappa(kappa, "psync_safety_violation");
    auto cert = psync_cert_bound(params, mode);
    double raw = std::pow(2.0 * cert.value, static_cast<double>(kappa - 1));
    Im im = cert.intermediates;
    im.emplace_back("cert", cert.value);
    im.emplace_back("log2", std::log2(raw));
    return BoundResult::make(raw, mode, Sense::failure, std::move(im));
}

BoundResult sync_byz_cert_bound(const ProtocolParams& params, Mode mode)
{
    const double mu = static_cast<double>(params.f) * params.p_vote;
    const double q = params.q;
    if (mode == Mode::bound) {
        if (q < mu) throw std::domain_error("sync_byz_cert_bound: bound mode needs q >= eps n p_vote = " + fmt(mu));
        return BoundResult::make(std::exp(-upper_exponent(q, mu)), mode, Sense::failure,
                                 {{"delta", delta_of(q, mu)}, {"mu", mu}});
    }
    return BoundResult::make(binom_tail(params.f, params.p_vote, params.q), mode, Sense::failure, {{"mu", mu}});
}

BoundResult sync_safety_violation(const ProtocolParams& params, std::uint32_t kappa, Mode mode)
{
    require_kappa(kappa, "sync_safety_violation");
    const double km1 = static_cast<double>(kappa - 1);
    double term1, term2;
    Im im;
    if (mode == Mode::bound) {
        const double mu = static_cast<double>(params.f) * params.p_vote;
        if (params.q < mu) throw std::domain_error("sync_safety_violation: bound mode needs q >= eps n p_vote = " + fmt(mu));
        term1 = std::exp(-km1 * upper_exponent(params.q, mu));
        // (1/(kappa-1)!) ((n-1)/(3 p_prop))^(kappa-2), in logs
        const double ratio = params.p_prop > 0.0 ? (params.n - 1.0) / (3.0 * params.p_prop) : inf;
        const double lg = kappa == 2 ? 0.0 : static_cast<double>(kappa - 2) * std::log(ratio);
        term2 = std::exp(lg - std::lgamma(km1 + 1.0));
        im = {{"delta", delta_of(params.q, mu)}, {"mu", mu}};
    } else {
        term1 = std::pow(sync_byz_cert_bound(params, mode).value, km1);
        PropagationChain<double> chain(params.n, params.p_prop);
        auto v = chain.start(1);
        term2 = 1.0;
        for (std::uint32_t l = 2; l <= kappa; ++l) {
            for (int i = 0; i < 3; ++i) chain.advance(v);
            term2 *= chain.incomplete(v);
        }
    }
    im.emplace_back("byzantine_term", term1);
    im.emplace_back("propagation_term", term2);
    const double raw = std::max(term1, term2);
    im.emplace_back("log2", std::log2(raw));
    return BoundResult::make(raw, mode, Sense::failure, std::move(im));
}

BoundResult liveness_sample_bound(const ProtocolParams& params, double varphi, Mode mode)
{
    if (!(varphi > 0.0 && varphi < 1.0)) throw std::domain_error("liveness_sample_bound: varphi must lie in (0, 1)");
    const double m = params.correct();
    const double mp = m * params.p_sample;
    if (mode == Mode::bound) {
        const double lemma = 1.0 - 2.0 / (varphi * varphi * mp);
        return BoundResult::make(lemma, mode, Sense::success,
                                 {{"mean", mp}, {"lemma_form", lemma}, {"corollary_form", 1.0 - 8.0 / mp}});
    }
    // Pr(Bin(m, p) < x) = Pr(Bin <= ceil(x) - 1)
    const double x = (1.0 - varphi) * mp;
    const auto below = static_cast<std::int64_t>(std::ceil(x)) - 1;
    return BoundResult::make(1.0 - binom_cdf(params.correct(), params.p_sample, below), mode, Sense::success,
                             {{"mean", mp}, {"threshold", x}});
}

BoundResult liveness_candidate_fraction(const ProtocolParams& params, double a, double varphi, Mode mode)
{
    if (!(varphi > 0.0 && varphi < 1.0))
        throw std::domain_error("liveness_candidate_fraction: varphi must lie in (0, 1)");
    if (!(a > 0.0 && a < 1.0)) throw std::domain_error("liveness_candidate_fraction: a must lie in (0, 1)");
    const double m = params.correct();
    const double ps = params.p_sample;
    const double a_max = ps >= 1.0 ? 1.0 : 1.0 - std::exp(-(1.0 - varphi) * m * ps * ps / (1.0 - ps));
    if (!(a < a_max))
        throw std::domain_error("liveness_candidate_fraction: a = " + fmt(a) +
                                " violates a < 1 - exp(-(1-varphi)(1-eps)n p_sample^2/(1-p_sample)) = " + fmt(a_max));
    const double reach = -std::expm1((1.0 - varphi) * m * ps * (ps >= 1.0 ? -inf : std::log1p(-ps)));
    const double mu = m * reach;
    const double delta = 1.0 - a * m / mu;
    Im im{{"a_max", a_max}, {"mu", mu}, {"delta", delta}};

    if (mode == Mode::bound) {
        if (!(delta > 0.0))
            throw std::domain_error("liveness_candidate_fraction: a = " + fmt(a) + " needs a < mu/((1-eps)n) = " +
                                    fmt(mu / m));
        const double raw = 1.0 - 2.0 / (a * delta * delta * m) - 2.0 / (varphi * varphi * m * ps);
        im.emplace_back("corollary_form", 1.0 - 8.0 / (a * m) - 8.0 / (m * ps));
        im.emplace_back("corollary_constant_form", 1.0 - 13.0 / m - 8.0 / (m * ps));
        return BoundResult::make(raw, mode, Sense::success, std::move(im));
    }
    const std::int64_t mc = params.correct();
    const auto need = static_cast<std::int64_t>(std::ceil(a * m));
    double p = 0.0;
    for (std::int64_t c1 = 0; c1 <= mc; ++c1) {
        const double w = binom_pmf(mc, c1, ps);
        if (w == 0.0) continue;
        p += w * binom_tail(mc, -std::expm1(log_miss(c1, ps)), need);
    }
    im.emplace_back("threshold", static_cast<double>(need));
    return BoundResult::make(p, mode, Sense::success, std::move(im));
}

namespace {

// Certification probability for one epoch with a correct leader, mixing over
// who ends up holding the proposal when the vote round starts.
double qc_mixture(const ProtocolParams& params)
{
    const std::int64_t m = params.correct();
    const std::int64_t base = std::min<std::int64_t>(2, m);  // leader and next leader
    const std::int64_t others = m - base;
    std::vector<double> tail(static_cast<std::size_t>(m) + 1);
    for (std::int64_t c = 0; c <= m; ++c) tail[static_cast<std::size_t>(c)] = binom_tail(c, params.p_vote, params.q);

    double p = 0.0;
    for (std::int64_t k = 0; k <= others; ++k) {
        const double wk = binom_pmf(others, k, params.p_sample);
        if (wk < 1e-300) continue;
        for (std::int64_t b = 0; b <= base; ++b) {
            const double wb = binom_pmf(base, b, params.p_sample);
            if (wb == 0.0) continue;
            // first-layer disseminators: k others plus base members in the sample;
            // propagators: every holder
            const double r = -std::expm1(log_miss(k + b, params.p_sample) + log_miss(k + base, params.p_prop));
            const std::int64_t rest = others - k;
            double inner = 0.0;
            for (std::int64_t j = 0; j <= rest; ++j) {
                const double wj = binom_pmf(rest, j, r);
                if (wj != 0.0) inner += wj * tail[static_cast<std::size_t>(base + k + j)];
            }
            p += wk * wb * inner;
        }
    }
    return p;
}

}  // namespace

BoundResult liveness_qc_probability(const ProtocolParams& params, Mode mode)
{
    const double m = params.correct();
    const double mu = candidate_fraction * m * params.p_vote;
    const double theta = mu > 0.0 ? 1.0 - params.q / mu : -inf;
    Im im{{"mu", mu}, {"theta", theta}};
    if (mode == Mode::bound) {
        if (!(theta > 0.0))
            throw std::domain_error("liveness_qc_probability: theta = 1 - q/mu must be positive (q = " +
                                    std::to_string(params.q) + ", mu = " + fmt(mu) + ")");
        const double f1 = 1.0 - 13.0 / m - 8.0 / (m * params.p_sample);
        const double f2 = 1.0 - 2.0 / (theta * theta * mu);
        im.emplace_back("candidate_term", f1);
        im.emplace_back("vote_term", f2);
        // two negative factors do not make a probability
        const double raw = (f1 <= 0.0 || f2 <= 0.0) ? std::min(f1, f2) : f1 * f2;
        return BoundResult::make(raw, mode, Sense::success, std::move(im));
    }
    double composed = std::numeric_limits<double>::quiet_NaN();
    try {
        const auto cand = liveness_candidate_fraction(params, candidate_fraction, 0.5, Mode::exact);
        const auto need = static_cast<std::int64_t>(std::ceil(candidate_fraction * m));
        composed = cand.value * binom_tail(need, params.p_vote, params.q);
    } catch (const std::domain_error&) {
    }
    im.emplace_back("lemma_composed", composed);
    return BoundResult::make(qc_mixture(params), mode, Sense::success, std::move(im));
}

BoundResult liveness_commit_probability(const ProtocolParams& params, std::uint32_t kappa, Mode mode)
{
    if (kappa == 0) return BoundResult::make(1.0, mode, Sense::success, {});
    auto qc = liveness_qc_probability(params, mode);
    double prop;
    if (mode == Mode::bound)
        prop = params.p_prop > 0.0 ? 1.0 - (params.n - 1.0) / (3.0 * params.p_prop) : -inf;
    else
        prop = propagation_exact(params.n, 1, params.p_prop, 3);
    const double prop_c = std::clamp(prop, 0.0, 1.0);
    auto r = BoundResult::make(std::pow(qc.value * prop_c, static_cast<double>(kappa)), mode, Sense::success,
                               {{"qc", qc.value}, {"propagation_term", prop}});
    if (mode == Mode::bound) r.vacuous = r.vacuous || qc.vacuous || prop <= 0.0;
    return r;
}

}  // namespace qscale::analysis
