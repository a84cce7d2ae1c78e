#include "qscale/analysis/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace qscale::analysis {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

double log_factorial(std::int64_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

double sum_range(std::int64_t lo, std::int64_t hi, auto&& log_term)
{
    if (lo > hi) return 0.0;
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (std::int64_t i = lo; i <= hi; ++i) terms.push_back(log_term(i));
    return std::exp(log_sum_exp(terms));
}

}  // namespace

double log_sum_exp(std::span<const double> terms)
{
    double mx = neg_inf;
    for (double t : terms) mx = std::max(mx, t);
    if (mx == neg_inf) return neg_inf;
    long double sum = 0.0L, comp = 0.0L;
    for (double t : terms) {
        long double x = std::exp(static_cast<long double>(t - mx));
        long double s = sum + x;
        if (std::fabs(sum) >= std::fabs(x)) comp += (sum - s) + x;
        else comp += (x - s) + sum;
        sum = s;
    }
    return mx + static_cast<double>(std::log(sum + comp));
}

double log_choose(std::int64_t n, std::int64_t k)
{
    if (k < 0 || n < 0 || k > n) return neg_inf;
    if (k == 0 || k == n) return 0.0;
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double log_binom_pmf(std::int64_t n, std::int64_t k, double p)
{
    if (k < 0 || k > n) return neg_inf;
    if (p <= 0.0) return k == 0 ? 0.0 : neg_inf;
    if (p >= 1.0) return k == n ? 0.0 : neg_inf;
    return log_choose(n, k) + static_cast<double>(k) * std::log(p) + static_cast<double>(n - k) * std::log1p(-p);
}

double binom_pmf(std::int64_t n, std::int64_t k, double p) { return std::exp(log_binom_pmf(n, k, p)); }

double binom_tail(std::int64_t n, double p, std::int64_t t)
{
    if (t <= 0) return 1.0;
    if (t > n) return 0.0;
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    auto term = [&](std::int64_t k) { return log_binom_pmf(n, k, p); };
    double mean = static_cast<double>(n) * p;
    if (static_cast<double>(t) > mean) return std::min(1.0, sum_range(t, n, term));
    return std::clamp(1.0 - sum_range(0, t - 1, term), 0.0, 1.0);
}

double binom_cdf(std::int64_t n, double p, std::int64_t t)
{
    if (t < 0) return 0.0;
    if (t >= n) return 1.0;
    if (p <= 0.0) return 1.0;
    if (p >= 1.0) return 0.0;
    auto term = [&](std::int64_t k) { return log_binom_pmf(n, k, p); };
    double mean = static_cast<double>(n) * p;
    if (static_cast<double>(t) < mean) return std::min(1.0, sum_range(0, t, term));
    return std::clamp(1.0 - sum_range(t + 1, n, term), 0.0, 1.0);
}

namespace {

struct HgSupport {
    std::int64_t lo, hi;
    double log_total;
};

HgSupport hg_support(std::int64_t N, std::int64_t R, std::int64_t s)
{
    return {std::max<std::int64_t>(0, s - (N - R)), std::min(R, s), log_choose(N, s)};
}

double hg_log_term(std::int64_t N, std::int64_t R, std::int64_t s, std::int64_t i, double log_total)
{
    return log_choose(R, i) + log_choose(N - R, s - i) - log_total;
}

}  // namespace

double hypergeom_cdf(std::int64_t N, std::int64_t R, std::int64_t s, std::int64_t k)
{
    auto sup = hg_support(N, R, s);
    if (k < sup.lo) return 0.0;
    if (k >= sup.hi) return 1.0;
    auto term = [&](std::int64_t i) { return hg_log_term(N, R, s, i, sup.log_total); };
    return std::min(1.0, sum_range(sup.lo, k, term));
}

double hypergeom_sf(std::int64_t N, std::int64_t R, std::int64_t s, std::int64_t k)
{
    auto sup = hg_support(N, R, s);
    if (k < sup.lo) return 1.0;
    if (k >= sup.hi) return 0.0;
    auto term = [&](std::int64_t i) { return hg_log_term(N, R, s, i, sup.log_total); };
    return std::min(1.0, sum_range(k + 1, sup.hi, term));
}

}  // namespace qscale::analysis
