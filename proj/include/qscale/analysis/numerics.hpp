#pragma once

#include <cstdint>
#include <span>

namespace qscale::analysis {

/// log C(n, k); -inf outside 0 <= k <= n.
double log_choose(std::int64_t n, std::int64_t k);

/// log Pr(Bin(n, p) = k), exact at p = 0 and p = 1.
double log_binom_pmf(std::int64_t n, std::int64_t k, double p);
double binom_pmf(std::int64_t n, std::int64_t k, double p);

/// Pr(Bin(n, p) >= t). Sums whichever side of the distribution is smaller,
/// in log space with compensated accumulation.
double binom_tail(std::int64_t n, double p, std::int64_t t);

/// Pr(Bin(n, p) <= t).
double binom_cdf(std::int64_t n, double p, std::int64_t t);

/// Pr(X <= k) for X ~ HG(N, R, s): s draws without replacement from N items,
/// R of them marked.
double hypergeom_cdf(std::int64_t N, std::int64_t R, std::int64_t s, std::int64_t k);

/// Pr(X > k), summed directly so tiny tails keep their precision.
double hypergeom_sf(std::int64_t N, std::int64_t R, std::int64_t s, std::int64_t k);

/// log of sum(exp(terms)); terms may be -inf. Neumaier-compensated.
double log_sum_exp(std::span<const double> terms);

}  // namespace qscale::analysis
