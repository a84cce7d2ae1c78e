#pragma once

#include "qscale/analysis/result.hpp"
#include "qscale/params.hpp"

#include <cstdint>

namespace qscale::analysis {

/// exp(-delta^2 E / 2) bounding Pr(X <= (1 - delta) E). delta in (0, 1).
double chernoff_lower(double expectation, double delta);
/// exp(-delta^2 E / (2 + delta)) bounding Pr(X >= (1 + delta) E). delta >= 0.
double chernoff_upper(double expectation, double delta);

// Partial synchrony -------------------------------------------------------

/// Probability that at most (n+f)/2 candidates still yield q votes.
BoundResult psync_cert_bound(const ProtocolParams& params, Mode mode);
/// (2 * psync_cert_bound)^(kappa - 1).
BoundResult psync_safety_violation(const ProtocolParams& params, std::uint32_t kappa, Mode mode);

// Synchrony ---------------------------------------------------------------

/// Probability that the f Byzantine candidates alone reach q votes.
BoundResult sync_byz_cert_bound(const ProtocolParams& params, Mode mode);
/// Max of the Byzantine-only certification term and the propagation term.
BoundResult sync_safety_violation(const ProtocolParams& params, std::uint32_t kappa, Mode mode);

// Liveness ----------------------------------------------------------------

/// At least (1 - varphi)(1 - eps) n p_sample correct processes in the leader's sample.
BoundResult liveness_sample_bound(const ProtocolParams& params, double varphi, Mode mode);
/// At least an a-fraction of correct processes become candidates.
BoundResult liveness_candidate_fraction(const ProtocolParams& params, double a, double varphi, Mode mode);
/// The next leader collects q votes for the epoch's proposal.
BoundResult liveness_qc_probability(const ProtocolParams& params, Mode mode);
/// (qc probability * propagation term)^kappa.
BoundResult liveness_commit_probability(const ProtocolParams& params, std::uint32_t kappa, Mode mode);

/// Expected fraction of correct processes that end up as candidates (1 - 1/e).
inline constexpr double candidate_fraction = 0.6321;

}  // namespace qscale::analysis
