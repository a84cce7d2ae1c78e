#pragma once

#include <cstdint>

namespace qscale::analysis {

/// Static committee of c members drawn from n processes, f of them Byzantine.
/// Threshold t = floor(c * o) for o on a grid of step 1/grid (grid = 0 scans
/// every integer t). Among thresholds with HG_CDF(n, n-f, c, t) < target the
/// one with the smallest Pr(X > t) wins, X the Byzantine members.
struct CommitteeResult {
    bool feasible = false;
    std::uint32_t c = 0;
    std::uint32_t t = 0;
    double o = 0.0;
    double safety = 1.0;       // Pr(X > t) = 1 - HG_CDF(n, f, c, t)
    double log2_safety = 0.0;
    double at_least = 1.0;     // Pr(X >= t) = 1 - HG_CDF(n, f, c, t - 1)
    double liveness_cdf = 1.0; // HG_CDF(n, n - f, c, t)
};

inline constexpr double default_liveness_target = 9.313225746154785e-10;  // 2^-30

CommitteeResult committee_optimize(std::uint32_t n, std::uint32_t f, std::uint32_t c,
                                   double liveness_target = default_liveness_target, std::uint32_t grid = 100);

}  // namespace qscale::analysis
