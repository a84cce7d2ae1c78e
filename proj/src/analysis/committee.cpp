#include "qscale/analysis/committee.hpp"

#include "qscale/analysis/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace qscale::analysis {

CommitteeResult committee_optimize(std::uint32_t n, std::uint32_t f, std::uint32_t c, double liveness_target,
                                   std::uint32_t grid)
{
    if (f > n) throw std::domain_error("committee_optimize: f must be <= n");
    if (c > n) throw std::domain_error("committee_optimize: c must be <= n");
    CommitteeResult best;
    best.c = c;
    if (c == 0) return best;

    const std::uint32_t steps = grid == 0 ? c : grid;
    for (std::uint32_t i = 0; i <= steps; ++i) {
        const auto t = static_cast<std::uint32_t>(grid == 0 ? i : static_cast<std::uint64_t>(c) * i / grid);
        const double live = hypergeom_cdf(n, n - f, c, t);
        if (!(live < liveness_target)) continue;
        const double safety = hypergeom_sf(n, f, c, t);
        if (best.feasible && !(safety < best.safety)) continue;
        best.feasible = true;
        best.t = t;
        best.o = grid == 0 ? static_cast<double>(t) / c : static_cast<double>(i) / grid;
        best.safety = safety;
        best.log2_safety = std::log2(safety);
        best.at_least = t == 0 ? 1.0 : hypergeom_sf(n, f, c, static_cast<std::int64_t>(t) - 1);
        best.liveness_cdf = live;
    }
    return best;
}

}  // namespace qscale::analysis
