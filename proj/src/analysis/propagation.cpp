#include "qscale/analysis/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qscale::analysis {

std::string_view to_string(Mode m) { return m == Mode::bound ? "bound" : "exact"; }

Mode parse_mode(std::string_view s)
{
    if (s == "bound") return Mode::bound;
    if (s == "exact") return Mode::exact;
    throw std::invalid_argument("unknown mode '" + std::string(s) + "' (expected bound or exact)");
}

BoundResult BoundResult::make(double raw, Mode mode, Sense sense,
                              std::vector<std::pair<std::string, double>> intermediates)
{
    BoundResult r;
    r.raw = raw;
    r.value = std::isnan(raw) ? raw : std::clamp(raw, 0.0, 1.0);
    r.mode = mode;
    r.sense = sense;
    if (mode == Mode::bound) r.vacuous = sense == Sense::failure ? raw >= 1.0 : raw <= 0.0;
    r.intermediates = std::move(intermediates);
    return r;
}

double BoundResult::get(std::string_view name) const
{
    for (const auto& [k, v] : intermediates)
        if (k == name) return v;
    throw std::out_of_range("no intermediate named '" + std::string(name) + "'");
}

PropagationBound propagation_lower_bound(std::uint32_t n, std::uint32_t chi, double p_prop, std::uint32_t k)
{
    if (chi < 1 || chi > n) throw std::domain_error("propagation_lower_bound: chi must lie in [1, n]");
    if (k < 1) throw std::domain_error("propagation_lower_bound: k must be >= 1");
    const double missing = static_cast<double>(n - chi);
    const double rate = static_cast<double>(k) * static_cast<double>(chi) * p_prop;
    std::vector<std::pair<std::string, double>> im{{"n_minus_chi", missing}, {"k_chi_p", rate}};

    double strong = 1.0 - missing * std::exp(-rate);
    double weak;
    if (missing == 0.0) weak = 1.0;
    else if (rate <= 0.0) weak = -INFINITY;
    else weak = 1.0 - missing / rate;
    return {BoundResult::make(strong, Mode::bound, Sense::success, im),
            BoundResult::make(weak, Mode::bound, Sense::success, im)};
}

}  // namespace qscale::analysis
