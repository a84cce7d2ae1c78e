#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qscale::analysis {

enum class Mode { bound, exact };
std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);

/// Whether the value is the probability of something bad (a safety violation,
/// a missed quorum) or of something good. Decides what "vacuous" means.
enum class Sense { failure, success };

struct BoundResult {
    double value = 0.0;  // raw clamped to [0, 1]
    double raw = 0.0;
    Mode mode = Mode::exact;
    Sense sense = Sense::failure;
    bool vacuous = false;  // bound mode only: raw carries no information
    std::vector<std::pair<std::string, double>> intermediates;

    static BoundResult make(double raw, Mode mode, Sense sense,
                            std::vector<std::pair<std::string, double>> intermediates = {});

    /// Failure probability regardless of sense (1 - value for success results).
    double failure() const { return sense == Sense::failure ? value : 1.0 - value; }
    /// Throws std::out_of_range for an unknown name.
    double get(std::string_view name) const;
};

}  // namespace qscale::analysis
