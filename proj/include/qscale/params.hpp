#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qscale {

enum class NetworkModel { synchronous, partially_synchronous };

/// How the vote-phase lock check treats certified blocks at heights >= the
/// proposal height. `strict` reads the check literally; `ancestor_exempt`
/// ignores certified ancestors of the proposal.
enum class LockRule { strict, ancestor_exempt };

std::string_view to_string(NetworkModel m);
std::string_view to_string(LockRule r);
NetworkModel parse_network_model(std::string_view s);
LockRule parse_lock_rule(std::string_view s);

/// Protocol parameterization shared by the protocol, the simulator and the
/// analysis. The fault ratio is always derived from `n` and `f`.
struct ProtocolParams {
    std::uint32_t n = 1;
    std::uint32_t f = 0;
    double p_sample = 0.0;
    double p_vote = 0.0;
    double p_prop = 0.0;
    std::uint32_t q = 1;
    std::uint32_t kappa = 5;
    NetworkModel model = NetworkModel::synchronous;
    bool vote_forwarding = false;

    LockRule lock_rule = LockRule::ancestor_exempt;
    bool verify_vote_vrf = true;
    std::uint32_t txs_per_block = 1;

    double epsilon() const { return n == 0 ? 0.0 : static_cast<double>(f) / static_cast<double>(n); }
    std::uint32_t correct() const { return n - f; }

    /// Sets f to round(eps * n).
    ProtocolParams& with_epsilon(double eps);

    bool operator==(const ProtocolParams&) const = default;
};

struct ParamIssue {
    std::string field;
    std::string message;
};

struct Validation {
    std::vector<ParamIssue> errors;
    std::vector<ParamIssue> warnings;

    bool ok() const { return errors.empty(); }
    std::string describe() const;
};

Validation validate(const ProtocolParams& params);

/// Throws std::invalid_argument carrying every violated invariant.
void require_valid(const ProtocolParams& params);

/// Named parameter sets: sync-eval, psync-eval-49, psync-eval-74, psync-eval-98.
ProtocolParams preset(std::string_view name);
std::vector<std::string> preset_names();

/// Plain-text `key = value` form, one field per line, `#` starts a comment.
std::string serialize(const ProtocolParams& params);
ProtocolParams parse_params(std::string_view text, ProtocolParams base = {});
ProtocolParams load_params_file(const std::string& path, ProtocolParams base = {});

/// Applies a single `key = value` assignment. Unknown keys throw.
void assign_param(ProtocolParams& params, std::string_view key, std::string_view value);

}  // namespace qscale
