#pragma once

#include "qscale/analysis/result.hpp"
#include "qscale/params.hpp"
#include "qscale/size_model.hpp"

#include <optional>
#include <vector>

namespace qscale::analysis {

struct MessageEstimate {
    double propose = 0.0;      // n p_sample
    double disseminate = 0.0;  // (n p_sample)^2
    double vote = 0.0;         // n p_vote
    double propagate = 0.0;    // 3 n^2 p_prop
    double count = 0.0;        // sum of the four above
    double next_leader = 0.0;  // +1 per propose/disseminate sender: 1 + n p_sample
    double total = 0.0;        // count + next_leader

    double proposal_bytes = 0.0;  // size of one proposal message
    double vote_bytes = 0.0;
    double bytes = 0.0;           // all messages in `total`
    double leader_bytes = 0.0;    // sent and received by the epoch's leader
    std::string size_model;
};

MessageEstimate expected_messages_per_epoch(const ProtocolParams& params,
                                            const SizeModel& sizes = SizeModel::block_payload());

struct AmortizedCost {
    double value = 0.0;          // kappa * total / n
    double per_epoch = 0.0;      // total / n
    double verbatim_terms = 0.0; // kappa (p_sample + p_vote + 3 n p_prop)
};

/// Expected sends per process over the kappa epochs a commit takes.
AmortizedCost amortized_complexity(const ProtocolParams& params, std::uint32_t kappa);

struct KappaCell {
    std::uint32_t q = 0;
    double epsilon = 0.0;
    double target = 0.0;
    std::optional<std::uint32_t> kappa;  // none when above kappa_max
    double value = 0.0;                  // psync_safety_violation at kappa
};

/// Smallest kappa >= 2 with psync_safety_violation <= target, for every
/// (params, epsilon, target) combination, in that nesting order.
std::vector<KappaCell> kappa_table(const std::vector<ProtocolParams>& params, const std::vector<double>& epsilons,
                                   const std::vector<double>& targets, Mode mode, std::uint32_t kappa_max = 64);

}  // namespace qscale::analysis
