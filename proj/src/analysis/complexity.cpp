#include "qscale/analysis/complexity.hpp"

#include "qscale/analysis/bounds.hpp"

#include <cmath>

namespace qscale::analysis {

MessageEstimate expected_messages_per_epoch(const ProtocolParams& params, const SizeModel& sizes)
{
    MessageEstimate e;
    const double n = params.n;
    const double first = n * params.p_sample;
    e.propose = first;
    e.disseminate = first * first;
    e.vote = n * params.p_vote;
    e.propagate = 3.0 * n * n * params.p_prop;
    e.count = e.propose + e.disseminate + e.vote + e.propagate;
    e.next_leader = first > 0.0 ? 1.0 + first : 0.0;
    e.total = e.count + e.next_leader;

    e.proposal_bytes = static_cast<double>(sizes.proposal(params.n, params.txs_per_block));
    e.vote_bytes = static_cast<double>(sizes.vote());
    e.bytes = (e.total - e.vote) * e.proposal_bytes + e.vote * e.vote_bytes;

    // leader: initial send plus its own propagation, then propagation inflow,
    // dissemination copies that sample it, and the votes it collects
    const double per_process_prop = 3.0 * n * params.p_prop;
    const double sent = e.next_leader + per_process_prop;
    const double received = per_process_prop + first * params.p_sample;
    e.leader_bytes = (sent + received) * e.proposal_bytes + e.vote * e.vote_bytes;
    e.size_model = sizes.name;
    return e;
}

AmortizedCost amortized_complexity(const ProtocolParams& params, std::uint32_t kappa)
{
    const auto e = expected_messages_per_epoch(params);
    AmortizedCost a;
    const double n = params.n;
    a.per_epoch = n > 0 ? e.total / n : 0.0;
    a.value = kappa * a.per_epoch;
    a.verbatim_terms = kappa * (params.p_sample + params.p_vote + 3.0 * n * params.p_prop);
    return a;
}

std::vector<KappaCell> kappa_table(const std::vector<ProtocolParams>& params, const std::vector<double>& epsilons,
                                   const std::vector<double>& targets, Mode mode, std::uint32_t kappa_max)
{
    std::vector<KappaCell> out;
    for (const auto& base : params) {
        for (double eps : epsilons) {
            ProtocolParams p = base;
            p.with_epsilon(eps);
            for (double target : targets) {
                KappaCell cell{p.q, eps, target, std::nullopt, 1.0};
                for (std::uint32_t k = 2; k <= kappa_max; ++k) {
                    const double v = psync_safety_violation(p, k, mode).value;
                    if (v <= target) {
                        cell.kappa = k;
                        cell.value = v;
                        break;
                    }
                }
                out.push_back(cell);
            }
        }
    }
    return out;
}

}  // namespace qscale::analysis
