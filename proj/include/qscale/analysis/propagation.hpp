#pragma once

#include "qscale/analysis/numerics.hpp"
#include "qscale/analysis/result.hpp"

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace qscale::analysis {

/// Closed-form lower bounds on all n processes holding a message after k
/// propagation rounds started by chi holders: `strong` is
/// 1 - (n - chi) exp(-k chi p), `weak` is 1 - (n - chi) / (k chi p).
struct PropagationBound {
    BoundResult strong;
    BoundResult weak;
};

PropagationBound propagation_lower_bound(std::uint32_t n, std::uint32_t chi, double p_prop, std::uint32_t k);

/// Transition matrix over holder counts 0..n: T(s, t) = Pr(Bin(n - s, 1 - (1 - p)^s) = t - s).
/// Upper triangular; row n (everyone holds) is absorbing.
template <class Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> propagation_matrix(std::uint32_t n, double p_prop)
{
    using std::exp;
    const auto N = static_cast<Eigen::Index>(n);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> T =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(N + 1, N + 1);
    for (Eigen::Index s = 0; s <= N; ++s) {
        const std::int64_t rest = N - s;
        // per-process reach probability r = 1 - (1-p)^s, kept in log form
        const double log_miss = p_prop >= 1.0 ? (s == 0 ? 0.0 : -INFINITY) : static_cast<double>(s) * std::log1p(-p_prop);
        const double r = -std::expm1(log_miss);
        for (std::int64_t j = 0; j <= rest; ++j) {
            double lt;
            if (r <= 0.0) lt = j == 0 ? 0.0 : -INFINITY;
            else if (r >= 1.0) lt = j == rest ? 0.0 : -INFINITY;
            else lt = log_choose(rest, j) + static_cast<double>(j) * std::log(r) + static_cast<double>(rest - j) * log_miss;
            T(s, s + j) = static_cast<Scalar>(exp(static_cast<Scalar>(lt)));
        }
    }
    return T;
}

/// Distribution over holder counts after repeated propagation rounds.
template <class Scalar = double>
class PropagationChain {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    PropagationChain(std::uint32_t n, double p_prop) : n_(n), T_(propagation_matrix<Scalar>(n, p_prop)) {}

    std::uint32_t n() const { return n_; }
    const Matrix& matrix() const { return T_; }

    /// Indicator of chi holders.
    Vector start(std::uint32_t chi) const
    {
        if (chi < 1 || chi > n_) throw std::domain_error("propagation: chi must lie in [1, n]");
        Vector v = Vector::Zero(static_cast<Eigen::Index>(n_) + 1);
        v(chi) = Scalar(1);
        return v;
    }

    /// One round: v <- v T, done as T^T v on the lower-triangular transpose.
    void advance(Vector& v) const
    {
        v = T_.transpose().template triangularView<Eigen::Lower>() * v;
    }

    Vector after(std::uint32_t chi, std::uint32_t k) const
    {
        Vector v = start(chi);
        for (std::uint32_t i = 0; i < k; ++i) advance(v);
        return v;
    }

    /// Mass already absorbed in state n.
    Scalar complete(const Vector& v) const { return v(static_cast<Eigen::Index>(n_)); }
    /// Mass not yet absorbed, summed directly (no cancellation near 1).
    Scalar incomplete(const Vector& v) const { return v.head(static_cast<Eigen::Index>(n_)).sum(); }

private:
    std::uint32_t n_;
    Matrix T_;
};

/// Pr(all n processes hold the message after k rounds | chi hold it now).
template <class Scalar = double>
Scalar propagation_exact(std::uint32_t n, std::uint32_t chi, double p_prop, std::uint32_t k)
{
    PropagationChain<Scalar> chain(n, p_prop);
    return chain.complete(chain.after(chi, k));
}

/// 1 - propagation_exact, computed from the unabsorbed mass.
template <class Scalar = double>
Scalar propagation_exact_failure(std::uint32_t n, std::uint32_t chi, double p_prop, std::uint32_t k)
{
    PropagationChain<Scalar> chain(n, p_prop);
    return chain.incomplete(chain.after(chi, k));
}

}  // namespace qscale::analysis
