#pragma once

#include <vector>

#include "bcov/priors.hpp"
#include "bcov/stats.hpp"

namespace bcov {

// Gaussian log-likelihood of the block model at fixed canonical parameters,
// constant included. A must be PD; λ_u must be positive wherever p_u >= 2.
double loglik(const CanonicalParams& cp, const StatsView& stats);

// Marginal-likelihood evaluator with lazy lgamma caches. The k-indexed and
// block-size-indexed tables depend only on (regime, θ, n), so the sampler's
// inner loop pays one small Cholesky per candidate partition.
class MarginalEval {
public:
    MarginalEval(PriorSpec spec, int n);

    const PriorSpec& spec() const { return spec_; }
    void set_theta(const Hyperparams& theta);

    double operator()(const StatsView& stats) const;

private:
    double c1(int k) const; // 2^{nk/2} and Γ_k ratio terms

    PriorSpec spec_;
    int n_;
    mutable std::vector<double> c1_cache_;
    mutable std::vector<double> block_cache_;
};

// log p(Y | B, prior): the conjugate integral over (A, λ), all constants kept
double log_marginal_likelihood(const StatsView& stats, const PriorSpec& spec);

} // namespace bcov
