#pragma once

#include <Eigen/Dense>

#include "bcov/blockmodel.hpp"
#include "bcov/rng.hpp"
#include "bcov/stats.hpp"

namespace bcov {

// Hyperparameters of the hierarchical prior mean structure:
// A0 = δ2 ss' + diag(δ1 + p_u δ3) with s_u = √p_u, λ0_u = δ1.
struct Hyperparams {
    double nu0 = 3.0;
    double s0 = 2.0;
    double delta1 = 1.0;
    double delta2 = 1.0;
    double delta3 = 1.0;
};

enum class PriorRegime { Weak, CrealKim, GPrior, Hierarchical };

// Gamma hyperpriors on (δ1, δ2, δ3), stored as shape/rate pairs. The defaults
// center the idiosyncratic variance δ1 at 0.5 and keep the shared covariance
// targets δ2, δ3 concentrated near zero, so the cross-block and extra
// within-block components of the prior mean move only when the data push
// them; a diffuse prior on δ2 would leak its mean into every cross-block
// entry of E[Σ | Y] through the shrinkage weight ν0/(ν0+n). Setting
// scale_parametrization reads the second entry of each pair as a scale.
struct HyperpriorConfig {
    double d1_shape = 2.0, d1_rate = 4.0;
    double d2_shape = 1.0, d2_rate = 10.0;
    double d3_shape = 1.0, d3_rate = 10.0;
    bool scale_parametrization = false;
};

// A prior configuration. tau0 is the data scale (median sample variance),
// set once per dataset; theta and hyper matter only under the hierarchical
// regime.
struct PriorSpec {
    PriorRegime regime = PriorRegime::Weak;
    double r0 = 0.5;     // Creal-Kim equicorrelation of the prior mean
    double tau0 = 1.0;
    Hyperparams theta;
    HyperpriorConfig hyper;
};

// Regime-resolved conjugate hyperparameters for one partition:
// A ~ IW(nu0 + k + 1, nu0 A0), lambda_u ~ IG((s0_u+2)/2, s0_u lambda0_u / 2).
struct PriorParams {
    double nu0;
    Eigen::MatrixXd A0;
    Eigen::VectorXd s0;
    Eigen::VectorXd lambda0;
};

struct PosteriorParams {
    double nu_n;
    Eigen::MatrixXd A_n;
    Eigen::VectorXd s_n;
    Eigen::VectorXd lambda_n;
    std::vector<int> sizes;
};

// log of the multivariate gamma function Γ_k(a), a > (k-1)/2
double lmvgamma(int k, double a);

// density of IW(df, scale) in the convention E[X] = scale / (df - k - 1)
double inverse_wishart_logpdf(const Eigen::MatrixXd& X, double df,
                              const Eigen::MatrixXd& scale);

// density of IG(shape, rate), mean rate / (shape - 1)
double inverse_gamma_logpdf(double x, double shape, double rate);

// A0 = δ2 ss' + diag(δ1 + p_u δ3), s_u = √p_u
Eigen::MatrixXd hierarchical_A0(const Hyperparams& theta,
                                const std::vector<int>& sizes);

// median of G_jj / n, the weak/Creal-Kim scale anchor
double median_variance(const Eigen::MatrixXd& gram, int n);

// stats are consulted only by the g-prior (A0 = MLE) and for block sizes
PriorParams prior_params(const PriorSpec& spec, const StatsView& stats);

// nu_n = nu0 + n, nu_n A_n = nu0 A0 + n Â, s_n = s0 + n(p_u - 1),
// s_n λ_n = s0 λ0 + q_u; singleton blocks keep their prior (s, λ)
PosteriorParams posterior_params(const PriorParams& prior, const StatsView& stats);

// E[Σ | Y, B], the expanded (A_n, λ_n)
Eigen::MatrixXd posterior_mean_sigma(const PosteriorParams& post, const Partition& part);

// one draw from the conjugate conditional (A first, then λ in block order)
CanonicalParams sample_A_lambda(const PosteriorParams& post, RandomStream& rng);

// log density of the hyperprior: gamma laws on the deltas per `hyper`,
// log(ν0-2)~Cauchy(0,1), log s0~Cauchy(0,1); -inf outside the support
double hyperprior_logdensity(const Hyperparams& theta,
                             const HyperpriorConfig& hyper = {});

} // namespace bcov
