#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bcov/marginal.hpp"
#include "bcov/partition.hpp"
#include "bcov/priors.hpp"
#include "bcov/stats.hpp"

namespace bcov {

// Random-walk Metropolis with global scale adaptation toward a target
// acceptance rate (Robbins-Monro on the log scale) and a running empirical
// proposal covariance. Adaptation can be frozen; a zero initial scale is a
// legal degenerate configuration that never moves and is flagged.
class AdaptiveMetropolis {
public:
    AdaptiveMetropolis(int dim, double target_accept = 0.234,
                       double decay = 0.6, double init_scale = 0.1);

    using LogTarget = std::function<double(const Eigen::VectorXd&)>;

    // one MH step; x and log_target_value are updated in place on acceptance
    bool step(Eigen::VectorXd& x, double& log_target_value,
              const LogTarget& target, RandomStream& rng);

    void freeze() { frozen_ = true; }
    double accept_rate() const;
    bool degenerate() const;

private:
    int dim_;
    double target_accept_, decay_, scale0_;
    double log_scale_ = 0.0;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
    long t_ = 0;
    long proposed_ = 0, accepted_ = 0;
    bool frozen_ = false;
};

// x = (log(nu0 - 2), log s0, log delta1, log delta2, log delta3)
Eigen::VectorXd x_from_theta(const Hyperparams& theta);
Hyperparams theta_from_x(const Eigen::VectorXd& x);

// log p(theta) p(A, lambda | theta, sizes) in x coordinates (Jacobians of the
// delta transforms included; the Cauchy factors already live on the log scale)
double theta_log_target(const Eigen::VectorXd& x, const CanonicalParams& canon,
                        const std::vector<int>& sizes,
                        const HyperpriorConfig& hyper = {});

struct ChainConfig {
    int iterations = 5000;
    int burnin = 2500;
    int thin = 1;
    int sams_repeats = 5;
    bool do_gibbs = true;
    bool do_sams = true;
    bool learn_theta = true;      // hierarchical regime only
    bool theta_init_from_data = true;
    PriorSpec prior;
    MfmPrior mfm;
    std::uint64_t seed = 1;
    double am_target_accept = 0.234;
    double am_decay = 0.6;
    double am_init_scale = 0.1;
};

struct ChainOutput {
    ChainConfig config;            // echo, with the resolved tau0 / theta0
    std::vector<Partition> partition_trace; // retained iterations
    std::vector<double> log_marg_trace;     // retained iterations
    std::vector<int> k_trace;               // every iteration
    std::vector<Hyperparams> theta_trace;   // every iteration (hierarchical)
    Eigen::MatrixXd sigma_mean;    // mean of E[Σ|Y,B_t] over retained draws
    Eigen::MatrixXd psm;
    double final_log_marg = 0.0;
    double gibbs_move_rate = 0.0;  // fraction of label updates that moved
    double sams_accept_rate = 0.0;
    double theta_accept_rate = 0.0;
    bool am_degenerate = false;
};

// Full MCMC over (B, theta): per iteration one Gibbs label scan, sams_repeats
// merge-split proposals, and (hierarchical) a conjugate (A, lambda) draw
// followed by one adaptive-MH theta update.
ChainOutput run_chain(const Eigen::MatrixXd& Y, const ChainConfig& config);

struct EstimateResult {
    Eigen::MatrixXd sigma_hat;   // posterior mean covariance
    Partition map_partition;     // retained argmax of log p(B) + log p(Y|B,θ)
    Eigen::MatrixXd psm;
    double map_score = 0.0;
};

EstimateResult estimate(const ChainOutput& output);

} // namespace bcov
