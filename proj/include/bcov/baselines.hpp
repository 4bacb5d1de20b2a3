#pragma once

#include <functional>
#include <vector>
#include <Eigen/Dense>

#include "bcov/rng.hpp"

namespace bcov {

// uncentered 1/n sample covariance (the model is mean-zero); centering
// subtracts column means first and keeps the 1/n scaling
Eigen::MatrixXd sample_cov(const Eigen::MatrixXd& Y, bool center = false);

// zero all entries with |i - j| > bandwidth
Eigen::MatrixXd banding(const Eigen::MatrixXd& S, int bandwidth);

// trapezoid taper: weight 1 up to bandwidth/2, linear to 0 at bandwidth
Eigen::MatrixXd tapering(const Eigen::MatrixXd& S, int bandwidth);

// zero off-diagonal entries with |s_ij| < t
Eigen::MatrixXd hard_threshold(const Eigen::MatrixXd& S, double t);

// linear shrinkage toward tr(S)/p · I with the plug-in optimal intensity
Eigen::MatrixXd lw_linear(const Eigen::MatrixXd& Y);

// rotation-equivariant oracles: keep sample eigenvectors, replace the
// spectrum by the sorted true eigenvalues / by u_j' Σ u_j
Eigen::MatrixXd stein_plugin_oracle(const Eigen::MatrixXd& S,
                                    const Eigen::MatrixXd& sigma_true);
Eigen::MatrixXd fsopt_oracle(const Eigen::MatrixXd& S,
                             const Eigen::MatrixXd& sigma_true);

// ‖Σ̂ - Σ‖_F / ‖S - Σ‖_F; +inf when the sample covariance is exact
double frobenius_ratio(const Eigen::MatrixXd& sigma_hat,
                       const Eigen::MatrixXd& S,
                       const Eigen::MatrixXd& sigma_true);

bool is_pd_matrix(const Eigen::MatrixXd& m, double tol = 0.0);

// Cross-validated tuning: rows are dealt round-robin over shuffled folds;
// the score of a parameter is the summed Frobenius distance between the
// estimator fitted on the training folds and each held-out sample
// covariance. Returns the grid argmin (first on ties).
using FitFunction =
    std::function<Eigen::MatrixXd(const Eigen::MatrixXd& S_train, double param)>;
double cv_tune(const FitFunction& fit, const Eigen::MatrixXd& Y,
               const std::vector<double>& grid, int folds, RandomStream& rng);

} // namespace bcov
