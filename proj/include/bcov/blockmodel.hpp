#pragma once

#include <vector>
#include <Eigen/Dense>

#include "bcov/partition.hpp"

namespace bcov {

// Block covariance in natural coordinates: variance γ²_u, within-block
// covariance γ_uu, between-block covariance γ_uv. `between` holds the upper
// triangle (u < v) in row-major order. Singleton blocks keep within = 0 by
// convention; the value is not identified there.
struct BlockParams {
    std::vector<int> sizes;
    Eigen::VectorXd var;     // γ²_u
    Eigen::VectorXd within;  // γ_uu
    Eigen::VectorXd between; // γ_uv, u < v

    int k() const { return static_cast<int>(sizes.size()); }
    int p() const;
    double get_between(int u, int v) const;
    void set_between(int u, int v, double value);
};

// Semi-spectral coordinates: Γ = Q diag(A, λ_u I_{p_u - 1}) Q'. λ_u = 0 is a
// placeholder for singleton blocks (no contrast directions exist).
struct CanonicalParams {
    Eigen::MatrixXd A;      // k×k symmetric
    Eigen::VectorXd lambda; // per block

    int k() const { return static_cast<int>(lambda.size()); }
};

// Orthonormal rotation determined by block sizes alone, contiguous layout:
// columns 0..k-1 are the block indicators scaled by 1/√p_u, followed by each
// block's Helmert contrasts.
struct RotationQ {
    Eigen::MatrixXd Q;
    std::vector<int> sizes;
};

RotationQ build_Q(const std::vector<int>& sizes);

// Dense middle factor of the semi-spectral form, matching build_Q's column
// order: A in the leading k×k corner, then λ_u repeated p_u - 1 times.
Eigen::MatrixXd assemble_D(const CanonicalParams& cp, const std::vector<int>& sizes);

// a_uv = γ_uv √(p_u p_v), a_uu = γ²_u + (p_u-1)γ_uu, λ_u = γ²_u - γ_uu
CanonicalParams to_canonical(const BlockParams& bp);

// exact inverse: γ²_u = (a_uu + (p_u-1)λ_u)/p_u, γ_uu = (a_uu - λ_u)/p_u
BlockParams from_canonical(const CanonicalParams& cp, const std::vector<int>& sizes);

// Full covariance with entries placed by the partition's labels.
Eigen::MatrixXd expand(const BlockParams& bp, const Partition& part);

// Γ is PSD iff A is PSD and every λ_u is nonnegative; tested within tol.
bool is_psd(const CanonicalParams& cp, double tol = 1e-10);

// Gaussian MLE under a fixed partition: Â = M0/n, λ̂_u = q_u/(n(p_u-1)).
// Returns the canonical estimate and the expanded Σ̂, which equals
// block_average of the sample covariance exactly.
std::pair<CanonicalParams, Eigen::MatrixXd>
mle_given_partition(const Eigen::MatrixXd& Y, const Partition& part);

// Three-case averaging of a symmetric matrix over a partition: within-block
// diagonal mean, within-block off-diagonal mean, cross-block mean.
Eigen::MatrixXd block_average(const Eigen::MatrixXd& S, const Partition& part);

} // namespace bcov
