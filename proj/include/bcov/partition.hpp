#pragma once

#include <vector>
#include <Eigen/Dense>

#include "bcov/rng.hpp"

namespace bcov {

// Mixture-of-finite-mixtures partition prior: p(B) = V_p(k) ∏_u ρ^(|B_u|),
// component count k* ~ 1 + Poisson(1), Dirichlet concentration ρ per block.
struct MfmPrior {
    double rho = 1.0;
};

// Set partition of {0, ..., p-1}. Canonical form: block labels are 0-based
// and numbered by first occurrence, so equal partitions compare equal.
class Partition {
public:
    Partition() = default;
    static Partition from_labels(const std::vector<int>& raw);

    int p() const { return static_cast<int>(labels_.size()); }
    int k() const { return static_cast<int>(sizes_.size()); }
    const std::vector<int>& labels() const { return labels_; }
    const std::vector<int>& sizes() const { return sizes_; }
    int label(int i) const { return labels_[i]; }

    bool operator==(const Partition& o) const { return labels_ == o.labels_; }
    bool operator!=(const Partition& o) const { return !(*this == o); }

private:
    std::vector<int> labels_;
    std::vector<int> sizes_;
};

// log of the rising factorial x^(m) = x(x+1)...(x+m-1)
double log_rising(double x, int m);

// log V_p(k), the partition-count coefficient of the MFM EPPF.
double log_V(int p, int k, const MfmPrior& prior);

// log p(B) under the MFM prior.
double eppf_log(const Partition& part, const MfmPrior& prior);

// Forward draw: k* ~ 1+Poisson(1), w ~ Dir_{k*}(ρ), labels iid w, drop
// unused components. Distribution of the result matches eppf_log.
Partition sample_partition(const MfmPrior& prior, int p, RandomStream& rng);

// Adjusted Rand index via the pair-counting contingency form.
double ari(const Partition& a, const Partition& b);

// Posterior similarity matrix: fraction of trace partitions grouping (i,j).
Eigen::MatrixXd posterior_similarity(const std::vector<Partition>& trace);

// Co-clustering log loss -(1/p^2) Σ_{ii'} π0_ii' log π̂_ii' against the true
// partition's co-membership indicator (diagonal included). An exactly zero
// estimate at a true pair yields +infinity; subnormal underflow is clamped.
double r2_loss(const Eigen::MatrixXd& psm_estimate, const Partition& truth);

// Irreducible partition of a covariance matrix: i ~ j iff the diagonals match
// and rows agree off {i,j}, all within tol. Throws if the tolerance relation
// is not transitive (true equality is, but chained near-equalities may not be).
Partition recover_partition(const Eigen::MatrixXd& sigma, double tol = 1e-8);

} // namespace bcov
