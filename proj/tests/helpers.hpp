#pragma once

// Shared oracle utilities for the unit and acceptance binaries. Everything
// here is an independent re-derivation (or a boost.math wrapper), not a call
// back into the code under test, except where a helper merely builds inputs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>
#include <Eigen/Dense>

#include "bcov/blockmodel.hpp"
#include "bcov/partition.hpp"
#include "bcov/priors.hpp"
#include "bcov/rng.hpp"
#include "bcov/sampler.hpp"

namespace testutil {

inline double ks_statistic(std::vector<double> x,
                           const std::function<double(double)>& cdf) {
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double F = cdf(x[i]);
        d = std::max(d, std::abs(F - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - F));
    }
    return d;
}

// asymptotic Kolmogorov quantile at alpha = 0.001
inline double ks_critical(std::size_t n) {
    return 1.9495 / std::sqrt(static_cast<double>(n));
}

// one pass/fail unit of the distribution battery: pass iff value <= bound
struct StatCheck {
    std::string name;
    double value;
    double bound;
};

namespace detail {
inline void rgs_rec(std::vector<int>& a, int i, int maxval,
                    std::vector<std::vector<int>>& out) {
    const int p = static_cast<int>(a.size());
    if (i == p) {
        out.push_back(a);
        return;
    }
    for (int v = 0; v <= maxval + 1; ++v) {
        a[i] = v;
        rgs_rec(a, i + 1, std::max(maxval, v), out);
    }
}
} // namespace detail

// every set partition of {0..p-1} as a restricted growth string
inline std::vector<std::vector<int>> all_partitions(int p) {
    std::vector<std::vector<int>> out;
    if (p <= 0) return out;
    std::vector<int> a(p, 0);
    detail::rgs_rec(a, 1, 0, out);
    return out;
}

inline bcov::Partition random_partition(int p, int kmax,
                                        bcov::RandomStream& rng) {
    std::vector<int> labels(p);
    for (int i = 0; i < p; ++i) labels[i] = rng.uniform_int(kmax);
    return bcov::Partition::from_labels(labels);
}

inline Eigen::MatrixXd random_spd(int dim, bcov::RandomStream& rng,
                                  double ridge = 0.5) {
    Eigen::MatrixXd B(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) B(i, j) = rng.normal();
    return B * B.transpose() / dim +
           ridge * Eigen::MatrixXd::Identity(dim, dim);
}

// PSD block parameters with the singleton conventions already applied
inline bcov::BlockParams random_block_params(const std::vector<int>& sizes,
                                             bcov::RandomStream& rng) {
    const int k = static_cast<int>(sizes.size());
    bcov::CanonicalParams cp;
    cp.A = random_spd(k, rng);
    cp.lambda = Eigen::VectorXd::Zero(k);
    for (int u = 0; u < k; ++u)
        if (sizes[u] > 1) cp.lambda[u] = 0.1 + 2.0 * rng.uniform();
    return bcov::from_canonical(cp, sizes);
}

inline std::vector<int> random_sizes(int p, int kmax, bcov::RandomStream& rng) {
    return random_partition(p, kmax, rng).sizes();
}

inline Eigen::MatrixXd random_data(int n, int p, bcov::RandomStream& rng) {
    Eigen::MatrixXd Y(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) Y(i, j) = rng.normal();
    return Y;
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

// hyperprior density in the adaptive-MH working coordinates
// x = (log(nu0-2), log s0, log d1, log d2, log d3); the Cauchy factors are
// already densities of the log variables, the Gamma factors need Jacobians
inline double hyperprior_x_logdensity(const Eigen::VectorXd& x) {
    bcov::Hyperparams t = bcov::theta_from_x(x);
    return bcov::hyperprior_logdensity(t) + x[2] + x[3] + x[4];
}

} // namespace testutil
