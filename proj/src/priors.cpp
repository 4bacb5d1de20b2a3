#include "bcov/priors.hpp"
#include "bcov/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace bcov {

namespace {

double gamma_logpdf(double x, double shape, double rate) {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    return shape * std::log(rate) - std::lgamma(shape) +
           (shape - 1.0) * std::log(x) - rate * x;
}

double cauchy_logpdf(double x) {
    return -std::log(3.141592653589793238 * (1.0 + x * x));
}

constexpr double kLog2 = 0.69314718055994530942;
constexpr double kLogPi = 1.1447298858494001741;

} // namespace

double lmvgamma(int k, double a) {
    double out = 0.25 * k * (k - 1.0) * kLogPi;
    for (int j = 0; j < k; ++j) out += std::lgamma(a - 0.5 * j);
    return out;
}

double inverse_wishart_logpdf(const Eigen::MatrixXd& X, double df,
                              const Eigen::MatrixXd& scale) {
    const int k = static_cast<int>(X.rows());
    Eigen::LLT<Eigen::MatrixXd> llt_s(scale), llt_x(X);
    if (llt_s.info() != Eigen::Success || llt_x.info() != Eigen::Success)
        return -std::numeric_limits<double>::infinity();
    double logdet_s =
        2.0 * Eigen::MatrixXd(llt_s.matrixL()).diagonal().array().log().sum();
    double logdet_x =
        2.0 * Eigen::MatrixXd(llt_x.matrixL()).diagonal().array().log().sum();
    return 0.5 * df * logdet_s - 0.5 * df * k * kLog2 - lmvgamma(k, 0.5 * df) -
           0.5 * (df + k + 1.0) * logdet_x -
           0.5 * llt_x.solve(scale).trace();
}

double inverse_gamma_logpdf(double x, double shape, double rate) {
    if (x <= 0.0) return -std::numeric_limits<double>::infinity();
    return shape * std::log(rate) - std::lgamma(shape) -
           (shape + 1.0) * std::log(x) - rate / x;
}

Eigen::MatrixXd hierarchical_A0(const Hyperparams& theta,
                                const std::vector<int>& sizes) {
    const int k = static_cast<int>(sizes.size());
    Eigen::MatrixXd a0(k, k);
    for (int u = 0; u < k; ++u) {
        const double su = std::sqrt(double(sizes[u]));
        for (int v = 0; v < k; ++v)
            a0(u, v) = theta.delta2 * su * std::sqrt(double(sizes[v]));
        a0(u, u) += theta.delta1 + sizes[u] * theta.delta3;
    }
    return a0;
}

double median_variance(const Eigen::MatrixXd& gram, int n) {
    const int p = static_cast<int>(gram.rows());
    if (p == 0 || n <= 0) throw data_error("median_variance needs data");
    std::vector<double> v(p);
    for (int j = 0; j < p; ++j) v[j] = gram(j, j) / n;
    std::sort(v.begin(), v.end());
    return (p % 2 == 1) ? v[p / 2] : 0.5 * (v[p / 2 - 1] + v[p / 2]);
}

PriorParams prior_params(const PriorSpec& spec, const StatsView& stats) {
    const int k = stats.k();
    PriorParams pp;
    pp.s0.resize(k);
    pp.lambda0.resize(k);

    switch (spec.regime) {
    case PriorRegime::Weak:
        pp.nu0 = 2.0;
        pp.A0 = spec.tau0 * Eigen::MatrixXd::Identity(k, k);
        pp.s0.setConstant(2.0);
        pp.lambda0.setConstant(spec.tau0);
        break;
    case PriorRegime::CrealKim: {
        if (spec.r0 < 0.0 || spec.r0 >= 1.0)
            throw config_error("Creal-Kim prior requires r0 in [0, 1)");
        pp.nu0 = 2.0;
        pp.A0 = Eigen::MatrixXd::Zero(k, k);
        for (int u = 0; u < k; ++u)
            pp.A0(u, u) = spec.tau0 * (1.0 + spec.r0 * (stats.sizes[u] - 1.0));
        pp.s0.setConstant(2.0);
        pp.lambda0.setConstant((1.0 - spec.r0) * spec.tau0);
        break;
    }
    case PriorRegime::GPrior: {
        // unit-information prior: centered on the MLE of the current partition
        pp.nu0 = 1.0;
        pp.A0 = stats.M0() / stats.n;
        Eigen::VectorXd q = stats.q();
        for (int u = 0; u < k; ++u) {
            const int pu = stats.sizes[u];
            if (pu >= 2) {
                if (q[u] <= 0.0)
                    throw data_error(
                        "g-prior is degenerate: a block of size >= 2 has zero "
                        "contrast energy");
                pp.s0[u] = pu - 1.0;
                pp.lambda0[u] = q[u] / (stats.n * (pu - 1.0));
            } else {
                pp.s0[u] = 1.0;
                pp.lambda0[u] = spec.tau0; // placeholder, no likelihood term
            }
        }
        break;
    }
    case PriorRegime::Hierarchical: {
        const Hyperparams& t = spec.theta;
        if (!(t.nu0 > 2.0) || !(t.s0 > 0.0) || !(t.delta1 > 0.0) ||
            t.delta2 < 0.0 || t.delta3 < 0.0)
            throw config_error("hierarchical hyperparameters out of support");
        pp.nu0 = t.nu0;
        pp.A0 = hierarchical_A0(t, stats.sizes);
        pp.s0.setConstant(t.s0);
        pp.lambda0.setConstant(t.delta1);
        break;
    }
    }
    return pp;
}

PosteriorParams posterior_params(const PriorParams& prior, const StatsView& stats) {
    const int k = stats.k();
    PosteriorParams post;
    post.sizes = stats.sizes;
    post.nu_n = prior.nu0 + stats.n;
    post.A_n = (prior.nu0 * prior.A0 + stats.M0()) / post.nu_n;
    post.s_n.resize(k);
    post.lambda_n.resize(k);
    Eigen::VectorXd q = stats.q();
    for (int u = 0; u < k; ++u) {
        if (stats.sizes[u] >= 2) {
            post.s_n[u] = prior.s0[u] + double(stats.n) * (stats.sizes[u] - 1.0);
            post.lambda_n[u] =
                (prior.s0[u] * prior.lambda0[u] + q[u]) / post.s_n[u];
        } else {
            post.s_n[u] = prior.s0[u];
            post.lambda_n[u] = prior.lambda0[u];
        }
    }
    return post;
}

Eigen::MatrixXd posterior_mean_sigma(const PosteriorParams& post, const Partition& part) {
    CanonicalParams cp{post.A_n, post.lambda_n};
    return expand(from_canonical(cp, part.sizes()), part);
}

CanonicalParams sample_A_lambda(const PosteriorParams& post, RandomStream& rng) {
    const int k = static_cast<int>(post.s_n.size());
    CanonicalParams cp;
    cp.A = rng.inverse_wishart(post.nu_n + k + 1, post.nu_n * post.A_n);
    cp.lambda.resize(k);
    for (int u = 0; u < k; ++u)
        cp.lambda[u] = rng.inverse_gamma(0.5 * (post.s_n[u] + 2.0),
                                         0.5 * post.s_n[u] * post.lambda_n[u]);
    return cp;
}

double hyperprior_logdensity(const Hyperparams& theta,
                             const HyperpriorConfig& hyper) {
    if (!(theta.nu0 > 2.0) || !(theta.s0 > 0.0) || !(theta.delta1 > 0.0) ||
        !(theta.delta2 > 0.0) || !(theta.delta3 > 0.0))
        return -std::numeric_limits<double>::infinity();
    auto rate = [&hyper](double b) {
        return hyper.scale_parametrization ? 1.0 / b : b;
    };
    return gamma_logpdf(theta.delta1, hyper.d1_shape, rate(hyper.d1_rate)) +
           gamma_logpdf(theta.delta2, hyper.d2_shape, rate(hyper.d2_rate)) +
           gamma_logpdf(theta.delta3, hyper.d3_shape, rate(hyper.d3_rate)) +
           cauchy_logpdf(std::log(theta.nu0 - 2.0)) +
           cauchy_logpdf(std::log(theta.s0));
}

} // namespace bcov
