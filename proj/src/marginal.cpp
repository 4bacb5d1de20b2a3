#include "bcov/marginal.hpp"
#include "bcov/errors.hpp"

#include <cmath>
#include <limits>

namespace bcov {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kLog2 = 0.69314718055994530942;

double logdet_pd(const Eigen::MatrixXd& m, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw numeric_error(std::string(what) + " is not positive definite");
    return 2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
}

} // namespace

double loglik(const CanonicalParams& cp, const StatsView& stats) {
    const int k = stats.k();
    const double n = stats.n;
    Eigen::LLT<Eigen::MatrixXd> llt(cp.A);
    if (llt.info() != Eigen::Success)
        throw numeric_error("loglik: A is not positive definite");
    double logdet_a =
        2.0 * Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();

    double out = -0.5 * n * stats.p_assigned * kLog2Pi - 0.5 * n * logdet_a -
                 0.5 * llt.solve(stats.M0()).trace();
    Eigen::VectorXd q = stats.q();
    for (int u = 0; u < k; ++u) {
        const int m = stats.sizes[u];
        if (m < 2) continue;
        if (!(cp.lambda[u] > 0.0))
            throw numeric_error("loglik: nonpositive lambda on a block with contrasts");
        out -= 0.5 * n * (m - 1.0) * std::log(cp.lambda[u]) +
               0.5 * q[u] / cp.lambda[u];
    }
    return out;
}

MarginalEval::MarginalEval(PriorSpec spec, int n) : spec_(std::move(spec)), n_(n) {}

void MarginalEval::set_theta(const Hyperparams& theta) {
    spec_.theta = theta;
    c1_cache_.clear();
    block_cache_.clear();
}

double MarginalEval::c1(int k) const {
    if (static_cast<int>(c1_cache_.size()) <= k)
        c1_cache_.resize(k + 1, std::numeric_limits<double>::quiet_NaN());
    double& slot = c1_cache_[k];
    if (std::isnan(slot)) {
        double nu0;
        switch (spec_.regime) {
        case PriorRegime::Weak:
        case PriorRegime::CrealKim: nu0 = 2.0; break;
        case PriorRegime::GPrior: nu0 = 1.0; break;
        case PriorRegime::Hierarchical: nu0 = spec_.theta.nu0; break;
        default: throw config_error("unknown prior regime");
        }
        slot = 0.5 * double(n_) * k * kLog2 +
               lmvgamma(k, 0.5 * (nu0 + n_ + k + 1.0)) -
               lmvgamma(k, 0.5 * (nu0 + k + 1.0));
    }
    return slot;
}

double MarginalEval::operator()(const StatsView& stats) const {
    if (stats.n != n_)
        throw config_error("marginal evaluator bound to a different sample count");
    const int k = stats.k();
    const double n = n_;
    const PriorParams pp = prior_params(spec_, stats);
    const double nu_n = pp.nu0 + n;

    // log|ν0 A0|: closed forms where the prior mean is structured
    double logdet0 = 0.0;
    switch (spec_.regime) {
    case PriorRegime::Weak:
        logdet0 = k * std::log(2.0 * spec_.tau0);
        break;
    case PriorRegime::CrealKim:
        for (int u = 0; u < k; ++u)
            logdet0 += std::log(2.0 * spec_.tau0 *
                                (1.0 + spec_.r0 * (stats.sizes[u] - 1.0)));
        break;
    case PriorRegime::GPrior:
        logdet0 = logdet_pd(pp.A0, "g-prior scale (MLE of A)");
        break;
    case PriorRegime::Hierarchical: {
        // |diag(D) + δ2 ss'| = (∏ D_u)(1 + δ2 Σ p_u / D_u), s_u = √p_u
        const Hyperparams& t = spec_.theta;
        double rank1 = 0.0;
        for (int u = 0; u < k; ++u) {
            double d = t.delta1 + stats.sizes[u] * t.delta3;
            logdet0 += std::log(d);
            rank1 += stats.sizes[u] / d;
        }
        logdet0 += std::log1p(t.delta2 * rank1) + k * std::log(t.nu0);
        break;
    }
    }

    Eigen::MatrixXd psi_n = pp.nu0 * pp.A0 + stats.M0();
    double logdetn = logdet_pd(psi_n, "posterior scale matrix");

    double out = -0.5 * n * stats.p_assigned * kLog2Pi + c1(k) +
                 0.5 * (pp.nu0 + k + 1.0) * logdet0 -
                 0.5 * (nu_n + k + 1.0) * logdetn;

    const bool size_keyed = spec_.regime != PriorRegime::GPrior;
    Eigen::VectorXd q = stats.q();
    for (int u = 0; u < k; ++u) {
        const int m = stats.sizes[u];
        if (m < 2) continue;
        const double a0 = 0.5 * (pp.s0[u] + 2.0);
        const double b0 = 0.5 * pp.s0[u] * pp.lambda0[u];
        const double an = a0 + 0.5 * n * (m - 1.0);
        const double bn = b0 + 0.5 * q[u];
        if (size_keyed) {
            // a0, b0 depend on the block only through its size: cache
            // a0 log b0 - lgamma(a0) + lgamma(an)
            if (static_cast<int>(block_cache_.size()) <= m)
                block_cache_.resize(m + 1, std::numeric_limits<double>::quiet_NaN());
            double& slot = block_cache_[m];
            if (std::isnan(slot))
                slot = a0 * std::log(b0) - std::lgamma(a0) + std::lgamma(an);
            out += slot - an * std::log(bn);
        } else {
            out += a0 * std::log(b0) - an * std::log(bn) + std::lgamma(an) -
                   std::lgamma(a0);
        }
    }
    return out;
}

double log_marginal_likelihood(const StatsView& stats, const PriorSpec& spec) {
    return MarginalEval(spec, stats.n)(stats);
}

} // namespace bcov
