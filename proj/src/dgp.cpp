#include "bcov/dgp.hpp"

#include <cmath>

#include "bcov/blockmodel.hpp"
#include "bcov/errors.hpp"
#include "bcov/priors.hpp"

namespace bcov {

namespace {

void require_psd(const Eigen::MatrixXd& sigma, const char* what) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma,
                                                      Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= -1e-9)
        throw numeric_error(std::string(what) +
                            ": generated covariance is not positive semidefinite");
}

} // namespace

const std::vector<ScenarioKind>& all_scenario_kinds() {
    static const std::vector<ScenarioKind> kinds = {
        ScenarioKind::MA1,
        ScenarioKind::AR1,
        ScenarioKind::LongRange,
        ScenarioKind::Toeplitz,
        ScenarioKind::GroupedRandom,
        ScenarioKind::FactorBased,
        ScenarioKind::BlockSparseBanded,
        ScenarioKind::BlockSparseEntrywise,
        ScenarioKind::EigenDiscrete,
        ScenarioKind::EigenUniform,
        ScenarioKind::MixtureGrouped,
        ScenarioKind::RandomIW,
        ScenarioKind::DegenerateUnitEigen,
    };
    return kinds;
}

std::string scenario_name(ScenarioKind kind) {
    switch (kind) {
    case ScenarioKind::MA1: return "ma1";
    case ScenarioKind::AR1: return "ar1";
    case ScenarioKind::LongRange: return "long_range";
    case ScenarioKind::Toeplitz: return "toeplitz";
    case ScenarioKind::GroupedRandom: return "grouped_random";
    case ScenarioKind::FactorBased: return "factor_based";
    case ScenarioKind::BlockSparseBanded: return "block_sparse_banded";
    case ScenarioKind::BlockSparseEntrywise: return "block_sparse_entrywise";
    case ScenarioKind::EigenDiscrete: return "eigen_discrete";
    case ScenarioKind::EigenUniform: return "eigen_uniform";
    case ScenarioKind::MixtureGrouped: return "mixture_grouped";
    case ScenarioKind::RandomIW: return "random_iw";
    case ScenarioKind::DegenerateUnitEigen: return "degenerate_unit";
    }
    throw config_error("unknown scenario kind");
}

ScenarioKind scenario_from_name(const std::string& name) {
    for (ScenarioKind kind : all_scenario_kinds())
        if (scenario_name(kind) == name) return kind;
    throw config_error("unknown scenario: " + name);
}

Eigen::MatrixXd ordered_cov(ScenarioKind kind, int p, double rho, double H,
                            double alpha) {
    if (p < 1) throw config_error("ordered_cov requires p >= 1");
    Eigen::MatrixXd sigma(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            const int d = std::abs(i - j);
            double v;
            switch (kind) {
            case ScenarioKind::MA1:
                v = (d == 0) ? 1.0 : (d == 1 ? rho : 0.0);
                break;
            case ScenarioKind::AR1:
                v = std::pow(rho, d);
                break;
            case ScenarioKind::LongRange:
                // autocovariance of fractional Gaussian noise increments;
                // |d-1| keeps the d=0 term defined and the diagonal at 1
                v = 0.5 * (std::pow(d + 1.0, 2.0 * H) -
                           2.0 * std::pow(double(d), 2.0 * H) +
                           std::pow(std::abs(d - 1.0), 2.0 * H));
                break;
            case ScenarioKind::Toeplitz:
                v = (d == 0) ? 1.0 : rho * std::pow(double(d), -(alpha + 1.0));
                break;
            default:
                throw config_error("ordered_cov: not a distance-decay kind");
            }
            sigma(i, j) = v;
        }
    require_psd(sigma, "ordered_cov");
    return sigma;
}

std::pair<Partition, Eigen::MatrixXd>
grouped_random(int p, int kstar, double tau, double delta1, double delta2,
               double delta3, RandomStream& rng) {
    if (kstar < 1) throw config_error("grouped_random requires kstar >= 1");
    Eigen::VectorXd logw(kstar);
    for (int u = 0; u < kstar; ++u)
        logw[u] = std::log(std::max(0.1, std::pow(0.7, u + 1.0)));
    std::vector<int> labels(p);
    for (int i = 0; i < p; ++i) labels[i] = rng.categorical_log(logw);
    Partition part = Partition::from_labels(labels);

    Hyperparams theta;
    theta.delta1 = delta1;
    theta.delta2 = delta2;
    theta.delta3 = delta3;
    const int k = part.k();
    Eigen::MatrixXd a0 = hierarchical_A0(theta, part.sizes());

    for (int attempt = 0; attempt < 10; ++attempt) {
        CanonicalParams cp;
        cp.A = rng.inverse_wishart(tau + k + 1, tau * a0);
        cp.lambda.resize(k);
        for (int u = 0; u < k; ++u)
            cp.lambda[u] =
                rng.inverse_gamma(0.5 * (tau + 2.0), 0.5 * tau * delta1);
        Eigen::MatrixXd sigma = expand(from_canonical(cp, part.sizes()), part);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            sigma, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() > -1e-9) return {part, sigma};
    }
    throw numeric_error("grouped_random: no PSD draw in 10 attempts");
}

Partition factor_based_partition(int p) {
    const int g = static_cast<int>(std::lround(0.4 * p));
    std::vector<int> labels(p, 2);
    for (int i = 0; i < g; ++i) labels[i] = 0;
    for (int i = g; i < 2 * g && i < p; ++i) labels[i] = 1;
    return Partition::from_labels(labels);
}

Eigen::MatrixXd factor_based(int p) {
    if (p < 5) throw config_error("factor_based requires p >= 5");
    const Partition part = factor_based_partition(p);
    // factor variances 290 and 300; third factor -0.3 f1 + 0.925 f2 + N(0,1);
    // each variable adds unit observation noise on the diagonal
    const double v1 = 290.0, v2 = 300.0;
    const double v3 = 0.09 * v1 + 0.855625 * v2 + 1.0;
    const double cov13 = -0.3 * v1, cov23 = 0.925 * v2;
    Eigen::MatrixXd sigma(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            const int a = part.label(i), b = part.label(j);
            double v = 0.0;
            if (a == b) v = (a == 0) ? v1 : (a == 1 ? v2 : v3);
            else if ((a == 0 && b == 2) || (a == 2 && b == 0)) v = cov13;
            else if ((a == 1 && b == 2) || (a == 2 && b == 1)) v = cov23;
            sigma(i, j) = v;
            if (i == j) sigma(i, i) += 1.0;
        }
    return sigma;
}

namespace {

Eigen::MatrixXd block_diag_4I(int p, const Eigen::MatrixXd& a2) {
    const int h = p / 2;
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(p, p);
    sigma.topLeftCorner(h, h) = 4.0 * Eigen::MatrixXd::Identity(h, h);
    sigma.bottomRightCorner(h, h) = a2;
    return sigma;
}

} // namespace

Eigen::MatrixXd block_sparse_banded(int p) {
    if (p < 2 || p % 2 != 0) throw config_error("block_sparse requires even p");
    const int h = p / 2;
    Eigen::MatrixXd a2(h, h);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j)
            a2(i, j) = std::max(0.0, 1.0 - std::abs(i - j) / 10.0);
    return block_diag_4I(p, a2);
}

Eigen::MatrixXd block_sparse_entrywise(int p, RandomStream& rng) {
    if (p < 2 || p % 2 != 0) throw config_error("block_sparse requires even p");
    const int h = p / 2;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(h, h);
    for (int i = 0; i < h; ++i)
        for (int j = i + 1; j < h; ++j) {
            double v = (0.3 + 0.5 * rng.uniform());
            v *= (rng.uniform() < 0.2) ? 1.0 : 0.0;
            b(i, j) = v;
            b(j, i) = v;
        }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b, Eigen::EigenvaluesOnly);
    const double eps = std::max(-es.eigenvalues().minCoeff(), 0.0) + 0.01;
    return block_diag_4I(p, b + eps * Eigen::MatrixXd::Identity(h, h));
}

Eigen::MatrixXd eigen_based(int p, bool discrete, RandomStream& rng) {
    if (p < 5) throw config_error("eigen_based requires p >= 5");
    Eigen::MatrixXd z(p, p);
    for (int i = 0; i < p; ++i) z.row(i) = rng.normal_vec(p).transpose();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
    Eigen::MatrixXd u = qr.householderQ();
    Eigen::VectorXd rdiag =
        Eigen::MatrixXd(qr.matrixQR()).diagonal();
    for (int j = 0; j < p; ++j)
        if (rdiag[j] < 0.0) u.col(j) = -u.col(j);

    Eigen::VectorXd e(p);
    if (discrete) {
        const int g = static_cast<int>(std::lround(0.4 * p));
        for (int j = 0; j < p; ++j)
            e[j] = (j < g) ? 10.0 : (j < 2 * g ? 3.0 : 1.0);
    } else {
        for (int j = 0; j < p; ++j) e[j] = 1.0 + 9.0 * rng.uniform();
    }
    return u * e.asDiagonal() * u.transpose();
}

Eigen::MatrixXd mixture_grouped(int p, RandomStream& rng) {
    if (p < 5) throw config_error("mixture_grouped requires p >= 5");
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(p, p);
    for (int r = 0; r < 3; ++r)
        sigma += grouped_random(p, p / 5, 10.0, 0.5, 0.2, 0.3, rng).second;
    return sigma / 3.0;
}

Eigen::MatrixXd random_iw(int p, RandomStream& rng) {
    if (p < 5) throw config_error("random_iw requires p >= 5");
    Eigen::MatrixXd center = grouped_random(p, p / 5, 10.0, 0.5, 0.2, 0.3, rng).second;
    // df = p + 2 makes the scale multiplier df - p - 1 equal one: mean = center
    return rng.inverse_wishart(p + 2.0, center);
}

Eigen::MatrixXd degenerate_unit(int p) { return Eigen::MatrixXd::Identity(p, p); }

Eigen::MatrixXd sample_data(const Eigen::MatrixXd& sigma, int n, RandomStream& rng) {
    MvnSampler sampler(sigma);
    Eigen::MatrixXd data(n, sigma.rows());
    for (int i = 0; i < n; ++i) data.row(i) = sampler.draw(rng).transpose();
    return data;
}

ScenarioDraw draw_scenario(const ScenarioSpec& spec, RandomStream& rng) {
    ScenarioDraw out;
    switch (spec.kind) {
    case ScenarioKind::MA1:
    case ScenarioKind::AR1:
    case ScenarioKind::LongRange:
    case ScenarioKind::Toeplitz:
        out.sigma = ordered_cov(spec.kind, spec.p, spec.rho, spec.H, spec.alpha);
        break;
    case ScenarioKind::GroupedRandom: {
        auto [part, sigma] = grouped_random(spec.p, spec.kstar, spec.tau,
                                            spec.delta1, spec.delta2,
                                            spec.delta3, rng);
        out.truth = part;
        out.has_truth_partition = true;
        out.sigma = std::move(sigma);
        break;
    }
    case ScenarioKind::FactorBased:
        out.sigma = factor_based(spec.p);
        out.truth = factor_based_partition(spec.p);
        out.has_truth_partition = true;
        break;
    case ScenarioKind::BlockSparseBanded:
        out.sigma = block_sparse_banded(spec.p);
        break;
    case ScenarioKind::BlockSparseEntrywise:
        out.sigma = block_sparse_entrywise(spec.p, rng);
        break;
    case ScenarioKind::EigenDiscrete:
        out.sigma = eigen_based(spec.p, true, rng);
        break;
    case ScenarioKind::EigenUniform:
        out.sigma = eigen_based(spec.p, false, rng);
        break;
    case ScenarioKind::MixtureGrouped:
        out.sigma = mixture_grouped(spec.p, rng);
        break;
    case ScenarioKind::RandomIW:
        out.sigma = random_iw(spec.p, rng);
        break;
    case ScenarioKind::DegenerateUnitEigen:
        out.sigma = degenerate_unit(spec.p);
        break;
    }
    require_psd(out.sigma, scenario_name(spec.kind).c_str());
    out.data = sample_data(out.sigma, spec.n, rng);
    return out;
}

} // namespace bcov
