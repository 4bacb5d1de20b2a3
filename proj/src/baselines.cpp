#include "bcov/baselines.hpp"
#include "bcov/errors.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace bcov {

Eigen::MatrixXd sample_cov(const Eigen::MatrixXd& Y, bool center) {
    const int n = static_cast<int>(Y.rows());
    if (n < 1) throw data_error("sample_cov needs at least one observation");
    if (!center) return Y.transpose() * Y / double(n);
    Eigen::MatrixXd c = Y.rowwise() - Y.colwise().mean();
    return c.transpose() * c / double(n);
}

Eigen::MatrixXd banding(const Eigen::MatrixXd& S, int bandwidth) {
    if (bandwidth < 0) throw config_error("banding requires bandwidth >= 0");
    Eigen::MatrixXd out = S;
    const int p = static_cast<int>(S.rows());
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (std::abs(i - j) > bandwidth) out(i, j) = 0.0;
    return out;
}

Eigen::MatrixXd tapering(const Eigen::MatrixXd& S, int bandwidth) {
    if (bandwidth < 0) throw config_error("tapering requires bandwidth >= 0");
    Eigen::MatrixXd out = S;
    const int p = static_cast<int>(S.rows());
    const double bw = bandwidth;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            const double d = std::abs(i - j);
            double w;
            if (d <= 0.5 * bw) w = 1.0;
            else if (d < bw) w = 2.0 - 2.0 * d / bw;
            else w = 0.0;
            out(i, j) *= w;
        }
    return out;
}

Eigen::MatrixXd hard_threshold(const Eigen::MatrixXd& S, double t) {
    if (t < 0.0) throw config_error("hard_threshold requires t >= 0");
    Eigen::MatrixXd out = S;
    const int p = static_cast<int>(S.rows());
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            if (i != j && std::abs(S(i, j)) < t) out(i, j) = 0.0;
    return out;
}

Eigen::MatrixXd lw_linear(const Eigen::MatrixXd& Y) {
    const int n = static_cast<int>(Y.rows());
    const int p = static_cast<int>(Y.cols());
    if (n < 2) throw data_error("lw_linear needs n >= 2");
    Eigen::MatrixXd S = sample_cov(Y);
    const double mu = S.trace() / p;
    Eigen::MatrixXd target = mu * Eigen::MatrixXd::Identity(p, p);
    const double d2 = (S - target).squaredNorm();
    if (d2 <= 0.0) return S;
    double b2 = 0.0;
    for (int i = 0; i < n; ++i) {
        Eigen::MatrixXd dev = Y.row(i).transpose() * Y.row(i) - S;
        b2 += dev.squaredNorm();
    }
    b2 /= double(n) * n;
    const double shrink = std::min(b2, d2) / d2;
    return shrink * target + (1.0 - shrink) * S;
}

namespace {

Eigen::MatrixXd rotation_equivariant(const Eigen::MatrixXd& S,
                                     const Eigen::MatrixXd& sigma_true,
                                     bool plugin) {
    if (S.rows() != sigma_true.rows())
        throw config_error("oracle estimator dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_s(S);
    if (es_s.info() != Eigen::Success)
        throw numeric_error("eigendecomposition of S failed");
    const Eigen::MatrixXd& u = es_s.eigenvectors(); // ascending eigenvalues
    Eigen::VectorXd delta;
    if (plugin) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_t(sigma_true,
                                                            Eigen::EigenvaluesOnly);
        delta = es_t.eigenvalues(); // ascending: ranks aligned with u's order
    } else {
        delta = (u.transpose() * sigma_true * u).diagonal();
    }
    return u * delta.asDiagonal() * u.transpose();
}

} // namespace

Eigen::MatrixXd stein_plugin_oracle(const Eigen::MatrixXd& S,
                                    const Eigen::MatrixXd& sigma_true) {
    return rotation_equivariant(S, sigma_true, true);
}

Eigen::MatrixXd fsopt_oracle(const Eigen::MatrixXd& S,
                             const Eigen::MatrixXd& sigma_true) {
    return rotation_equivariant(S, sigma_true, false);
}

double frobenius_ratio(const Eigen::MatrixXd& sigma_hat,
                       const Eigen::MatrixXd& S,
                       const Eigen::MatrixXd& sigma_true) {
    const double denom = (S - sigma_true).norm();
    if (denom == 0.0) return std::numeric_limits<double>::infinity();
    return (sigma_hat - sigma_true).norm() / denom;
}

bool is_pd_matrix(const Eigen::MatrixXd& m, double tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() > tol;
}

double cv_tune(const FitFunction& fit, const Eigen::MatrixXd& Y,
               const std::vector<double>& grid, int folds, RandomStream& rng) {
    if (grid.empty()) throw config_error("cv_tune requires a nonempty grid");
    if (folds < 2) throw config_error("cv_tune requires folds >= 2");
    const int n = static_cast<int>(Y.rows());
    if (n < folds) throw data_error("cv_tune: fewer observations than folds");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<int> fold_of(n);
    for (int i = 0; i < n; ++i) fold_of[order[i]] = i % folds;

    std::vector<double> loss(grid.size(), 0.0);
    for (int f = 0; f < folds; ++f) {
        int n_hold = 0;
        for (int i = 0; i < n; ++i) n_hold += (fold_of[i] == f);
        Eigen::MatrixXd train(n - n_hold, Y.cols()), hold(n_hold, Y.cols());
        int it = 0, ih = 0;
        for (int i = 0; i < n; ++i) {
            if (fold_of[i] == f) hold.row(ih++) = Y.row(i);
            else train.row(it++) = Y.row(i);
        }
        Eigen::MatrixXd s_train = sample_cov(train);
        Eigen::MatrixXd s_hold = sample_cov(hold);
        for (std::size_t g = 0; g < grid.size(); ++g)
            loss[g] += (fit(s_train, grid[g]) - s_hold).norm();
    }
    std::size_t best = 0;
    for (std::size_t g = 1; g < grid.size(); ++g)
        if (loss[g] < loss[best]) best = g;
    return grid[best];
}

} // namespace bcov
