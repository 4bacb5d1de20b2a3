#include "bcov/blockmodel.hpp"
#include "bcov/errors.hpp"

#include <cmath>
#include <numeric>

namespace bcov {

namespace {

int tri_index(int u, int v, int k) {
    if (u > v) std::swap(u, v);
    // row-major upper triangle offset for (u, v), u < v
    return u * k - u * (u + 1) / 2 + (v - u - 1);
}

} // namespace

int BlockParams::p() const {
    return std::accumulate(sizes.begin(), sizes.end(), 0);
}

double BlockParams::get_between(int u, int v) const {
    return between[tri_index(u, v, k())];
}

void BlockParams::set_between(int u, int v, double value) {
    between[tri_index(u, v, k())] = value;
}

RotationQ build_Q(const std::vector<int>& sizes) {
    const int k = static_cast<int>(sizes.size());
    const int p = std::accumulate(sizes.begin(), sizes.end(), 0);
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(p, p);

    int row = 0, contrast_col = k;
    for (int u = 0; u < k; ++u) {
        const int m = sizes[u];
        if (m < 1) throw config_error("build_Q requires block sizes >= 1");
        for (int r = 0; r < m; ++r) Q(row + r, u) = 1.0 / std::sqrt(double(m));
        for (int i = 1; i < m; ++i) {
            double scale = 1.0 / std::sqrt(double(i) + double(i) * i);
            for (int r = 0; r + 1 < i; ++r) Q(row + r, contrast_col) = scale;
            Q(row + i - 1, contrast_col) = -double(i) * scale;
            Q(row + m - 1, contrast_col) = scale;
            ++contrast_col;
        }
        row += m;
    }
    return RotationQ{std::move(Q), sizes};
}

Eigen::MatrixXd assemble_D(const CanonicalParams& cp, const std::vector<int>& sizes) {
    const int k = cp.k();
    const int p = std::accumulate(sizes.begin(), sizes.end(), 0);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(p, p);
    D.topLeftCorner(k, k) = cp.A;
    int col = k;
    for (int u = 0; u < k; ++u)
        for (int i = 1; i < sizes[u]; ++i, ++col) D(col, col) = cp.lambda[u];
    return D;
}

CanonicalParams to_canonical(const BlockParams& bp) {
    const int k = bp.k();
    CanonicalParams cp;
    cp.A.resize(k, k);
    cp.lambda.resize(k);
    for (int u = 0; u < k; ++u) {
        const double pu = bp.sizes[u];
        cp.A(u, u) = bp.var[u] + (pu - 1.0) * bp.within[u];
        cp.lambda[u] = (bp.sizes[u] == 1) ? 0.0 : bp.var[u] - bp.within[u];
        for (int v = u + 1; v < k; ++v) {
            double a = bp.get_between(u, v) * std::sqrt(pu * bp.sizes[v]);
            cp.A(u, v) = a;
            cp.A(v, u) = a;
        }
    }
    return cp;
}

BlockParams from_canonical(const CanonicalParams& cp, const std::vector<int>& sizes) {
    const int k = cp.k();
    if (static_cast<int>(sizes.size()) != k)
        throw config_error("from_canonical: sizes/params dimension mismatch");
    BlockParams bp;
    bp.sizes = sizes;
    bp.var.resize(k);
    bp.within.resize(k);
    bp.between.resize(k * (k - 1) / 2);
    for (int u = 0; u < k; ++u) {
        const double pu = sizes[u];
        if (sizes[u] == 1) {
            bp.var[u] = cp.A(u, u);
            bp.within[u] = 0.0;
        } else {
            bp.var[u] = (cp.A(u, u) + (pu - 1.0) * cp.lambda[u]) / pu;
            bp.within[u] = (cp.A(u, u) - cp.lambda[u]) / pu;
        }
        for (int v = u + 1; v < k; ++v)
            bp.set_between(u, v, cp.A(u, v) / std::sqrt(pu * sizes[v]));
    }
    return bp;
}

Eigen::MatrixXd expand(const BlockParams& bp, const Partition& part) {
    if (part.sizes() != bp.sizes)
        throw config_error("expand: partition sizes do not match parameters");
    const int p = part.p();
    Eigen::MatrixXd sigma(p, p);
    for (int i = 0; i < p; ++i) {
        const int u = part.label(i);
        sigma(i, i) = bp.var[u];
        for (int j = i + 1; j < p; ++j) {
            const int v = part.label(j);
            double x = (u == v) ? bp.within[u] : bp.get_between(u, v);
            sigma(i, j) = x;
            sigma(j, i) = x;
        }
    }
    return sigma;
}

bool is_psd(const CanonicalParams& cp, double tol) {
    if (cp.lambda.minCoeff() < -tol) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cp.A,
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

std::pair<CanonicalParams, Eigen::MatrixXd>
mle_given_partition(const Eigen::MatrixXd& Y, const Partition& part) {
    const int n = static_cast<int>(Y.rows());
    const int p = static_cast<int>(Y.cols());
    const int k = part.k();
    if (p != part.p()) throw config_error("mle_given_partition: dimension mismatch");

    // block sums of the Gram matrix: T_uv = Σ_{j∈B_u, l∈B_v} (Y'Y)_jl
    Eigen::MatrixXd G = Y.transpose() * Y;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd diag_sum = Eigen::VectorXd::Zero(k);
    for (int j = 0; j < p; ++j) {
        const int u = part.label(j);
        diag_sum[u] += G(j, j);
        for (int l = 0; l < p; ++l) T(u, part.label(l)) += G(j, l);
    }

    CanonicalParams cp;
    cp.A.resize(k, k);
    cp.lambda.setZero(k);
    for (int u = 0; u < k; ++u) {
        const double pu = part.sizes()[u];
        for (int v = 0; v < k; ++v)
            cp.A(u, v) = T(u, v) / (n * std::sqrt(pu * part.sizes()[v]));
        if (part.sizes()[u] >= 2) {
            double q_u = diag_sum[u] - T(u, u) / pu;
            cp.lambda[u] = q_u / (n * (pu - 1.0));
        }
    }
    return {cp, expand(from_canonical(cp, part.sizes()), part)};
}

Eigen::MatrixXd block_average(const Eigen::MatrixXd& S, const Partition& part) {
    const int p = part.p();
    const int k = part.k();
    if (S.rows() != p || S.cols() != p)
        throw config_error("block_average: dimension mismatch");

    Eigen::VectorXd diag_mean = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd total = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < p; ++i) {
        const int u = part.label(i);
        diag_mean[u] += S(i, i);
        for (int j = 0; j < p; ++j) total(u, part.label(j)) += S(i, j);
    }

    BlockParams bp;
    bp.sizes = part.sizes();
    bp.var.resize(k);
    bp.within.setZero(k);
    bp.between.resize(k * (k - 1) / 2);
    for (int u = 0; u < k; ++u) {
        const double pu = part.sizes()[u];
        bp.var[u] = diag_mean[u] / pu;
        if (part.sizes()[u] >= 2)
            bp.within[u] = (total(u, u) - diag_mean[u]) / (pu * (pu - 1.0));
        for (int v = u + 1; v < k; ++v)
            bp.set_between(u, v, total(u, v) / (pu * part.sizes()[v]));
    }
    return expand(bp, part);
}

} // namespace bcov
