#include "bcov/stats.hpp"
#include "bcov/errors.hpp"

#include <cmath>

namespace bcov {

Eigen::MatrixXd StatsView::M0() const {
    const int kk = k();
    Eigen::MatrixXd m(kk, kk);
    for (int u = 0; u < kk; ++u)
        for (int v = 0; v < kk; ++v)
            m(u, v) = T(u, v) / std::sqrt(double(sizes[u]) * sizes[v]);
    return m;
}

Eigen::VectorXd StatsView::q() const {
    const int kk = k();
    Eigen::VectorXd out(kk);
    for (int u = 0; u < kk; ++u) {
        // exact zero for singletons; roundoff may drive tiny negatives
        out[u] = std::max(0.0, diag_sum[u] - T(u, u) / sizes[u]);
    }
    return out;
}

SuffStats::SuffStats(const Eigen::MatrixXd& Y)
    : G_(Y.transpose() * Y), n_(static_cast<int>(Y.rows())) {
    init_capacity();
}

SuffStats::SuffStats(Eigen::MatrixXd gram, int n_obs)
    : G_(std::move(gram)), n_(n_obs) {
    if (G_.rows() != G_.cols()) throw config_error("gram matrix must be square");
    init_capacity();
}

void SuffStats::init_capacity() {
    const int p = static_cast<int>(G_.rows());
    R_.setZero(p, p);
    T_.setZero(p, p);
    d_.setZero(p);
    labels_.assign(p, -1);
    sizes_.clear();
}

void SuffStats::clear() {
    R_.setZero();
    T_.setZero();
    d_.setZero();
    labels_.assign(labels_.size(), -1);
    sizes_.clear();
    k_ = 0;
    assigned_ = 0;
}

void SuffStats::assign_all(const Partition& part) {
    if (part.p() != p()) throw config_error("partition dimension mismatch");
    clear();
    for (int i = 0; i < p(); ++i) {
        int u = part.label(i);
        add(i, (u < k_) ? u : k_);
    }
}

Partition SuffStats::partition() const {
    if (assigned_ != p())
        throw config_error("partition() requires every variable assigned");
    return Partition::from_labels(labels_);
}

void SuffStats::remove(int i) {
    const int u = labels_[i];
    if (u < 0) throw config_error("remove: variable is not assigned");
    labels_[i] = -1;
    --assigned_;

    const double gii = G_(i, i);
    Eigen::VectorXd r = R_.col(i).head(k_); // block sums of column i, incl. own
    T_.row(u).head(k_) -= r.transpose();
    T_.col(u).head(k_) -= r;
    T_(u, u) += gii; // row+col subtracted 2r[u]; true loss is 2r[u] - gii
    R_.row(u) -= G_.col(i).transpose();
    d_[u] -= gii;
    --sizes_[u];

    if (sizes_[u] == 0) drop_empty_block(u);
}

void SuffStats::drop_empty_block(int u) {
    const int last = k_ - 1;
    if (u != last) {
        // vacated slot takes over the last block; the row copy runs first so
        // the subsequent column copy reads T(u, last) = old T(last, last)
        // into the (u, u) diagonal slot
        R_.row(u) = R_.row(last);
        T_.row(u).head(k_) = T_.row(last).head(k_);
        T_.col(u).head(k_) = T_.col(last).head(k_);
        d_[u] = d_[last];
        sizes_[u] = sizes_[last];
        for (int& l : labels_)
            if (l == last) l = u;
    }
    R_.row(last).setZero();
    T_.row(last).head(k_).setZero();
    T_.col(last).head(k_).setZero();
    d_[last] = 0.0;
    sizes_.pop_back();
    --k_;
}

void SuffStats::merge_blocks(int a, int b) {
    if (a == b || a < 0 || b < 0 || a >= k_ || b >= k_)
        throw config_error("merge_blocks: invalid block pair");
    for (int& l : labels_)
        if (l == b) l = a;
    R_.row(a) += R_.row(b);
    const double t_ab = T_(a, b);
    for (int v = 0; v < k_; ++v) {
        if (v == a || v == b) continue;
        T_(a, v) += T_(b, v);
        T_(v, a) += T_(v, b);
    }
    T_(a, a) += T_(b, b) + 2.0 * t_ab;
    d_[a] += d_[b];
    sizes_[a] += sizes_[b];
    R_.row(b).setZero();
    T_.row(b).head(k_).setZero();
    T_.col(b).head(k_).setZero();
    d_[b] = 0.0;
    sizes_[b] = 0;
    drop_empty_block(b);
}

void SuffStats::add(int i, int u) {
    if (labels_[i] >= 0) throw config_error("add: variable already assigned");
    if (u < 0 || u > k_) throw config_error("add: block index out of range");
    const double gii = G_(i, i);

    if (u == k_) {
        R_.row(u) = G_.col(i).transpose();
        T_.row(u).head(k_) = R_.col(i).head(k_).transpose();
        T_.col(u).head(k_) = R_.col(i).head(k_);
        T_(u, u) = gii;
        d_[u] = gii;
        sizes_.push_back(1);
        ++k_;
    } else {
        R_.row(u) += G_.col(i).transpose();
        Eigen::VectorXd r = R_.col(i).head(k_); // post-update: includes gii
        T_.row(u).head(k_) += r.transpose();
        T_.col(u).head(k_) += r;
        T_(u, u) -= gii; // row+col added 2r[u]; true gain is 2r[u] - gii
        d_[u] += gii;
        ++sizes_[u];
    }
    labels_[i] = u;
    ++assigned_;
}

StatsView SuffStats::current_view() const {
    StatsView v;
    v.T = T_.topLeftCorner(k_, k_);
    v.diag_sum = d_.head(k_);
    v.sizes = sizes_;
    v.n = n_;
    v.p_assigned = assigned_;
    return v;
}

StatsView SuffStats::view_add(int i, int u) const {
    if (labels_[i] >= 0) throw config_error("view_add: variable already assigned");
    if (u < 0 || u > k_) throw config_error("view_add: block index out of range");
    const double gii = G_(i, i);
    const Eigen::VectorXd r = R_.col(i).head(k_); // i unassigned: no own term

    StatsView v;
    v.n = n_;
    v.p_assigned = assigned_ + 1;
    if (u == k_) {
        v.T.setZero(k_ + 1, k_ + 1);
        v.T.topLeftCorner(k_, k_) = T_.topLeftCorner(k_, k_);
        v.T.row(k_).head(k_) = r.transpose();
        v.T.col(k_).head(k_) = r;
        v.T(k_, k_) = gii;
        v.diag_sum.resize(k_ + 1);
        v.diag_sum.head(k_) = d_.head(k_);
        v.diag_sum[k_] = gii;
        v.sizes = sizes_;
        v.sizes.push_back(1);
    } else {
        v.T = T_.topLeftCorner(k_, k_);
        v.T.row(u) += r.transpose();
        v.T.col(u) += r;
        v.T(u, u) += gii;
        v.diag_sum = d_.head(k_);
        v.diag_sum[u] += gii;
        v.sizes = sizes_;
        ++v.sizes[u];
    }
    return v;
}

StatsView SuffStats::view_merge(int a, int b) const {
    if (a == b || a < 0 || b < 0 || a >= k_ || b >= k_)
        throw config_error("view_merge: invalid block pair");
    if (a > b) std::swap(a, b);

    StatsView v;
    v.n = n_;
    v.p_assigned = assigned_;
    v.T.resize(k_ - 1, k_ - 1);
    v.diag_sum.resize(k_ - 1);
    v.sizes.resize(k_ - 1);

    // old index -> new index, dropping b and folding it into a
    auto remap = [&](int u) { return (u < b) ? u : u - 1; };
    for (int u = 0; u < k_; ++u) {
        if (u == b) continue;
        const int nu = remap(u);
        v.diag_sum[nu] = d_[u];
        v.sizes[nu] = sizes_[u];
        for (int w = 0; w < k_; ++w) {
            if (w == b) continue;
            v.T(nu, remap(w)) = T_(u, w);
        }
    }
    for (int w = 0; w < k_; ++w) {
        if (w == b || w == a) continue;
        const int nw = remap(w);
        v.T(a, nw) += T_(b, w);
        v.T(nw, a) += T_(b, w);
    }
    v.T(a, a) += T_(b, b) + 2.0 * T_(a, b);
    v.diag_sum[a] += d_[b];
    v.sizes[a] += sizes_[b];
    return v;
}

double SuffStats::refresh() {
    const int p = this->p();
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd d = Eigen::VectorXd::Zero(p);
    for (int j = 0; j < p; ++j) {
        const int u = labels_[j];
        if (u < 0) continue;
        R.row(u) += G_.col(j).transpose();
        d[u] += G_(j, j);
    }
    // T_vu = Σ_{j∈B_u} R_vj, with R already holding per-block row sums
    for (int j = 0; j < p; ++j) {
        const int u = labels_[j];
        if (u < 0) continue;
        T.col(u).head(k_) += R.col(j).head(k_);
    }
    double err = std::max((R - R_).cwiseAbs().maxCoeff(),
                          (T.topLeftCorner(k_, k_) - T_.topLeftCorner(k_, k_))
                              .cwiseAbs()
                              .maxCoeff());
    err = std::max(err, (d.head(k_) - d_.head(k_)).cwiseAbs().maxCoeff());
    R_ = R;
    T_ = T;
    d_ = d;
    return err;
}

} // namespace bcov
