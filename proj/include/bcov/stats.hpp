#pragma once

#include <vector>
#include <Eigen/Dense>

#include "bcov/partition.hpp"

namespace bcov {

// Block-sum statistics of a (candidate) partition, everything the likelihood
// and marginal need: T_uv = Σ_{j∈B_u, l∈B_v} G_jl and the per-block diagonal
// sums. p_assigned < p when the view covers a subset of the variables.
struct StatsView {
    Eigen::MatrixXd T;
    Eigen::VectorXd diag_sum;
    std::vector<int> sizes;
    int n = 0;
    int p_assigned = 0;

    int k() const { return static_cast<int>(sizes.size()); }

    // M0_uv = T_uv / √(p_u p_v), the Gram of the block-mean coordinates
    Eigen::MatrixXd M0() const;
    // q_u = diag_sum_u - T_uu / p_u, the contrast-coordinate energy (>= 0)
    Eigen::VectorXd q() const;
};

// Incremental sufficient statistics over one dataset. Variables may be
// unassigned (label -1); statistics always describe the assigned subset.
// Maintains R(u, j) = Σ_{l∈B_u} G_jl so a single-label move is O(p + k) and
// a candidate evaluation is O(k²) without mutation.
class SuffStats {
public:
    explicit SuffStats(const Eigen::MatrixXd& Y);
    SuffStats(Eigen::MatrixXd gram, int n_obs);

    int n() const { return n_; }
    int p() const { return static_cast<int>(labels_.size()); }
    int k() const { return k_; }
    int label(int i) const { return labels_[i]; }
    int size(int u) const { return sizes_[u]; }
    int assigned_count() const { return assigned_; }
    const Eigen::MatrixXd& gram() const { return G_; }

    void clear();                          // everything unassigned
    void assign_all(const Partition& part);
    Partition partition() const;           // requires all assigned

    // i must be assigned; emptied blocks are swap-deleted (the last block
    // takes the vacated index)
    void remove(int i);
    // i must be unassigned; u == k() opens a new block
    void add(int i, int u);
    // fold block b into block a; b's slot is swap-deleted like remove()
    void merge_blocks(int a, int b);

    StatsView current_view() const;
    // statistics as if i (unassigned) joined block u; u == k() for a new block
    StatsView view_add(int i, int u) const;
    // statistics as if blocks a and b merged (result keeps index min(a,b))
    StatsView view_merge(int a, int b) const;

    // recompute from scratch, adopt the fresh values, return the largest
    // discrepancy the incremental state had accumulated
    double refresh();

private:
    void init_capacity();
    void drop_empty_block(int u);

    Eigen::MatrixXd G_;
    int n_ = 0;
    int k_ = 0;
    int assigned_ = 0;
    Eigen::MatrixXd R_; // capacity p rows; row u = block-u sums of G columns
    Eigen::MatrixXd T_; // capacity p×p; active top-left k×k
    Eigen::VectorXd d_;
    std::vector<int> sizes_;
    std::vector<int> labels_;
};

} // namespace bcov
