#include "doctest.h"

#include <algorithm>

#include "bcov/blockmodel.hpp"
#include "bcov/stats.hpp"
#include "helpers.hpp"

using namespace bcov;

namespace {

// direct-loop statistics from a label vector (-1 = unassigned)
struct OracleStats {
    Eigen::MatrixXd T;
    Eigen::VectorXd diag_sum;
    std::vector<int> sizes;
    int p_assigned = 0;
};

OracleStats oracle_stats(const Eigen::MatrixXd& G, const std::vector<int>& labels,
                         int k) {
    const int p = static_cast<int>(labels.size());
    OracleStats o;
    o.T = Eigen::MatrixXd::Zero(k, k);
    o.diag_sum = Eigen::VectorXd::Zero(k);
    o.sizes.assign(k, 0);
    for (int i = 0; i < p; ++i) {
        if (labels[i] < 0) continue;
        ++o.p_assigned;
        ++o.sizes[labels[i]];
        o.diag_sum[labels[i]] += G(i, i);
        for (int j = 0; j < p; ++j)
            if (labels[j] >= 0) o.T(labels[i], labels[j]) += G(i, j);
    }
    return o;
}

void check_view(const StatsView& view, const OracleStats& o, double tol) {
    REQUIRE(view.k() == static_cast<int>(o.sizes.size()));
    CHECK(view.sizes == o.sizes);
    CHECK(view.p_assigned == o.p_assigned);
    if (view.k() == 0) return;
    CHECK(testutil::max_abs_diff(view.T, o.T) < tol);
    CHECK(testutil::max_abs_diff(view.diag_sum, o.diag_sum) < tol);
}

void check_views_equal(const StatsView& a, const StatsView& b, double tol) {
    REQUIRE(a.k() == b.k());
    CHECK(a.sizes == b.sizes);
    CHECK(a.p_assigned == b.p_assigned);
    CHECK(testutil::max_abs_diff(a.T, b.T) < tol);
    CHECK(testutil::max_abs_diff(a.diag_sum, b.diag_sum) < tol);
}

} // namespace

TEST_SUITE("stats") {

TEST_CASE("gram and full-assignment statistics match direct loops") {
    RandomStream rng(3);
    for (int rep = 0; rep < 15; ++rep) {
        int p = 3 + rng.uniform_int(10);
        int n = 2 + rng.uniform_int(12);
        Eigen::MatrixXd Y = testutil::random_data(n, p, rng);
        SuffStats stats(Y);
        CHECK(testutil::max_abs_diff(stats.gram(), Y.transpose() * Y) < 1e-12);

        Partition part = testutil::random_partition(p, 4, rng);
        stats.assign_all(part);
        CHECK(stats.partition() == part);
        StatsView view = stats.current_view();
        check_view(view, oracle_stats(stats.gram(), part.labels(), part.k()),
                   1e-9);
        CHECK(view.n == n);

        // derived statistics
        Eigen::MatrixXd M0 = view.M0();
        Eigen::VectorXd q = view.q();
        for (int u = 0; u < part.k(); ++u) {
            int pu = part.sizes()[u];
            for (int v = 0; v < part.k(); ++v)
                CHECK(M0(u, v) ==
                      doctest::Approx(view.T(u, v) /
                                      std::sqrt(double(pu) * part.sizes()[v]))
                          .epsilon(1e-12));
            CHECK(q[u] >= 0.0);
            double direct = view.diag_sum[u] - view.T(u, u) / pu;
            CHECK(q[u] == doctest::Approx(std::max(direct, 0.0)).epsilon(1e-9));
        }
    }
}

TEST_CASE("contrast energy equals the rotated-coordinate norm") {
    RandomStream rng(5);
    for (int rep = 0; rep < 10; ++rep) {
        int p = 4 + rng.uniform_int(8);
        int n = 3 + rng.uniform_int(10);
        std::vector<int> labels = testutil::random_partition(p, 3, rng).labels();
        std::sort(labels.begin(), labels.end()); // contiguous blocks
        Partition part = Partition::from_labels(labels);

        Eigen::MatrixXd Y = testutil::random_data(n, p, rng);
        SuffStats stats(Y);
        stats.assign_all(part);
        Eigen::VectorXd q = stats.current_view().q();

        RotationQ rot = build_Q(part.sizes());
        int col = part.k();
        for (int u = 0; u < part.k(); ++u) {
            double energy = 0.0;
            for (int c = 1; c < part.sizes()[u]; ++c, ++col)
                energy += (Y * rot.Q.col(col)).squaredNorm();
            CHECK(q[u] == doctest::Approx(energy).epsilon(1e-9));
        }
    }
}

TEST_CASE("incremental moves track a shadow model over long runs") {
    RandomStream rng(7);
    const int p = 12, n = 8;
    Eigen::MatrixXd Y = testutil::random_data(n, p, rng);
    SuffStats stats(Y);
    Partition init = testutil::random_partition(p, 3, rng);
    stats.assign_all(init);
    std::vector<int> shadow = init.labels();
    int k = init.k();

    auto shadow_remove = [&](int i) {
        int u = shadow[i];
        shadow[i] = -1;
        bool empty = std::none_of(shadow.begin(), shadow.end(),
                                  [&](int l) { return l == u; });
        if (empty) {
            for (int& l : shadow)
                if (l == k - 1) l = u;
            --k;
        }
    };

    for (int step = 0; step < 600; ++step) {
        double coin = rng.uniform();
        if (coin < 0.45) {
            // move one assigned variable
            int i = rng.uniform_int(p);
            if (shadow[i] < 0) continue;
            stats.remove(i);
            shadow_remove(i);
            int target = rng.uniform_int(k + 1);
            stats.add(i, target);
            shadow[i] = target;
            if (target == k) ++k;
        } else if (coin < 0.75) {
            int i = rng.uniform_int(p);
            if (shadow[i] < 0) {
                int target = rng.uniform_int(k + 1);
                stats.add(i, target);
                shadow[i] = target;
                if (target == k) ++k;
            } else {
                stats.remove(i);
                shadow_remove(i);
            }
        } else if (k >= 2) {
            int a = rng.uniform_int(k), b = rng.uniform_int(k);
            if (a == b) continue;
            stats.merge_blocks(a, b);
            for (int& l : shadow)
                if (l == b) l = a;
            if (b != k - 1)
                for (int& l : shadow)
                    if (l == k - 1) l = b;
            --k;
        }
        REQUIRE(stats.k() == k);
        for (int i = 0; i < p; ++i) REQUIRE(stats.label(i) == shadow[i]);
        if (step % 25 == 0)
            check_view(stats.current_view(),
                       oracle_stats(stats.gram(), shadow, k), 1e-8);
    }
    check_view(stats.current_view(), oracle_stats(stats.gram(), shadow, k),
               1e-8);
    CHECK(stats.refresh() < 1e-8);
    check_view(stats.current_view(), oracle_stats(stats.gram(), shadow, k),
               1e-10);
}

TEST_CASE("candidate views equal committed moves and do not mutate") {
    RandomStream rng(11);
    const int p = 10, n = 6;
    Eigen::MatrixXd Y = testutil::random_data(n, p, rng);
    for (int rep = 0; rep < 10; ++rep) {
        SuffStats stats(Y);
        Partition part = testutil::random_partition(p, 3, rng);
        stats.assign_all(part);
        int i = rng.uniform_int(p);
        stats.remove(i);
        Eigen::MatrixXd t_before = stats.current_view().T;

        for (int u = 0; u <= stats.k(); ++u) {
            StatsView probe = stats.view_add(i, u);
            SuffStats committed = stats;
            committed.add(i, u);
            check_views_equal(probe, committed.current_view(), 1e-10);
        }
        // probing did not change the underlying state
        CHECK(testutil::max_abs_diff(stats.current_view().T, t_before) == 0.0);

        if (stats.k() >= 2) {
            int a = 0, b = stats.k() - 1;
            StatsView probe = stats.view_merge(a, b);
            SuffStats committed = stats;
            committed.merge_blocks(a, b);
            check_views_equal(probe, committed.current_view(), 1e-10);
        }
    }
}

TEST_CASE("subset assignment counts and clear") {
    RandomStream rng(13);
    Eigen::MatrixXd Y = testutil::random_data(5, 8, rng);
    SuffStats stats(Y);
    CHECK(stats.assigned_count() == 0);
    CHECK(stats.k() == 0);
    stats.add(2, 0);
    stats.add(5, 0);
    stats.add(7, 1);
    CHECK(stats.assigned_count() == 3);
    CHECK(stats.k() == 2);
    StatsView view = stats.current_view();
    CHECK(view.p_assigned == 3);
    CHECK(view.sizes == std::vector<int>{2, 1});

    std::vector<int> labels(8, -1);
    labels[2] = labels[5] = 0;
    labels[7] = 1;
    check_view(view, oracle_stats(stats.gram(), labels, 2), 1e-10);

    stats.clear();
    CHECK(stats.assigned_count() == 0);
    CHECK(stats.k() == 0);
}

TEST_CASE("duplicated variables give exactly zero contrast energy") {
    // integer-valued data keeps every Gram entry exact
    Eigen::MatrixXd Y(6, 2);
    Y << 1, 2, 2, 0, 3, 1, 0, 1, 1, 0, 2, 1;
    Eigen::MatrixXd Ydup(6, 4);
    Ydup << Y.col(0), Y.col(0), Y.col(1), Y.col(1);
    SuffStats stats(Ydup);
    stats.assign_all(Partition::from_labels({0, 0, 1, 1}));
    Eigen::VectorXd q = stats.current_view().q();
    CHECK(q[0] == 0.0);
    CHECK(q[1] == 0.0);
}

} // TEST_SUITE
