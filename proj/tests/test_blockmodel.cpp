#include "doctest.h"

#include <algorithm>

#include "bcov/blockmodel.hpp"
#include "helpers.hpp"

using namespace bcov;

namespace {

// O(p^2) reference assembly straight from the three-case definition
Eigen::MatrixXd expand_oracle(const BlockParams& bp, const Partition& part) {
    const int p = part.p();
    Eigen::MatrixXd out(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            int u = part.label(i), v = part.label(j);
            if (i == j)
                out(i, j) = bp.var[u];
            else if (u == v)
                out(i, j) = bp.within[u];
            else
                out(i, j) = bp.get_between(std::min(u, v), std::max(u, v));
        }
    return out;
}

std::vector<double> sorted_eigs(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    std::vector<double> e(es.eigenvalues().data(),
                          es.eigenvalues().data() + m.rows());
    std::sort(e.begin(), e.end());
    return e;
}

} // namespace

TEST_SUITE("blockmodel") {

TEST_CASE("rotation is orthonormal with the indicator columns first") {
    RandomStream rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<int> sizes = testutil::random_sizes(2 + rng.uniform_int(10),
                                                        4, rng);
        RotationQ rot = build_Q(sizes);
        const int p = static_cast<int>(rot.Q.rows());
        const int k = static_cast<int>(sizes.size());
        REQUIRE(rot.Q.cols() == p);
        CHECK(testutil::max_abs_diff(rot.Q.transpose() * rot.Q,
                                     Eigen::MatrixXd::Identity(p, p)) < 1e-12);

        // column u of the leading block is the normalized indicator of B_u
        int offset = 0;
        for (int u = 0; u < k; ++u) {
            for (int i = 0; i < sizes[u]; ++i)
                CHECK(rot.Q(offset + i, u) ==
                      doctest::Approx(1.0 / std::sqrt(sizes[u])));
            offset += sizes[u];
        }
        // all later columns are contrasts: they sum to zero
        for (int c = k; c < p; ++c)
            CHECK(std::abs(rot.Q.col(c).sum()) < 1e-12);
    }
}

TEST_CASE("expand matches the entrywise definition") {
    RandomStream rng(5);
    for (int rep = 0; rep < 20; ++rep) {
        Partition part = testutil::random_partition(3 + rng.uniform_int(9), 4, rng);
        BlockParams bp = testutil::random_block_params(part.sizes(), rng);
        CHECK(testutil::max_abs_diff(expand(bp, part),
                                     expand_oracle(bp, part)) == 0.0);
    }
}

TEST_CASE("canonical coordinates roundtrip") {
    RandomStream rng(7);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<int> sizes = testutil::random_sizes(2 + rng.uniform_int(8),
                                                        3, rng);
        BlockParams bp = testutil::random_block_params(sizes, rng);
        CanonicalParams cp = to_canonical(bp);
        BlockParams back = from_canonical(cp, sizes);
        CHECK(testutil::max_abs_diff(back.var, bp.var) < 1e-12);
        CHECK(testutil::max_abs_diff(back.within, bp.within) < 1e-12);
        if (bp.between.size() > 0)
            CHECK(testutil::max_abs_diff(back.between, bp.between) < 1e-12);
        CanonicalParams cp2 = to_canonical(back);
        CHECK(testutil::max_abs_diff(cp2.A, cp.A) < 1e-12);
        CHECK(testutil::max_abs_diff(cp2.lambda, cp.lambda) < 1e-12);
    }
}

TEST_CASE("semi-spectral factorization reproduces the covariance") {
    RandomStream rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        Partition part = testutil::random_partition(2 + rng.uniform_int(10), 4, rng);
        // contiguous layout: sort labels so Q's block order matches expand
        std::vector<int> labels = part.labels();
        std::sort(labels.begin(), labels.end());
        part = Partition::from_labels(labels);

        BlockParams bp = testutil::random_block_params(part.sizes(), rng);
        CanonicalParams cp = to_canonical(bp);
        RotationQ rot = build_Q(part.sizes());
        Eigen::MatrixXd gamma =
            rot.Q * assemble_D(cp, part.sizes()) * rot.Q.transpose();
        CHECK(testutil::max_abs_diff(gamma, expand(bp, part)) < 1e-10);
    }
}

TEST_CASE("spectrum is eig(A) plus repeated contrast variances") {
    RandomStream rng(13);
    for (int rep = 0; rep < 20; ++rep) {
        Partition part = testutil::random_partition(2 + rng.uniform_int(10), 4, rng);
        BlockParams bp = testutil::random_block_params(part.sizes(), rng);
        CanonicalParams cp = to_canonical(bp);

        std::vector<double> want = sorted_eigs(cp.A);
        for (int u = 0; u < cp.k(); ++u)
            for (int r = 1; r < part.sizes()[u]; ++r)
                want.push_back(cp.lambda[u]);
        std::sort(want.begin(), want.end());

        std::vector<double> got = sorted_eigs(expand(bp, part));
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i)
            CHECK(std::abs(got[i] - want[i]) < 1e-9);
    }
}

TEST_CASE("psd test matches the eigenvalue criterion") {
    CanonicalParams cp;
    cp.A = Eigen::MatrixXd::Identity(2, 2);
    cp.A(0, 1) = cp.A(1, 0) = 0.5;
    cp.lambda = Eigen::VectorXd::Constant(2, 0.3);
    CHECK(is_psd(cp));

    cp.lambda[1] = -0.2;
    CHECK_FALSE(is_psd(cp));

    cp.lambda[1] = 0.3;
    cp.A(0, 1) = cp.A(1, 0) = 1.4; // indefinite A
    CHECK_FALSE(is_psd(cp));

    // PSD of the expanded matrix agrees
    Partition part = Partition::from_labels({0, 0, 1, 1, 1});
    BlockParams bp = from_canonical(cp, part.sizes());
    CHECK(sorted_eigs(expand(bp, part)).front() < 0.0);
}

TEST_CASE("single-block and singleton conventions") {
    // one block of size 3
    Partition one = Partition::from_labels({0, 0, 0});
    BlockParams bp;
    bp.sizes = {3};
    bp.var = Eigen::VectorXd::Constant(1, 2.0);
    bp.within = Eigen::VectorXd::Constant(1, 0.5);
    bp.between = Eigen::VectorXd(0);
    CanonicalParams cp = to_canonical(bp);
    CHECK(cp.A(0, 0) == doctest::Approx(2.0 + 2 * 0.5));
    CHECK(cp.lambda[0] == doctest::Approx(1.5));

    // singletons carry lambda = 0 and within = 0 placeholders
    Partition singles = Partition::from_labels({0, 1});
    BlockParams sp;
    sp.sizes = {1, 1};
    sp.var = Eigen::VectorXd::Constant(2, 3.0);
    sp.within = Eigen::VectorXd::Zero(2);
    sp.between = Eigen::VectorXd::Constant(1, 0.7);
    CanonicalParams scp = to_canonical(sp);
    CHECK(scp.lambda[0] == 0.0);
    CHECK(scp.lambda[1] == 0.0);
    CHECK(scp.A(0, 0) == doctest::Approx(3.0));
    CHECK(scp.A(0, 1) == doctest::Approx(0.7));
    BlockParams back = from_canonical(scp, sp.sizes);
    CHECK(back.within[0] == 0.0);
    CHECK(back.within[1] == 0.0);
}

TEST_CASE("block averaging: estimator identity and idempotence") {
    RandomStream rng(17);
    for (int rep = 0; rep < 10; ++rep) {
        int p = 4 + rng.uniform_int(10);
        int n = 5 + rng.uniform_int(20);
        Partition part = testutil::random_partition(p, 3, rng);
        Eigen::MatrixXd Y = testutil::random_data(n, p, rng);
        Eigen::MatrixXd S = Y.transpose() * Y / n;

        auto [cp, sigma_hat] = mle_given_partition(Y, part);
        Eigen::MatrixXd avg = block_average(S, part);
        CHECK(testutil::max_abs_diff(sigma_hat, avg) < 1e-10);
        CHECK(testutil::max_abs_diff(block_average(avg, part), avg) < 1e-12);

        // canonical MLE against the direct sufficient-statistic formulas
        Eigen::MatrixXd G = Y.transpose() * Y;
        const int k = part.k();
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
        Eigen::VectorXd dsum = Eigen::VectorXd::Zero(k);
        for (int i = 0; i < p; ++i) {
            dsum[part.label(i)] += G(i, i);
            for (int j = 0; j < p; ++j)
                T(part.label(i), part.label(j)) += G(i, j);
        }
        for (int u = 0; u < k; ++u) {
            int pu = part.sizes()[u];
            for (int v = 0; v < k; ++v) {
                int pv = part.sizes()[v];
                double a_hat = T(u, v) / std::sqrt(double(pu) * pv) / n;
                CHECK(cp.A(u, v) == doctest::Approx(a_hat).epsilon(1e-10));
            }
            if (pu > 1) {
                double lam = (dsum[u] - T(u, u) / pu) / (n * (pu - 1));
                CHECK(cp.lambda[u] == doctest::Approx(lam).epsilon(1e-10));
            } else {
                CHECK(cp.lambda[u] == 0.0);
            }
        }
    }
}

} // TEST_SUITE
