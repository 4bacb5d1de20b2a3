#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "bcov/baselines.hpp"
#include "bcov/dgp.hpp"
#include "bcov/errors.hpp"
#include "helpers.hpp"

using namespace bcov;

namespace {

Eigen::VectorXd sorted_eigs(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    return es.eigenvalues();
}

// homogeneous targets implied by the delta means: variance d1+d2+d3,
// within-block covariance d2+d3, cross-block covariance d2
double max_target_deviation(const Partition& part, const Eigen::MatrixXd& sigma,
                            double d1, double d2, double d3) {
    double worst = 0.0;
    const int p = part.p();
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            double target = i == j ? d1 + d2 + d3
                            : part.label(i) == part.label(j) ? d2 + d3
                                                             : d2;
            worst = std::max(worst, std::abs(sigma(i, j) - target));
        }
    return worst;
}

} // namespace

TEST_SUITE("dgp") {

TEST_CASE("scenario names round-trip and bad names are rejected") {
    CHECK(all_scenario_kinds().size() == 13);
    for (ScenarioKind kind : all_scenario_kinds())
        CHECK(scenario_from_name(scenario_name(kind)) == kind);
    CHECK_THROWS_AS((void)scenario_from_name("arma"), config_error);
}

TEST_CASE("distance-decay covariances match their formulas") {
    Eigen::MatrixXd ma1 = ordered_cov(ScenarioKind::MA1, 6, 0.5, 0.7, 0.3);
    CHECK(ma1(2, 2) == 1.0);
    CHECK(ma1(2, 3) == doctest::Approx(0.5));
    CHECK(ma1(2, 4) == 0.0);
    CHECK(ma1(0, 5) == 0.0);

    Eigen::MatrixXd ar1 = ordered_cov(ScenarioKind::AR1, 6, 0.5, 0.7, 0.3);
    CHECK(ar1(1, 1) == 1.0);
    CHECK(ar1(0, 2) == doctest::Approx(0.25));
    CHECK(ar1(0, 5) == doctest::Approx(std::pow(0.5, 5)));

    // H = 1/2 makes the increments uncorrelated
    Eigen::MatrixXd flat = ordered_cov(ScenarioKind::LongRange, 5, 0.5, 0.5, 0.3);
    CHECK(testutil::max_abs_diff(flat, Eigen::MatrixXd::Identity(5, 5)) < 1e-12);
    Eigen::MatrixXd lr = ordered_cov(ScenarioKind::LongRange, 5, 0.5, 0.7, 0.3);
    CHECK(lr(0, 0) == doctest::Approx(1.0));
    CHECK(lr(0, 1) == doctest::Approx(0.5 * (std::pow(2.0, 1.4) - 2.0)));

    Eigen::MatrixXd toep = ordered_cov(ScenarioKind::Toeplitz, 6, 0.5, 0.7, 0.3);
    CHECK(toep(3, 3) == 1.0);
    CHECK(toep(1, 3) == doctest::Approx(0.5 * std::pow(2.0, -1.3)));

    for (ScenarioKind kind : {ScenarioKind::MA1, ScenarioKind::AR1,
                              ScenarioKind::LongRange, ScenarioKind::Toeplitz}) {
        Eigen::MatrixXd sigma = ordered_cov(kind, 30, 0.5, 0.7, 0.3);
        CHECK((sigma - sigma.transpose()).norm() == 0.0);
        CHECK(is_pd_matrix(sigma));
    }
    CHECK_THROWS_AS(
        (void)ordered_cov(ScenarioKind::RandomIW, 5, 0.5, 0.7, 0.3),
        config_error);
}

TEST_CASE("grouped draws are reproducible, bounded and positive definite") {
    RandomStream a(3), b(3);
    auto [part_a, sigma_a] = grouped_random(12, 5, 1.0, 0.5, 0.0, 0.5, a);
    auto [part_b, sigma_b] = grouped_random(12, 5, 1.0, 0.5, 0.0, 0.5, b);
    CHECK(part_a == part_b);
    CHECK(testutil::max_abs_diff(sigma_a, sigma_b) == 0.0);

    CHECK(part_a.p() == 12);
    CHECK(part_a.k() <= 5);
    CHECK((sigma_a - sigma_a.transpose()).norm() < 1e-14);
    CHECK(is_pd_matrix(sigma_a));
    CHECK_THROWS_AS((void)grouped_random(5, 0, 1.0, 0.5, 0.0, 0.5, a),
                    config_error);
}

TEST_CASE("large tau concentrates draws on the homogeneous target") {
    const int reps = 200;
    double dev_diffuse = 0.0, dev_tight = 0.0;
    RandomStream rng(7);
    for (int r = 0; r < reps; ++r) {
        auto [p1, s1] = grouped_random(10, 5, 1.0, 0.5, 0.2, 0.3, rng);
        dev_diffuse += max_target_deviation(p1, s1, 0.5, 0.2, 0.3);
        auto [p2, s2] = grouped_random(10, 5, 100.0, 0.5, 0.2, 0.3, rng);
        dev_tight += max_target_deviation(p2, s2, 0.5, 0.2, 0.3);
    }
    CHECK(dev_tight / reps < dev_diffuse / reps);

    // the diagonal configuration: every off-diagonal target is zero
    double offdiag = 0.0;
    for (int r = 0; r < 50; ++r) {
        auto [part, sigma] = grouped_random(10, 5, 100.0, 0.5, 0.0, 0.0, rng);
        Eigen::MatrixXd off = sigma;
        off.diagonal().setZero();
        offdiag += off.cwiseAbs().maxCoeff();
    }
    CHECK(offdiag / 50 < 0.25);
}

TEST_CASE("three-factor covariance has the exact population entries") {
    const int p = 10; // groups of 4, 4, 2
    Eigen::MatrixXd sigma = factor_based(p);
    Partition part = factor_based_partition(p);
    CHECK(part.labels() == std::vector<int>{0, 0, 0, 0, 1, 1, 1, 1, 2, 2});

    CHECK(sigma(0, 1) == doctest::Approx(290.0));
    CHECK(sigma(0, 0) == doctest::Approx(291.0));
    CHECK(sigma(4, 5) == doctest::Approx(300.0));
    CHECK(sigma(4, 4) == doctest::Approx(301.0));
    CHECK(sigma(0, 4) == 0.0);                       // factors 1 and 2 independent
    CHECK(sigma(0, 8) == doctest::Approx(-0.3 * 290.0));
    CHECK(sigma(4, 8) == doctest::Approx(0.925 * 300.0));
    const double var3 = 0.09 * 290.0 + 0.855625 * 300.0 + 1.0;
    CHECK(sigma(8, 9) == doctest::Approx(var3));
    CHECK(sigma(8, 8) == doctest::Approx(var3 + 1.0));

    CHECK((sigma - sigma.transpose()).norm() == 0.0);
    CHECK(is_pd_matrix(sigma));
    CHECK_THROWS_AS((void)factor_based(4), config_error);

    // group sizes follow the 40/40/20 split at other dimensions too
    Partition p50 = factor_based_partition(50);
    CHECK(p50.sizes() == std::vector<int>{20, 20, 10});
}

TEST_CASE("block-sparse truths have the stated structure") {
    const int p = 24;
    Eigen::MatrixXd banded = block_sparse_banded(p);
    for (int i = 0; i < p / 2; ++i) {
        CHECK(banded(i, i) == 4.0);
        for (int j = 0; j < p; ++j)
            if (j != i) CHECK(banded(i, j) == 0.0);
    }
    CHECK(banded(12, 12) == doctest::Approx(1.0));
    CHECK(banded(12, 17) == doctest::Approx(0.5));
    CHECK(banded(12, 21) == doctest::Approx(0.1));
    CHECK(banded(12, 22) == 0.0);
    CHECK(banded(12, 23) == 0.0);
    CHECK_THROWS_AS((void)block_sparse_banded(7), config_error);

    RandomStream rng(11);
    Eigen::MatrixXd entry = block_sparse_entrywise(p, rng);
    CHECK((entry - entry.transpose()).norm() == 0.0);
    for (int i = 0; i < p / 2; ++i)
        for (int j = p / 2; j < p; ++j) CHECK(entry(i, j) == 0.0);
    for (int i = 0; i < p / 2; ++i) CHECK(entry(i, i) == 4.0);
    CHECK(sorted_eigs(entry)[0] >= 0.01 - 1e-9);
    // off-diagonal magnitudes in the random block stay in the sparse range
    int nonzero = 0;
    for (int i = p / 2; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
            if (entry(i, j) != 0.0) {
                ++nonzero;
                CHECK(entry(i, j) >= 0.3);
                CHECK(entry(i, j) <= 0.8);
            }
    CHECK(nonzero > 0);
    CHECK(nonzero < 45);
    CHECK_THROWS_AS((void)block_sparse_entrywise(9, rng), config_error);
}

TEST_CASE("spectrum-specified truths deliver the requested eigenvalues") {
    RandomStream rng(13);
    Eigen::MatrixXd disc = eigen_based(10, true, rng);
    Eigen::VectorXd eigs = sorted_eigs(disc);
    Eigen::VectorXd want(10);
    want << 1, 1, 3, 3, 3, 3, 10, 10, 10, 10;
    CHECK((eigs - want).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((disc - disc.transpose()).norm() < 1e-12);

    Eigen::MatrixXd unif = eigen_based(10, false, rng);
    Eigen::VectorXd ue = sorted_eigs(unif);
    CHECK(ue[0] >= 1.0 - 1e-9);
    CHECK(ue[9] <= 10.0 + 1e-9);
    CHECK(std::abs(unif.trace() - ue.sum()) < 1e-9);

    RandomStream again(13);
    Eigen::MatrixXd disc2 = eigen_based(10, true, again);
    CHECK(testutil::max_abs_diff(disc, disc2) == 0.0);
    CHECK_THROWS_AS((void)eigen_based(3, true, rng), config_error);
}

TEST_CASE("remaining truths are valid covariance matrices") {
    RandomStream rng(17);
    Eigen::MatrixXd mix = mixture_grouped(12, rng);
    CHECK((mix - mix.transpose()).norm() < 1e-12);
    CHECK(sorted_eigs(mix)[0] > -1e-10);

    Eigen::MatrixXd iw = random_iw(8, rng);
    CHECK((iw - iw.transpose()).norm() < 1e-12);
    CHECK(is_pd_matrix(iw));
    RandomStream rng2(17);
    (void)mixture_grouped(12, rng2);
    CHECK(testutil::max_abs_diff(iw, random_iw(8, rng2)) == 0.0);

    CHECK(testutil::max_abs_diff(degenerate_unit(6),
                                 Eigen::MatrixXd::Identity(6, 6)) == 0.0);
}

TEST_CASE("sampled rows reproduce the covariance in the long run") {
    RandomStream rng(19);
    Eigen::MatrixXd sigma(2, 2);
    sigma << 4.0, 1.0, 1.0, 1.0;
    Eigen::MatrixXd Y = sample_data(sigma, 40000, rng);
    Eigen::MatrixXd S = Y.transpose() * Y / 40000.0;
    CHECK(std::abs(S(0, 0) - 4.0) < 0.15);
    CHECK(std::abs(S(0, 1) - 1.0) < 0.1);
    CHECK(std::abs(S(1, 1) - 1.0) < 0.05);
}

TEST_CASE("full scenario draws carry truth only where it exists") {
    for (ScenarioKind kind : all_scenario_kinds()) {
        ScenarioSpec spec;
        spec.kind = kind;
        spec.p = kind == ScenarioKind::BlockSparseBanded ||
                         kind == ScenarioKind::BlockSparseEntrywise
                     ? 12
                     : 11;
        spec.n = 7;
        RandomStream rng(23);
        ScenarioDraw draw = draw_scenario(spec, rng);
        CHECK(draw.sigma.rows() == spec.p);
        CHECK(draw.data.rows() == 7);
        CHECK(draw.data.cols() == spec.p);
        bool expect_truth = kind == ScenarioKind::GroupedRandom ||
                            kind == ScenarioKind::FactorBased;
        CHECK(draw.has_truth_partition == expect_truth);
        if (expect_truth) CHECK(draw.truth.p() == spec.p);

        RandomStream rng2(23);
        ScenarioDraw draw2 = draw_scenario(spec, rng2);
        CHECK(testutil::max_abs_diff(draw.data, draw2.data) == 0.0);
        CHECK(testutil::max_abs_diff(draw.sigma, draw2.sigma) == 0.0);
    }

    ScenarioSpec ar1;
    ar1.kind = ScenarioKind::AR1;
    ar1.p = 9;
    ar1.rho = 0.4;
    RandomStream rng(29);
    ScenarioDraw draw = draw_scenario(ar1, rng);
    CHECK(testutil::max_abs_diff(
              draw.sigma,
              ordered_cov(ScenarioKind::AR1, 9, 0.4, ar1.H, ar1.alpha)) == 0.0);
}

} // TEST_SUITE
