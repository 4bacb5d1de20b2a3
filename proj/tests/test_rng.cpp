#include "doctest.h"

#include "bcov/errors.hpp"
#include "battery.hpp"

using namespace bcov;

TEST_SUITE("rng") {

TEST_CASE("distribution battery at alpha 0.001") {
    for (const auto& c : testutil::distribution_battery(2024)) {
        INFO(c.name, ": ", c.value, " vs bound ", c.bound);
        CHECK(c.value <= c.bound);
    }
}

TEST_CASE("child streams are pure and reproducible") {
    RandomStream parent(99);
    RandomStream a = parent.child(7);
    RandomStream b = parent.child(7);
    RandomStream c = parent.child(8);
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.next_u64() != c.next_u64());

    // deriving children must not advance the parent
    RandomStream p1(99), p2(99);
    (void)p1.child(3);
    (void)p1.child(4);
    CHECK(p1.next_u64() == p2.next_u64());
}

TEST_CASE("uniform_int covers exactly its range") {
    RandomStream rng(5);
    std::vector<int> seen(3, 0);
    for (int i = 0; i < 3000; ++i) {
        int v = rng.uniform_int(3);
        REQUIRE(v >= 0);
        REQUIRE(v < 3);
        ++seen[v];
    }
    for (int s : seen) CHECK(s > 0);
    CHECK(rng.uniform_int(1) == 0);
}

TEST_CASE("categorical_log picks a dominating weight") {
    RandomStream rng(5);
    Eigen::VectorXd logw(3);
    logw << -1000.0, 50.0, -1000.0;
    for (int i = 0; i < 100; ++i) CHECK(rng.categorical_log(logw) == 1);
}

TEST_CASE("dirichlet draws lie on the simplex") {
    RandomStream rng(17);
    for (int i = 0; i < 200; ++i) {
        Eigen::VectorXd w = rng.dirichlet(4, 0.5);
        CHECK(w.minCoeff() > 0.0);
        CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("gamma rejects nonpositive parameters") {
    RandomStream rng(1);
    CHECK_THROWS_AS((void)rng.gamma(0.0, 1.0), numeric_error);
    CHECK_THROWS_AS((void)rng.gamma(1.0, -2.0), numeric_error);
}

TEST_CASE("wishart guards df and scale") {
    RandomStream rng(1);
    Eigen::MatrixXd I3 = Eigen::MatrixXd::Identity(3, 3);
    CHECK_THROWS_AS((void)rng.wishart(1.5, I3), numeric_error);
    Eigen::MatrixXd indef = I3;
    indef(2, 2) = -1.0;
    CHECK_THROWS_AS((void)rng.wishart(10.0, indef), numeric_error);
    CHECK_NOTHROW((void)rng.wishart(2.5, I3));
}

TEST_CASE("mvn sampler accepts the zero matrix") {
    RandomStream rng(3);
    MvnSampler s(Eigen::MatrixXd::Zero(4, 4));
    for (int i = 0; i < 10; ++i) CHECK(s.draw(rng).norm() == 0.0);
}

TEST_CASE("mvn sampler rejects indefinite input") {
    Eigen::MatrixXd m(2, 2);
    m << 1.0, 0.0, 0.0, -0.5;
    CHECK_THROWS_AS(MvnSampler{m}, numeric_error);
}

TEST_CASE("fixed seed reproduces full sequences") {
    RandomStream a(123), b(123);
    for (int i = 0; i < 50; ++i) {
        CHECK(a.uniform() == b.uniform());
        CHECK(a.normal() == b.normal());
        CHECK(a.gamma(2.0, 3.0) == b.gamma(2.0, 3.0));
    }
}

} // TEST_SUITE
