#include "bcov/rng.hpp"
#include "bcov/errors.hpp"

#include <cmath>
#include <limits>

namespace bcov {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kChildSalt = 0x632BE59BD9B4E019ULL;

// murmur-style finalizer used by splitmix64
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

RandomStream RandomStream::child(std::uint64_t label) const {
    return RandomStream(mix64(state_ ^ mix64(label ^ kChildSalt)));
}

std::uint64_t RandomStream::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double RandomStream::uniform() {
    // 53-bit mantissa, offset half a step: never exactly 0 or 1
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

int RandomStream::uniform_int(int n) {
    // rejection-free multiply-shift is overkill here; modulo bias at n << 2^64
    // is far below anything the test battery can resolve, but stay exact anyway
    std::uint64_t bound = static_cast<std::uint64_t>(n);
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t u;
    do {
        u = next_u64();
    } while (u >= limit);
    return static_cast<int>(u % bound);
}

double RandomStream::normal() {
    // Box-Muller without caching the second variate: draw order stays
    // independent of call interleaving across distributions
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

double RandomStream::gamma(double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw numeric_error("gamma sampler requires positive shape and rate");
    if (shape < 1.0) {
        // boost: Gamma(a) = Gamma(a+1) * U^(1/a)
        double u = uniform();
        return gamma(shape + 1.0, rate) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
    }
}

double RandomStream::inverse_gamma(double shape, double rate) {
    return 1.0 / gamma(shape, rate);
}

double RandomStream::cauchy(double loc, double scale) {
    return loc + scale * std::tan(3.141592653589793238 * (uniform() - 0.5));
}

int RandomStream::categorical_log(const Eigen::VectorXd& logw) {
    const int n = static_cast<int>(logw.size());
    if (n <= 0) throw numeric_error("categorical_log on empty weight vector");
    double m = logw.maxCoeff();
    if (!std::isfinite(m)) throw numeric_error("categorical_log: no finite weight");
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += std::exp(logw[i] - m);
    double target = uniform() * total;
    double cum = 0.0;
    for (int i = 0; i < n; ++i) {
        cum += std::exp(logw[i] - m);
        if (target <= cum) return i;
    }
    return n - 1; // roundoff fallthrough
}

Eigen::VectorXd RandomStream::normal_vec(int n) {
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z[i] = normal();
    return z;
}

Eigen::VectorXd RandomStream::dirichlet(int k, double alpha) {
    Eigen::VectorXd g(k);
    for (int i = 0; i < k; ++i) g[i] = gamma(alpha, 1.0);
    return g / g.sum();
}

Eigen::MatrixXd RandomStream::wishart(double df, const Eigen::MatrixXd& scale) {
    const int k = static_cast<int>(scale.rows());
    if (df <= k - 1) throw numeric_error("wishart requires df > k - 1");
    Eigen::LLT<Eigen::MatrixXd> llt(scale);
    if (llt.info() != Eigen::Success)
        throw numeric_error("wishart scale matrix is not positive definite");
    // Bartlett: W = L A A^T L^T with A lower triangular
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < i; ++j) a(i, j) = normal();
        a(i, i) = std::sqrt(chi2(df - i));
    }
    Eigen::MatrixXd la = llt.matrixL() * a;
    return la * la.transpose();
}

Eigen::MatrixXd RandomStream::inverse_wishart(double df, const Eigen::MatrixXd& scale) {
    const int k = static_cast<int>(scale.rows());
    Eigen::LLT<Eigen::MatrixXd> llt(scale);
    if (llt.info() != Eigen::Success)
        throw numeric_error("inverse_wishart scale matrix is not positive definite");
    Eigen::MatrixXd scale_inv =
        llt.solve(Eigen::MatrixXd::Identity(k, k));
    scale_inv = 0.5 * (scale_inv + scale_inv.transpose()).eval();
    Eigen::MatrixXd w = wishart(df, scale_inv);
    Eigen::MatrixXd x = w.llt().solve(Eigen::MatrixXd::Identity(k, k));
    return 0.5 * (x + x.transpose());
}

Eigen::VectorXd RandomStream::mvn(const Eigen::MatrixXd& sigma) {
    return MvnSampler(sigma).draw(*this);
}

MvnSampler::MvnSampler(const Eigen::MatrixXd& sigma) {
    const int n = static_cast<int>(sigma.rows());
    double scale = sigma.cwiseAbs().maxCoeff();
    if (scale == 0.0) {
        root_ = Eigen::MatrixXd::Zero(n, n);
        return;
    }
    auto factor = [n](const Eigen::MatrixXd& s, double floor,
                      Eigen::MatrixXd& out) -> bool {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
        if (ldlt.info() != Eigen::Success) return false;
        Eigen::VectorXd d = ldlt.vectorD();
        if (d.minCoeff() < floor) return false;
        Eigen::VectorXd sq = d.cwiseMax(0.0).cwiseSqrt();
        Eigen::MatrixXd l = ldlt.matrixL();
        out = ldlt.transpositionsP().transpose() * Eigen::MatrixXd(l * sq.asDiagonal());
        return true;
    };
    // tiny negative pivots are rank-deficiency roundoff; larger ones mean the
    // caller handed us an indefinite matrix, which one jitter pass may still
    // rescue if it is borderline
    if (factor(sigma, -1e-10 * scale, root_)) return;
    Eigen::MatrixXd jittered =
        sigma + 1e-10 * scale * Eigen::MatrixXd::Identity(n, n);
    if (factor(jittered, -1e-10 * scale, root_)) return;
    throw numeric_error("mvn covariance is indefinite beyond jitter tolerance");
}

Eigen::VectorXd MvnSampler::draw(RandomStream& rng) const {
    return root_ * rng.normal_vec(dim());
}

} // namespace bcov
