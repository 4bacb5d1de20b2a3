#include "bcov/partition.hpp"
#include "bcov/errors.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

namespace bcov {

namespace {

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

double choose2(double m) { return 0.5 * m * (m - 1.0); }

} // namespace

double log_rising(double x, int m) {
    return std::lgamma(x + m) - std::lgamma(x);
}

Partition Partition::from_labels(const std::vector<int>& raw) {
    Partition out;
    out.labels_.reserve(raw.size());
    std::unordered_map<int, int> remap;
    for (int v : raw) {
        auto [it, fresh] = remap.try_emplace(v, static_cast<int>(out.sizes_.size()));
        if (fresh) out.sizes_.push_back(0);
        out.labels_.push_back(it->second);
        ++out.sizes_[it->second];
    }
    return out;
}

double log_V(int p, int k, const MfmPrior& prior) {
    if (k < 1 || k > p) throw config_error("log_V requires 1 <= k <= p");
    const double rho = prior.rho;
    const double log_stop = std::log(1e-14);
    double lse = -std::numeric_limits<double>::infinity();
    // component-count pmf f(u) = e^{-1}/(u-1)!; u < k terms vanish
    for (int u = k; u <= 100000; ++u) {
        double lt = -1.0 - std::lgamma(u) // log f(u)
                    + std::lgamma(u + 1.0) - std::lgamma(u - k + 1.0)
                    - log_rising(rho * u, p);
        lse = log_add(lse, lt);
        if (u >= k + 50 && lt < lse + log_stop) return lse;
    }
    throw numeric_error("log_V series did not converge within the term cap");
}

double eppf_log(const Partition& part, const MfmPrior& prior) {
    double out = log_V(part.p(), part.k(), prior);
    for (int m : part.sizes()) out += log_rising(prior.rho, m);
    return out;
}

Partition sample_partition(const MfmPrior& prior, int p, RandomStream& rng) {
    // k* - 1 ~ Poisson(1), by CDF inversion
    int kstar = 1;
    double u = rng.uniform();
    double pmf = std::exp(-1.0), cdf = pmf;
    while (u > cdf) {
        pmf /= static_cast<double>(kstar);
        cdf += pmf;
        ++kstar;
    }
    Eigen::VectorXd w = rng.dirichlet(kstar, prior.rho);
    Eigen::VectorXd logw = w.array().max(1e-300).log();
    std::vector<int> labels(p);
    for (int i = 0; i < p; ++i) labels[i] = rng.categorical_log(logw);
    return Partition::from_labels(labels);
}

double ari(const Partition& a, const Partition& b) {
    if (a.p() != b.p()) throw config_error("ari requires partitions of equal p");
    const int p = a.p();
    Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(a.k(), b.k());
    for (int i = 0; i < p; ++i) counts(a.label(i), b.label(i)) += 1.0;

    double sum_cells = 0.0;
    for (int i = 0; i < a.k(); ++i)
        for (int j = 0; j < b.k(); ++j) sum_cells += choose2(counts(i, j));
    double sum_a = 0.0, sum_b = 0.0;
    for (int m : a.sizes()) sum_a += choose2(m);
    for (int m : b.sizes()) sum_b += choose2(m);

    double total = choose2(static_cast<double>(p));
    double expected = (total > 0.0) ? sum_a * sum_b / total : 0.0;
    double denom = 0.5 * (sum_a + sum_b) - expected;
    // denom vanishes only when both partitions are all-singletons or both are
    // a single block, i.e. identical
    if (denom == 0.0) return (a == b) ? 1.0 : 0.0;
    return (sum_cells - expected) / denom;
}

Eigen::MatrixXd posterior_similarity(const std::vector<Partition>& trace) {
    if (trace.empty()) throw config_error("posterior_similarity on empty trace");
    const int p = trace.front().p();
    Eigen::MatrixXd psm = Eigen::MatrixXd::Zero(p, p);
    for (const Partition& part : trace) {
        if (part.p() != p)
            throw config_error("posterior_similarity trace has mixed dimensions");
        for (int i = 0; i < p; ++i)
            for (int j = i + 1; j < p; ++j)
                if (part.label(i) == part.label(j)) {
                    psm(i, j) += 1.0;
                    psm(j, i) += 1.0;
                }
    }
    psm /= static_cast<double>(trace.size());
    psm.diagonal().setOnes();
    return psm;
}

double r2_loss(const Eigen::MatrixXd& psm_estimate, const Partition& truth) {
    const int p = truth.p();
    if (psm_estimate.rows() != p || psm_estimate.cols() != p)
        throw config_error("r2_loss dimension mismatch");
    double acc = 0.0;
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            if (truth.label(i) != truth.label(j)) continue;
            double pij = psm_estimate(i, j);
            if (pij <= 0.0) return std::numeric_limits<double>::infinity();
            acc += std::log(std::max(pij, 1e-300));
        }
    return -acc / (static_cast<double>(p) * p);
}

Partition recover_partition(const Eigen::MatrixXd& sigma, double tol) {
    const int p = static_cast<int>(sigma.rows());
    if (sigma.cols() != p) throw config_error("recover_partition needs a square matrix");

    auto equiv = [&](int i, int j) {
        if (std::abs(sigma(i, i) - sigma(j, j)) > tol) return false;
        for (int l = 0; l < p; ++l) {
            if (l == i || l == j) continue;
            if (std::abs(sigma(i, l) - sigma(j, l)) > tol) return false;
        }
        return true;
    };

    std::vector<std::vector<char>> eq(p, std::vector<char>(p, 0));
    for (int i = 0; i < p; ++i) {
        eq[i][i] = 1;
        for (int j = i + 1; j < p; ++j) eq[i][j] = eq[j][i] = equiv(i, j) ? 1 : 0;
    }
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) {
            if (!eq[i][j]) continue;
            for (int l = 0; l < p; ++l)
                if (eq[j][l] != eq[i][l])
                    throw data_error(
                        "recover_partition: tolerance relation is ambiguous "
                        "(chained near-equalities break transitivity)");
        }

    std::vector<int> labels(p, -1);
    int next = 0;
    for (int i = 0; i < p; ++i) {
        if (labels[i] >= 0) continue;
        for (int j = i; j < p; ++j)
            if (eq[i][j]) labels[j] = next;
        ++next;
    }
    return Partition::from_labels(labels);
}

} // namespace bcov
