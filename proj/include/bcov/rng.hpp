#pragma once

#include <cstdint>
#include <vector>
#include <Eigen/Dense>

namespace bcov {

// Splittable, seed-reproducible variate stream. The generator is a splitmix64
// walk; child streams re-seed through the same avalanche mixer, so distinct
// lineage paths land in windows of the sequence that overlap only with
// probability ~2^-64. Single-owner: concurrency is achieved by splitting.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : state_(seed) {}

    // Derived stream for lineage element `label`. Pure: does not advance the
    // parent, and the same (parent state, label) always yields the same child.
    RandomStream child(std::uint64_t label) const;

    std::uint64_t next_u64();
    double uniform();                        // strictly inside (0,1)
    int uniform_int(int n);                  // {0, ..., n-1}
    double normal();
    double gamma(double shape, double rate); // mean shape/rate
    double chi2(double df) { return gamma(0.5 * df, 0.5); }
    double inverse_gamma(double shape, double rate); // mean rate/(shape-1)
    double cauchy(double loc, double scale);

    // index sampled proportionally to exp(logw), stabilized by max subtraction
    int categorical_log(const Eigen::VectorXd& logw);

    Eigen::VectorXd normal_vec(int n);
    Eigen::VectorXd dirichlet(int k, double alpha);
    Eigen::MatrixXd wishart(double df, const Eigen::MatrixXd& scale);
    // mean convention: E[draw] = scale / (df - k - 1)
    Eigen::MatrixXd inverse_wishart(double df, const Eigen::MatrixXd& scale);
    Eigen::VectorXd mvn(const Eigen::MatrixXd& sigma);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (int i = static_cast<int>(v.size()) - 1; i > 0; --i)
            std::swap(v[i], v[uniform_int(i + 1)]);
    }

private:
    std::uint64_t state_;
};

// Reusable zero-mean Gaussian sampler: factors sigma once, draws many.
// LDLT so exactly singular (PSD) inputs are legal; indefinite input beyond
// roundoff is an error, tiny negative pivots are clamped to zero.
class MvnSampler {
public:
    explicit MvnSampler(const Eigen::MatrixXd& sigma);
    Eigen::VectorXd draw(RandomStream& rng) const;
    int dim() const { return static_cast<int>(root_.rows()); }

private:
    Eigen::MatrixXd root_; // P^T L sqrt(D): root_ * z has covariance sigma
};

} // namespace bcov
