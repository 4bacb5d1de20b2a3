#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bcov/dgp.hpp"
#include "bcov/sampler.hpp"

namespace bcov {

// Competing fits evaluated by the benchmark harness. The two oracle kinds
// consume the true covariance; the Bcm* kinds run the full chain.
enum class EstimatorKind {
    Sample,
    Banding,
    Tapering,
    Threshold,
    LedoitWolf,
    SteinPlugin,
    Fsopt,
    BcmWeak,
    BcmCrealKim,
    BcmG,
    BcmHier,
};

const std::vector<EstimatorKind>& all_estimator_kinds();
std::string estimator_name(EstimatorKind kind);
EstimatorKind estimator_from_name(const std::string& name);

struct ExperimentConfig {
    std::vector<ScenarioSpec> scenarios;
    std::vector<EstimatorKind> estimators;
    int replicates = 10;
    std::uint64_t seed = 1;
    int workers = 0;   // 0: BCOV_WORKERS env var, else hardware concurrency
    int cv_folds = 5;
    ChainConfig chain; // template for the Bcm* kinds; seed is set per fit
};

// One (scenario, replicate, estimator) result. Partition metrics stay NaN for
// estimators that carry no partition, and on scenarios without a truth
// partition. A failed fit keeps NaN metrics and records the error string.
struct MetricRow {
    std::string scenario;
    int replicate = 0;
    std::string estimator;
    double frobenius_ratio = 0.0;
    double ari = 0.0;
    double r2 = 0.0;
    double runtime_ms = 0.0;
    std::uint64_t seed = 0;
    double frob_error = 0.0; // ||sigma_hat - sigma_true||_F
    bool pd = false;
    std::string error;
};

// Runs every (scenario, replicate) cell once, fitting all estimators on the
// shared dataset. Deterministic under config.seed regardless of worker count:
// each cell owns a split random stream and writes to its own output slots.
std::vector<MetricRow> run_experiment(const ExperimentConfig& config);

// CSV serialization with header; commas inside error strings are replaced.
std::string metrics_csv(const std::vector<MetricRow>& rows);

} // namespace bcov
