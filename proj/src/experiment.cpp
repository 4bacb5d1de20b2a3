#include "bcov/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "bcov/baselines.hpp"
#include "bcov/csvio.hpp"
#include "bcov/errors.hpp"

namespace bcov {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<double> bandwidth_grid(int p) {
    std::vector<double> g;
    for (int b = 0; b <= std::min(p - 1, 20); ++b) g.push_back(b);
    return g;
}

// thresholds spanning the off-diagonal magnitudes: 0, every 5th percentile,
// and a value above the maximum (diagonal-only fit)
std::vector<double> threshold_grid(const Eigen::MatrixXd& S) {
    const int p = static_cast<int>(S.rows());
    std::vector<double> mags;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) mags.push_back(std::abs(S(i, j)));
    if (mags.empty()) return {0.0};
    std::sort(mags.begin(), mags.end());
    std::vector<double> g = {0.0};
    const auto m = mags.size();
    for (int q = 5; q <= 95; q += 5) {
        double t = mags[(m - 1) * q / 100];
        if (t > g.back()) g.push_back(t);
    }
    g.push_back(mags.back() * (1.0 + 1e-12) + 1e-300);
    return g;
}

struct Fit {
    Eigen::MatrixXd sigma_hat;
    bool has_partition = false;
    Partition map_partition;
    Eigen::MatrixXd psm;
};

ChainConfig chain_config_for(PriorRegime regime, const ExperimentConfig& cfg,
                             std::uint64_t seed) {
    ChainConfig cc = cfg.chain;
    cc.prior.regime = regime;
    cc.seed = seed;
    return cc;
}

Fit fit_estimator(EstimatorKind kind, const Eigen::MatrixXd& Y,
                  const Eigen::MatrixXd& S, const Eigen::MatrixXd& sigma_true,
                  const ExperimentConfig& cfg, std::uint64_t seed) {
    RandomStream rng(seed);
    Fit out;
    switch (kind) {
    case EstimatorKind::Sample:
        out.sigma_hat = S;
        break;
    case EstimatorKind::Banding: {
        FitFunction f = [](const Eigen::MatrixXd& St, double b) {
            return banding(St, static_cast<int>(b));
        };
        double b = cv_tune(f, Y, bandwidth_grid(static_cast<int>(S.rows())),
                           cfg.cv_folds, rng);
        out.sigma_hat = banding(S, static_cast<int>(b));
        break;
    }
    case EstimatorKind::Tapering: {
        FitFunction f = [](const Eigen::MatrixXd& St, double b) {
            return tapering(St, static_cast<int>(b));
        };
        double b = cv_tune(f, Y, bandwidth_grid(static_cast<int>(S.rows())),
                           cfg.cv_folds, rng);
        out.sigma_hat = tapering(S, static_cast<int>(b));
        break;
    }
    case EstimatorKind::Threshold: {
        FitFunction f = [](const Eigen::MatrixXd& St, double t) {
            return hard_threshold(St, t);
        };
        double t = cv_tune(f, Y, threshold_grid(S), cfg.cv_folds, rng);
        out.sigma_hat = hard_threshold(S, t);
        break;
    }
    case EstimatorKind::LedoitWolf:
        out.sigma_hat = lw_linear(Y);
        break;
    case EstimatorKind::SteinPlugin:
        out.sigma_hat = stein_plugin_oracle(S, sigma_true);
        break;
    case EstimatorKind::Fsopt:
        out.sigma_hat = fsopt_oracle(S, sigma_true);
        break;
    case EstimatorKind::BcmWeak:
    case EstimatorKind::BcmCrealKim:
    case EstimatorKind::BcmG:
    case EstimatorKind::BcmHier: {
        PriorRegime regime = PriorRegime::Weak;
        if (kind == EstimatorKind::BcmCrealKim) regime = PriorRegime::CrealKim;
        if (kind == EstimatorKind::BcmG) regime = PriorRegime::GPrior;
        if (kind == EstimatorKind::BcmHier) regime = PriorRegime::Hierarchical;
        ChainOutput run = run_chain(Y, chain_config_for(regime, cfg, seed));
        EstimateResult est = estimate(run);
        out.sigma_hat = est.sigma_hat;
        out.has_partition = true;
        out.map_partition = est.map_partition;
        out.psm = est.psm;
        break;
    }
    }
    return out;
}

int resolve_workers(const ExperimentConfig& cfg) {
    if (cfg.workers > 0) return cfg.workers;
    if (const char* env = std::getenv("BCOV_WORKERS")) {
        int w = std::atoi(env);
        if (w > 0) return w;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string csv_safe(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

} // namespace

const std::vector<EstimatorKind>& all_estimator_kinds() {
    static const std::vector<EstimatorKind> kinds = {
        EstimatorKind::Sample,      EstimatorKind::Banding,
        EstimatorKind::Tapering,    EstimatorKind::Threshold,
        EstimatorKind::LedoitWolf,  EstimatorKind::SteinPlugin,
        EstimatorKind::Fsopt,       EstimatorKind::BcmWeak,
        EstimatorKind::BcmCrealKim, EstimatorKind::BcmG,
        EstimatorKind::BcmHier,
    };
    return kinds;
}

std::string estimator_name(EstimatorKind kind) {
    switch (kind) {
    case EstimatorKind::Sample: return "sample";
    case EstimatorKind::Banding: return "banding";
    case EstimatorKind::Tapering: return "tapering";
    case EstimatorKind::Threshold: return "threshold";
    case EstimatorKind::LedoitWolf: return "lw";
    case EstimatorKind::SteinPlugin: return "stein";
    case EstimatorKind::Fsopt: return "fsopt";
    case EstimatorKind::BcmWeak: return "bcm_weak";
    case EstimatorKind::BcmCrealKim: return "bcm_ck";
    case EstimatorKind::BcmG: return "bcm_g";
    case EstimatorKind::BcmHier: return "bcm_hier";
    }
    throw config_error("unknown estimator kind");
}

EstimatorKind estimator_from_name(const std::string& name) {
    for (EstimatorKind k : all_estimator_kinds())
        if (estimator_name(k) == name) return k;
    throw config_error("unknown estimator '" + name + "'");
}

std::vector<MetricRow> run_experiment(const ExperimentConfig& cfg) {
    if (cfg.scenarios.empty()) throw config_error("no scenarios configured");
    if (cfg.estimators.empty()) throw config_error("no estimators configured");
    if (cfg.replicates < 1) throw config_error("replicates must be >= 1");

    const std::size_t n_est = cfg.estimators.size();
    const std::size_t n_tasks = cfg.scenarios.size() * cfg.replicates;
    std::vector<MetricRow> rows(n_tasks * n_est);

    RandomStream master(cfg.seed);
    std::atomic<std::size_t> next{0};

    auto run_task = [&](std::size_t task) {
        const std::size_t si = task / cfg.replicates;
        const int rep = static_cast<int>(task % cfg.replicates);
        const ScenarioSpec& spec = cfg.scenarios[si];
        RandomStream task_rng =
            master.child(si).child(static_cast<std::uint64_t>(rep));

        MetricRow base;
        base.scenario = scenario_name(spec.kind);
        base.replicate = rep;

        ScenarioDraw draw;
        std::string draw_error;
        try {
            RandomStream draw_rng = task_rng.child(0);
            draw = draw_scenario(spec, draw_rng);
        } catch (const std::exception& e) {
            draw_error = e.what();
        }
        Eigen::MatrixXd S;
        if (draw_error.empty()) S = sample_cov(draw.data);

        for (std::size_t ei = 0; ei < n_est; ++ei) {
            MetricRow row = base;
            row.estimator = estimator_name(cfg.estimators[ei]);
            row.frobenius_ratio = kNaN;
            row.ari = kNaN;
            row.r2 = kNaN;
            row.frob_error = kNaN;
            row.seed = task_rng.child(1 + ei).next_u64();
            if (!draw_error.empty()) {
                row.error = draw_error;
                rows[task * n_est + ei] = std::move(row);
                continue;
            }
            auto t0 = std::chrono::steady_clock::now();
            try {
                Fit fit = fit_estimator(cfg.estimators[ei], draw.data, S,
                                        draw.sigma, cfg, row.seed);
                row.frob_error = (fit.sigma_hat - draw.sigma).norm();
                row.frobenius_ratio =
                    frobenius_ratio(fit.sigma_hat, S, draw.sigma);
                row.pd = is_pd_matrix(fit.sigma_hat);
                if (fit.has_partition && draw.has_truth_partition) {
                    row.ari = ari(fit.map_partition, draw.truth);
                    row.r2 = r2_loss(fit.psm, draw.truth);
                }
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            auto t1 = std::chrono::steady_clock::now();
            row.runtime_ms =
                std::chrono::duration<double, std::milli>(t1 - t0).count();
            rows[task * n_est + ei] = std::move(row);
        }
    };

    const int workers =
        std::min<int>(resolve_workers(cfg), static_cast<int>(n_tasks));
    if (workers <= 1) {
        for (std::size_t t = 0; t < n_tasks; ++t) run_task(t);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t t = next.fetch_add(1);
                    if (t >= n_tasks) return;
                    run_task(t);
                }
            });
        for (auto& th : pool) th.join();
    }
    return rows;
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
    std::ostringstream os;
    os << "scenario,replicate,estimator,frobenius_ratio,ari,r2,runtime_ms,"
          "seed,frob_error,pd,error\n";
    for (const MetricRow& r : rows) {
        os << r.scenario << ',' << r.replicate << ',' << r.estimator << ','
           << format_g17(r.frobenius_ratio) << ',' << format_g17(r.ari) << ','
           << format_g17(r.r2) << ',' << format_g17(r.runtime_ms) << ','
           << r.seed << ',' << format_g17(r.frob_error) << ','
           << (r.pd ? 1 : 0) << ',' << csv_safe(r.error) << '\n';
    }
    return os.str();
}

} // namespace bcov
