// Command-line front end: estimate / simulate / experiment / metrics.
// Exit codes: 0 ok, 2 bad configuration, 3 bad data, 4 numeric failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bcov/baselines.hpp"
#include "bcov/csvio.hpp"
#include "bcov/errors.hpp"
#include "bcov/experiment.hpp"
#include "bcov/sampler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kLargePWarning = 200;

// ---- config file preload ---------------------------------------------------
// A JSON config supplies defaults by long-option name; command-line flags
// parsed afterwards win. Setters are registered alongside each option.
struct ConfigBinding {
    std::map<std::string, std::function<void(const json&)>> setters;

    void bind_int(const std::string& key, int& ref) {
        setters[key] = [&ref](const json& v) { ref = v.get<int>(); };
    }
    void bind_u64(const std::string& key, std::uint64_t& ref) {
        setters[key] = [&ref](const json& v) { ref = v.get<std::uint64_t>(); };
    }
    void bind_double(const std::string& key, double& ref) {
        setters[key] = [&ref](const json& v) { ref = v.get<double>(); };
    }
    void bind_bool(const std::string& key, bool& ref) {
        setters[key] = [&ref](const json& v) { ref = v.get<bool>(); };
    }
    void bind_string(const std::string& key, std::string& ref) {
        setters[key] = [&ref](const json& v) { ref = v.get<std::string>(); };
    }
    void bind_doubles(const std::string& key, std::vector<double>& ref) {
        setters[key] = [&ref](const json& v) {
            ref = v.get<std::vector<double>>();
        };
    }

    void apply(const std::string& path) const {
        std::ifstream in(path);
        if (!in) throw bcov::config_error("cannot open config file " + path);
        json cfg;
        try {
            cfg = json::parse(in);
        } catch (const json::exception& e) {
            throw bcov::config_error(path + ": " + e.what());
        }
        if (!cfg.is_object())
            throw bcov::config_error(path + ": top level must be an object");
        for (auto it = cfg.begin(); it != cfg.end(); ++it) {
            auto s = setters.find(it.key());
            if (s == setters.end())
                throw bcov::config_error(path + ": unknown key '" + it.key() +
                                         "'");
            try {
                s->second(it.value());
            } catch (const json::exception& e) {
                throw bcov::config_error(path + ": key '" + it.key() +
                                         "': " + e.what());
            }
        }
    }
};

// the config path must be known before CLI11 runs, so scan argv directly
std::string find_config_arg(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return argv[i + 1];
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return "";
}

// ---- shared helpers --------------------------------------------------------

std::string regime_name(bcov::PriorRegime r) {
    switch (r) {
    case bcov::PriorRegime::Weak: return "weak";
    case bcov::PriorRegime::CrealKim: return "ck";
    case bcov::PriorRegime::GPrior: return "g";
    case bcov::PriorRegime::Hierarchical: return "hier";
    }
    return "?";
}

bcov::PriorRegime regime_from_name(const std::string& name) {
    if (name == "weak") return bcov::PriorRegime::Weak;
    if (name == "ck") return bcov::PriorRegime::CrealKim;
    if (name == "g") return bcov::PriorRegime::GPrior;
    if (name == "hier") return bcov::PriorRegime::Hierarchical;
    throw bcov::config_error("unknown prior '" + name +
                             "' (expected weak|ck|g|hier)");
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

void ensure_out_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw bcov::config_error("cannot create output directory " + dir +
                                 ": " + ec.message());
}

void write_json_file(const std::string& path, const json& j) {
    bcov::write_text_file(path, j.dump(2) + "\n");
}

void standardize_columns(Eigen::MatrixXd& Y) {
    const auto n = Y.rows();
    for (Eigen::Index c = 0; c < Y.cols(); ++c) {
        Y.col(c).array() -= Y.col(c).mean();
        double sd = std::sqrt(Y.col(c).squaredNorm() / static_cast<double>(n));
        if (!(sd > 0.0))
            throw bcov::data_error("column " + std::to_string(c + 1) +
                                   " is constant; cannot standardize");
        Y.col(c) /= sd;
    }
}

json theta_json(const bcov::Hyperparams& t) {
    return json{{"nu0", t.nu0},
                {"s0", t.s0},
                {"delta1", t.delta1},
                {"delta2", t.delta2},
                {"delta3", t.delta3}};
}

json chain_json(const bcov::ChainConfig& c) {
    const bcov::HyperpriorConfig& h = c.prior.hyper;
    return json{{"iterations", c.iterations},
                {"burnin", c.burnin},
                {"thin", c.thin},
                {"sams_repeats", c.sams_repeats},
                {"do_gibbs", c.do_gibbs},
                {"do_sams", c.do_sams},
                {"learn_theta", c.learn_theta},
                {"rho", c.mfm.rho},
                {"prior", regime_name(c.prior.regime)},
                {"r0", c.prior.r0},
                {"tau0", c.prior.tau0},
                {"theta0", theta_json(c.prior.theta)},
                {"hyper_d1", {h.d1_shape, h.d1_rate}},
                {"hyper_d2", {h.d2_shape, h.d2_rate}},
                {"hyper_d3", {h.d3_shape, h.d3_rate}},
                {"gamma_scale", h.scale_parametrization},
                {"seed", c.seed}};
}

json scenario_json(const bcov::ScenarioSpec& s) {
    return json{{"scenario", bcov::scenario_name(s.kind)},
                {"p", s.p},
                {"n", s.n},
                {"rho", s.rho},
                {"H", s.H},
                {"alpha", s.alpha},
                {"kstar", s.kstar},
                {"tau", s.tau},
                {"delta1", s.delta1},
                {"delta2", s.delta2},
                {"delta3", s.delta3}};
}

// ---- estimate ----------------------------------------------------------------

struct EstimateOpts {
    std::string data_path;
    std::string out_dir = "bcov_out";
    std::string prior = "hier";
    double r0 = 0.5;
    double rho = 1.0;
    int iterations = 5000;
    int burnin = 2500;
    int thin = 1;
    int sams_repeats = 5;
    bool no_gibbs = false;
    bool no_sams = false;
    bool fixed_theta = false;
    bool standardize = false;
    std::vector<double> hyper_d1{2.0, 4.0};
    std::vector<double> hyper_d2{1.0, 10.0};
    std::vector<double> hyper_d3{1.0, 10.0};
    bool gamma_scale = false;
    std::uint64_t seed = 1;
};

bcov::HyperpriorConfig hyper_from_opts(const std::vector<double>& d1,
                                       const std::vector<double>& d2,
                                       const std::vector<double>& d3,
                                       bool gamma_scale) {
    for (const auto* v : {&d1, &d2, &d3}) {
        if (v->size() != 2)
            throw bcov::config_error("gamma hyperprior needs two values");
        if (!((*v)[0] > 0.0) || !((*v)[1] > 0.0))
            throw bcov::config_error("gamma hyperprior values must be positive");
    }
    bcov::HyperpriorConfig h;
    h.d1_shape = d1[0];
    h.d1_rate = d1[1];
    h.d2_shape = d2[0];
    h.d2_rate = d2[1];
    h.d3_shape = d3[0];
    h.d3_rate = d3[1];
    h.scale_parametrization = gamma_scale;
    return h;
}

void run_estimate(const EstimateOpts& o) {
    bcov::CsvData csv = bcov::read_csv(o.data_path);
    Eigen::MatrixXd Y = csv.values;
    const int n = static_cast<int>(Y.rows());
    const int p = static_cast<int>(Y.cols());
    if (p > kLargePWarning)
        std::fprintf(stderr,
                     "warning: p = %d exceeds %d; expect prohibitive runtime\n",
                     p, kLargePWarning);
    if (o.standardize) standardize_columns(Y);

    bcov::ChainConfig cc;
    cc.iterations = o.iterations;
    cc.burnin = o.burnin;
    cc.thin = o.thin;
    cc.sams_repeats = o.sams_repeats;
    cc.do_gibbs = !o.no_gibbs;
    cc.do_sams = !o.no_sams;
    cc.learn_theta = !o.fixed_theta;
    cc.prior.regime = regime_from_name(o.prior);
    cc.prior.r0 = o.r0;
    cc.prior.hyper =
        hyper_from_opts(o.hyper_d1, o.hyper_d2, o.hyper_d3, o.gamma_scale);
    cc.mfm.rho = o.rho;
    cc.seed = o.seed;

    bcov::ChainOutput run = bcov::run_chain(Y, cc);
    bcov::EstimateResult est = bcov::estimate(run);

    ensure_out_dir(o.out_dir);
    fs::path out(o.out_dir);
    bcov::write_matrix_csv((out / "sigma_hat.csv").string(), est.sigma_hat);
    bcov::write_matrix_csv((out / "psm.csv").string(), est.psm);
    bcov::write_labels_csv((out / "partition_map.csv").string(),
                           est.map_partition.labels());

    Eigen::MatrixXd ktr(run.k_trace.size(), 1);
    for (std::size_t i = 0; i < run.k_trace.size(); ++i)
        ktr(static_cast<Eigen::Index>(i), 0) = run.k_trace[i];
    bcov::write_matrix_csv((out / "k_trace.csv").string(), ktr, {"k"});

    Eigen::MatrixXd ttr(run.theta_trace.size(), 5);
    for (std::size_t i = 0; i < run.theta_trace.size(); ++i) {
        const bcov::Hyperparams& t = run.theta_trace[i];
        ttr.row(static_cast<Eigen::Index>(i)) << t.nu0, t.s0, t.delta1,
            t.delta2, t.delta3;
    }
    bcov::write_matrix_csv((out / "theta_trace.csv").string(), ttr,
                           {"nu0", "s0", "delta1", "delta2", "delta3"});

    json summary = {
        {"command", "estimate"},
        {"version", kVersion},
        {"data", o.data_path},
        {"n", n},
        {"p", p},
        {"standardize", o.standardize},
        {"chain", chain_json(run.config)},
        {"results",
         {{"k_map", est.map_partition.k()},
          {"map_score", est.map_score},
          {"final_log_marg", run.final_log_marg},
          {"gibbs_move_rate", run.gibbs_move_rate},
          {"sams_accept_rate", run.sams_accept_rate},
          {"theta_accept_rate", run.theta_accept_rate},
          {"am_degenerate", run.am_degenerate}}},
    };
    write_json_file((out / "summary.json").string(), summary);
    std::printf("estimate: wrote %s (k_map = %d)\n", o.out_dir.c_str(),
                est.map_partition.k());
}

// ---- simulate ----------------------------------------------------------------

struct SimulateOpts {
    std::string scenario = "ar1";
    std::string out_dir = "bcov_sim";
    bcov::ScenarioSpec spec;
    std::uint64_t seed = 1;
};

void run_simulate(const SimulateOpts& o) {
    bcov::ScenarioSpec spec = o.spec;
    spec.kind = bcov::scenario_from_name(o.scenario);
    bcov::RandomStream rng(o.seed);
    bcov::ScenarioDraw draw = bcov::draw_scenario(spec, rng);

    ensure_out_dir(o.out_dir);
    fs::path out(o.out_dir);
    bcov::write_matrix_csv((out / "data.csv").string(), draw.data);
    bcov::write_matrix_csv((out / "sigma_true.csv").string(), draw.sigma);
    if (draw.has_truth_partition)
        bcov::write_labels_csv((out / "labels_true.csv").string(),
                               draw.truth.labels());

    json meta = scenario_json(spec);
    meta["command"] = "simulate";
    meta["version"] = kVersion;
    meta["seed"] = o.seed;
    meta["has_truth_partition"] = draw.has_truth_partition;
    write_json_file((out / "meta.json").string(), meta);
    std::printf("simulate: wrote %s (%d x %d)\n", o.out_dir.c_str(), spec.n,
                spec.p);
}

// ---- experiment ----------------------------------------------------------------

struct ExperimentOpts {
    std::string out_dir = "bcov_exp";
    std::string scenarios = "all";
    std::string estimators = "sample,lw,bcm_weak,bcm_hier";
    int replicates = 10;
    std::uint64_t seed = 1;
    int workers = 0;
    int cv_folds = 5;
    bcov::ScenarioSpec spec; // shared p/n and scenario parameters
    int iterations = 5000;
    int burnin = 2500;
    int thin = 1;
    int sams_repeats = 5;
    double rho = 1.0;
    double r0 = 0.5;
};

void run_experiment_cmd(const ExperimentOpts& o) {
    bcov::ExperimentConfig cfg;
    if (o.scenarios == "all") {
        for (bcov::ScenarioKind k : bcov::all_scenario_kinds()) {
            bcov::ScenarioSpec s = o.spec;
            s.kind = k;
            cfg.scenarios.push_back(s);
        }
    } else {
        for (const std::string& name : split_list(o.scenarios)) {
            bcov::ScenarioSpec s = o.spec;
            s.kind = bcov::scenario_from_name(name);
            cfg.scenarios.push_back(s);
        }
    }
    if (o.estimators == "all") {
        cfg.estimators = bcov::all_estimator_kinds();
    } else {
        for (const std::string& name : split_list(o.estimators))
            cfg.estimators.push_back(bcov::estimator_from_name(name));
    }
    cfg.replicates = o.replicates;
    cfg.seed = o.seed;
    cfg.workers = o.workers;
    cfg.cv_folds = o.cv_folds;
    cfg.chain.iterations = o.iterations;
    cfg.chain.burnin = o.burnin;
    cfg.chain.thin = o.thin;
    cfg.chain.sams_repeats = o.sams_repeats;
    cfg.chain.mfm.rho = o.rho;
    cfg.chain.prior.r0 = o.r0;

    std::vector<bcov::MetricRow> rows = bcov::run_experiment(cfg);

    ensure_out_dir(o.out_dir);
    fs::path out(o.out_dir);
    bcov::write_text_file((out / "metrics.csv").string(),
                          bcov::metrics_csv(rows));

    json scen = json::array();
    for (const bcov::ScenarioSpec& s : cfg.scenarios)
        scen.push_back(scenario_json(s));
    json est = json::array();
    for (bcov::EstimatorKind k : cfg.estimators)
        est.push_back(bcov::estimator_name(k));
    json meta = {
        {"command", "experiment"}, {"version", kVersion},
        {"seed", o.seed},          {"replicates", o.replicates},
        {"workers", o.workers},    {"cv_folds", o.cv_folds},
        {"scenarios", scen},       {"estimators", est},
        {"chain", chain_json(cfg.chain)},
    };
    write_json_file((out / "meta.json").string(), meta);

    int failures = 0;
    for (const bcov::MetricRow& r : rows)
        if (!r.error.empty()) ++failures;
    std::printf("experiment: wrote %zu rows to %s (%d failed)\n", rows.size(),
                o.out_dir.c_str(), failures);
}

// ---- metrics ----------------------------------------------------------------

struct MetricsOpts {
    std::string estimate_dir;
    std::string truth_dir;
    std::string out_path; // empty: stdout
};

void run_metrics(const MetricsOpts& o) {
    fs::path est(o.estimate_dir), truth(o.truth_dir);
    json report = {{"command", "metrics"}, {"version", kVersion}};
    json notices = json::array();

    auto sigma_true_path = truth / "sigma_true.csv";
    auto sigma_hat_path = est / "sigma_hat.csv";
    if (!fs::exists(sigma_hat_path))
        throw bcov::data_error("missing " + sigma_hat_path.string());

    Eigen::MatrixXd sigma_hat =
        bcov::read_csv(sigma_hat_path.string()).values;

    if (fs::exists(sigma_true_path)) {
        Eigen::MatrixXd sigma_true =
            bcov::read_csv(sigma_true_path.string()).values;
        if (sigma_true.rows() != sigma_hat.rows())
            throw bcov::data_error("sigma_hat and sigma_true dimensions differ");
        report["frob_error"] = (sigma_hat - sigma_true).norm();
        auto data_path = truth / "data.csv";
        if (fs::exists(data_path)) {
            Eigen::MatrixXd Y = bcov::read_csv(data_path.string()).values;
            Eigen::MatrixXd S = bcov::sample_cov(Y);
            report["frobenius_ratio"] =
                bcov::frobenius_ratio(sigma_hat, S, sigma_true);
        } else {
            notices.push_back("data.csv not found; frobenius_ratio omitted");
        }
    } else {
        notices.push_back("sigma_true.csv not found; Frobenius metrics omitted");
    }

    auto labels_path = truth / "labels_true.csv";
    if (fs::exists(labels_path)) {
        bcov::Partition truth_part = bcov::Partition::from_labels(
            bcov::read_labels_csv(labels_path.string()));
        auto map_path = est / "partition_map.csv";
        if (fs::exists(map_path)) {
            bcov::Partition map_part = bcov::Partition::from_labels(
                bcov::read_labels_csv(map_path.string()));
            report["ari"] = bcov::ari(map_part, truth_part);
        } else {
            notices.push_back("partition_map.csv not found; ari omitted");
        }
        auto psm_path = est / "psm.csv";
        if (fs::exists(psm_path)) {
            Eigen::MatrixXd psm = bcov::read_csv(psm_path.string()).values;
            report["r2"] = bcov::r2_loss(psm, truth_part);
        } else {
            notices.push_back("psm.csv not found; r2 omitted");
        }
    } else {
        notices.push_back("labels_true.csv not found; ari/r2 omitted");
    }

    report["notices"] = notices;
    std::string text = report.dump(2) + "\n";
    if (o.out_path.empty())
        std::fputs(text.c_str(), stdout);
    else
        bcov::write_text_file(o.out_path, text);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian block-structured covariance estimation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    EstimateOpts eo;
    SimulateOpts so;
    ExperimentOpts xo;
    MetricsOpts mo;
    ConfigBinding est_cfg, sim_cfg, exp_cfg;
    std::string config_path_opt; // handled by pre-scan; registered so CLI11 accepts it

    CLI::App* est = app.add_subcommand("estimate", "Fit the model to a data CSV");
    est->add_option("--data", eo.data_path, "n x p data CSV (rows = observations)")
        ->required();
    est->add_option("--out", eo.out_dir, "output directory");
    est->add_option("--prior", eo.prior, "prior regime: weak|ck|g|hier");
    est->add_option("--r0", eo.r0, "prior equicorrelation (ck regime)");
    est->add_option("--rho", eo.rho, "partition-prior Dirichlet concentration");
    est->add_option("--iterations", eo.iterations, "MCMC iterations");
    est->add_option("--burnin", eo.burnin, "discarded iterations");
    est->add_option("--thin", eo.thin, "retain every thin-th draw");
    est->add_option("--sams-repeats", eo.sams_repeats,
                    "merge-split proposals per iteration");
    est->add_flag("--no-gibbs", eo.no_gibbs, "disable the Gibbs label scan");
    est->add_flag("--no-sams", eo.no_sams, "disable merge-split moves");
    est->add_flag("--fixed-theta", eo.fixed_theta,
                  "keep hierarchical hyperparameters at their initial values");
    est->add_flag("--standardize", eo.standardize,
                  "columnwise zero-mean unit-variance transform");
    est->add_option("--hyper-d1", eo.hyper_d1,
                    "delta1 gamma hyperprior as shape rate")
        ->expected(2);
    est->add_option("--hyper-d2", eo.hyper_d2,
                    "delta2 gamma hyperprior as shape rate")
        ->expected(2);
    est->add_option("--hyper-d3", eo.hyper_d3,
                    "delta3 gamma hyperprior as shape rate")
        ->expected(2);
    est->add_flag("--gamma-scale", eo.gamma_scale,
                  "read gamma hyperprior pairs as shape scale");
    est->add_option("--seed", eo.seed, "random seed");
    est->add_option("--config", config_path_opt, "JSON config file");
    est_cfg.bind_string("data", eo.data_path);
    est_cfg.bind_string("out", eo.out_dir);
    est_cfg.bind_string("prior", eo.prior);
    est_cfg.bind_double("r0", eo.r0);
    est_cfg.bind_double("rho", eo.rho);
    est_cfg.bind_int("iterations", eo.iterations);
    est_cfg.bind_int("burnin", eo.burnin);
    est_cfg.bind_int("thin", eo.thin);
    est_cfg.bind_int("sams-repeats", eo.sams_repeats);
    est_cfg.bind_bool("no-gibbs", eo.no_gibbs);
    est_cfg.bind_bool("no-sams", eo.no_sams);
    est_cfg.bind_bool("fixed-theta", eo.fixed_theta);
    est_cfg.bind_bool("standardize", eo.standardize);
    est_cfg.bind_doubles("hyper-d1", eo.hyper_d1);
    est_cfg.bind_doubles("hyper-d2", eo.hyper_d2);
    est_cfg.bind_doubles("hyper-d3", eo.hyper_d3);
    est_cfg.bind_bool("gamma-scale", eo.gamma_scale);
    est_cfg.bind_u64("seed", eo.seed);
    est->callback([&] { run_estimate(eo); });

    CLI::App* sim = app.add_subcommand("simulate", "Draw a synthetic dataset");
    sim->add_option("--scenario", so.scenario, "scenario name");
    sim->add_option("--out", so.out_dir, "output directory");
    sim->add_option("--p", so.spec.p, "dimension");
    sim->add_option("--n", so.spec.n, "observations");
    sim->add_option("--rho", so.spec.rho, "serial correlation (ma1/ar1/toeplitz)");
    sim->add_option("--hurst", so.spec.H, "long-range Hurst index");
    sim->add_option("--alpha", so.spec.alpha, "toeplitz decay exponent");
    sim->add_option("--kstar", so.spec.kstar, "component count (grouped draws)");
    sim->add_option("--tau", so.spec.tau, "prior concentration (grouped draws)");
    sim->add_option("--delta1", so.spec.delta1, "grouped-draw delta1");
    sim->add_option("--delta2", so.spec.delta2, "grouped-draw delta2");
    sim->add_option("--delta3", so.spec.delta3, "grouped-draw delta3");
    sim->add_option("--seed", so.seed, "random seed");
    sim->add_option("--config", config_path_opt, "JSON config file");
    sim_cfg.bind_string("scenario", so.scenario);
    sim_cfg.bind_string("out", so.out_dir);
    sim_cfg.bind_int("p", so.spec.p);
    sim_cfg.bind_int("n", so.spec.n);
    sim_cfg.bind_double("rho", so.spec.rho);
    sim_cfg.bind_double("hurst", so.spec.H);
    sim_cfg.bind_double("alpha", so.spec.alpha);
    sim_cfg.bind_int("kstar", so.spec.kstar);
    sim_cfg.bind_double("tau", so.spec.tau);
    sim_cfg.bind_double("delta1", so.spec.delta1);
    sim_cfg.bind_double("delta2", so.spec.delta2);
    sim_cfg.bind_double("delta3", so.spec.delta3);
    sim_cfg.bind_u64("seed", so.seed);
    sim->callback([&] { run_simulate(so); });

    CLI::App* exp =
        app.add_subcommand("experiment", "Replicated estimator comparison");
    exp->add_option("--out", xo.out_dir, "output directory");
    exp->add_option("--scenarios", xo.scenarios,
                    "comma-separated scenario names, or 'all'");
    exp->add_option("--estimators", xo.estimators,
                    "comma-separated estimator names, or 'all'");
    exp->add_option("--replicates", xo.replicates, "replicates per scenario");
    exp->add_option("--seed", xo.seed, "random seed");
    exp->add_option("--workers", xo.workers,
                    "worker threads (0: BCOV_WORKERS env or hardware)");
    exp->add_option("--cv-folds", xo.cv_folds, "cross-validation folds");
    exp->add_option("--p", xo.spec.p, "dimension");
    exp->add_option("--n", xo.spec.n, "observations");
    exp->add_option("--rho-serial", xo.spec.rho,
                    "serial correlation (ma1/ar1/toeplitz)");
    exp->add_option("--hurst", xo.spec.H, "long-range Hurst index");
    exp->add_option("--alpha", xo.spec.alpha, "toeplitz decay exponent");
    exp->add_option("--kstar", xo.spec.kstar, "component count (grouped draws)");
    exp->add_option("--tau", xo.spec.tau, "prior concentration (grouped draws)");
    exp->add_option("--delta1", xo.spec.delta1, "grouped-draw delta1");
    exp->add_option("--delta2", xo.spec.delta2, "grouped-draw delta2");
    exp->add_option("--delta3", xo.spec.delta3, "grouped-draw delta3");
    exp->add_option("--iterations", xo.iterations, "MCMC iterations");
    exp->add_option("--burnin", xo.burnin, "discarded iterations");
    exp->add_option("--thin", xo.thin, "retain every thin-th draw");
    exp->add_option("--sams-repeats", xo.sams_repeats,
                    "merge-split proposals per iteration");
    exp->add_option("--rho", xo.rho, "partition-prior Dirichlet concentration");
    exp->add_option("--r0", xo.r0, "prior equicorrelation (ck regime)");
    exp->add_option("--config", config_path_opt, "JSON config file");
    exp_cfg.bind_string("out", xo.out_dir);
    exp_cfg.bind_string("scenarios", xo.scenarios);
    exp_cfg.bind_string("estimators", xo.estimators);
    exp_cfg.bind_int("replicates", xo.replicates);
    exp_cfg.bind_u64("seed", xo.seed);
    exp_cfg.bind_int("workers", xo.workers);
    exp_cfg.bind_int("cv-folds", xo.cv_folds);
    exp_cfg.bind_int("p", xo.spec.p);
    exp_cfg.bind_int("n", xo.spec.n);
    exp_cfg.bind_double("rho-serial", xo.spec.rho);
    exp_cfg.bind_double("hurst", xo.spec.H);
    exp_cfg.bind_double("alpha", xo.spec.alpha);
    exp_cfg.bind_int("kstar", xo.spec.kstar);
    exp_cfg.bind_double("tau", xo.spec.tau);
    exp_cfg.bind_double("delta1", xo.spec.delta1);
    exp_cfg.bind_double("delta2", xo.spec.delta2);
    exp_cfg.bind_double("delta3", xo.spec.delta3);
    exp_cfg.bind_int("iterations", xo.iterations);
    exp_cfg.bind_int("burnin", xo.burnin);
    exp_cfg.bind_int("thin", xo.thin);
    exp_cfg.bind_int("sams-repeats", xo.sams_repeats);
    exp_cfg.bind_double("rho", xo.rho);
    exp_cfg.bind_double("r0", xo.r0);
    exp->callback([&] { run_experiment_cmd(xo); });

    CLI::App* met = app.add_subcommand("metrics", "Score a fit against a truth");
    met->add_option("--estimate-dir", mo.estimate_dir,
                    "directory written by 'estimate'")
        ->required();
    met->add_option("--truth-dir", mo.truth_dir,
                    "directory written by 'simulate'")
        ->required();
    met->add_option("--out", mo.out_path, "report path (default stdout)");
    met->callback([&] { run_metrics(mo); });

    try {
        std::string config_path = find_config_arg(argc, argv);
        if (!config_path.empty()) {
            std::string sub = argc > 1 ? argv[1] : "";
            if (sub == "estimate") est_cfg.apply(config_path);
            else if (sub == "simulate") sim_cfg.apply(config_path);
            else if (sub == "experiment") exp_cfg.apply(config_path);
            else
                throw bcov::config_error(
                    "--config requires the subcommand first");
        }
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    } catch (const bcov::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const bcov::data_error& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const bcov::numeric_error& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 0;
}
