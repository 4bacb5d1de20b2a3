#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bcov/baselines.hpp"
#include "bcov/dgp.hpp"
#include "bcov/errors.hpp"
#include "bcov/experiment.hpp"
#include "bcov/marginal.hpp"
#include "bcov/sampler.hpp"

namespace py = pybind11;
using namespace bcov;

namespace {

PriorRegime regime_from(const std::string& name) {
    if (name == "weak") return PriorRegime::Weak;
    if (name == "ck") return PriorRegime::CrealKim;
    if (name == "g") return PriorRegime::GPrior;
    if (name == "hier") return PriorRegime::Hierarchical;
    throw config_error("unknown prior '" + name + "' (expected weak|ck|g|hier)");
}

ChainConfig make_config(const std::string& prior, int iterations, int burnin,
                        int thin, int sams_repeats, double rho, double r0,
                        std::uint64_t seed, bool gibbs, bool sams,
                        bool learn_theta) {
    ChainConfig cc;
    cc.prior.regime = regime_from(prior);
    cc.prior.r0 = r0;
    cc.iterations = iterations;
    cc.burnin = burnin;
    cc.thin = thin;
    cc.sams_repeats = sams_repeats;
    cc.mfm.rho = rho;
    cc.seed = seed;
    cc.do_gibbs = gibbs;
    cc.do_sams = sams;
    cc.learn_theta = learn_theta;
    return cc;
}

py::dict estimate_py(const Eigen::MatrixXd& Y, const std::string& prior,
                     int iterations, int burnin, int thin, int sams_repeats,
                     double rho, double r0, std::uint64_t seed, bool gibbs,
                     bool sams, bool learn_theta) {
    ChainOutput run = run_chain(Y, make_config(prior, iterations, burnin, thin,
                                               sams_repeats, rho, r0, seed,
                                               gibbs, sams, learn_theta));
    EstimateResult est = estimate(run);
    py::dict out;
    out["sigma_hat"] = est.sigma_hat;
    out["psm"] = est.psm;
    out["map_labels"] = est.map_partition.labels();
    out["map_score"] = est.map_score;
    out["k_trace"] = run.k_trace;
    out["log_marg_trace"] = run.log_marg_trace;
    out["final_log_marg"] = run.final_log_marg;
    out["gibbs_move_rate"] = run.gibbs_move_rate;
    out["sams_accept_rate"] = run.sams_accept_rate;
    out["theta_accept_rate"] = run.theta_accept_rate;
    return out;
}

py::dict simulate_py(const std::string& scenario, int p, int n,
                     std::uint64_t seed, double rho, double hurst, double alpha,
                     int kstar, double tau, double delta1, double delta2,
                     double delta3) {
    ScenarioSpec spec;
    spec.kind = scenario_from_name(scenario);
    spec.p = p;
    spec.n = n;
    spec.rho = rho;
    spec.H = hurst;
    spec.alpha = alpha;
    spec.kstar = kstar;
    spec.tau = tau;
    spec.delta1 = delta1;
    spec.delta2 = delta2;
    spec.delta3 = delta3;
    RandomStream rng(seed);
    ScenarioDraw draw = draw_scenario(spec, rng);
    py::dict out;
    out["data"] = draw.data;
    out["sigma"] = draw.sigma;
    if (draw.has_truth_partition)
        out["labels"] = draw.truth.labels();
    else
        out["labels"] = py::none();
    return out;
}

double log_marginal_py(const Eigen::MatrixXd& Y, const std::vector<int>& labels,
                       const std::string& prior, double r0, double tau0) {
    SuffStats stats(Y);
    stats.assign_all(Partition::from_labels(labels));
    PriorSpec spec;
    spec.regime = regime_from(prior);
    spec.r0 = r0;
    spec.tau0 = tau0;
    return log_marginal_likelihood(stats.current_view(), spec);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Bayesian block-structured covariance estimation";
    m.attr("__version__") = "0.1.0";

    py::register_exception<config_error>(m, "ConfigError");
    py::register_exception<data_error>(m, "DataError");
    py::register_exception<numeric_error>(m, "NumericError");

    m.def("estimate", &estimate_py, py::arg("data"), py::arg("prior") = "hier",
          py::arg("iterations") = 5000, py::arg("burnin") = 2500,
          py::arg("thin") = 1, py::arg("sams_repeats") = 5,
          py::arg("rho") = 1.0, py::arg("r0") = 0.5, py::arg("seed") = 1,
          py::arg("gibbs") = true, py::arg("sams") = true,
          py::arg("learn_theta") = true,
          "Run the partition/covariance chain on an n x p data matrix and "
          "return the posterior summaries.");

    m.def("simulate", &simulate_py, py::arg("scenario"), py::arg("p") = 50,
          py::arg("n") = 50, py::arg("seed") = 1, py::arg("rho") = 0.5,
          py::arg("hurst") = 0.7, py::arg("alpha") = 0.3, py::arg("kstar") = 5,
          py::arg("tau") = 1.0, py::arg("delta1") = 0.5,
          py::arg("delta2") = 0.0, py::arg("delta3") = 0.5,
          "Draw a synthetic truth covariance and dataset.");

    m.def("scenario_names", [] {
        std::vector<std::string> names;
        for (ScenarioKind k : all_scenario_kinds())
            names.push_back(scenario_name(k));
        return names;
    });
    m.def("estimator_names", [] {
        std::vector<std::string> names;
        for (EstimatorKind k : all_estimator_kinds())
            names.push_back(estimator_name(k));
        return names;
    });

    m.def("log_marginal_likelihood", &log_marginal_py, py::arg("data"),
          py::arg("labels"), py::arg("prior") = "weak", py::arg("r0") = 0.5,
          py::arg("tau0") = 1.0,
          "Closed-form log p(Y | partition) under the chosen prior regime.");

    m.def(
        "ari",
        [](const std::vector<int>& a, const std::vector<int>& b) {
            return ari(Partition::from_labels(a), Partition::from_labels(b));
        },
        py::arg("labels_a"), py::arg("labels_b"));
    m.def(
        "r2_loss",
        [](const Eigen::MatrixXd& psm, const std::vector<int>& truth) {
            return r2_loss(psm, Partition::from_labels(truth));
        },
        py::arg("psm"), py::arg("labels_true"));

    m.def("sample_cov", &sample_cov, py::arg("data"), py::arg("center") = false);
    m.def("lw_linear", &lw_linear, py::arg("data"));
    m.def("banding", &banding, py::arg("S"), py::arg("bandwidth"));
    m.def("tapering", &tapering, py::arg("S"), py::arg("bandwidth"));
    m.def("hard_threshold", &hard_threshold, py::arg("S"), py::arg("t"));
    m.def("frobenius_ratio", &frobenius_ratio, py::arg("sigma_hat"),
          py::arg("S"), py::arg("sigma_true"));
}
