#include "bcov/sampler.hpp"
#include "bcov/errors.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bcov {

AdaptiveMetropolis::AdaptiveMetropolis(int dim, double target_accept,
                                       double decay, double init_scale)
    : dim_(dim), target_accept_(target_accept), decay_(decay),
      scale0_(init_scale), mean_(Eigen::VectorXd::Zero(dim)),
      cov_(0.01 * Eigen::MatrixXd::Identity(dim, dim)) {}

bool AdaptiveMetropolis::step(Eigen::VectorXd& x, double& log_target_value,
                              const LogTarget& target, RandomStream& rng) {
    if (t_ == 0) mean_ = x;
    ++t_;
    ++proposed_;

    Eigen::LLT<Eigen::MatrixXd> llt(
        cov_ + 1e-12 * Eigen::MatrixXd::Identity(dim_, dim_));
    Eigen::VectorXd prop =
        x + scale0_ * std::exp(log_scale_) *
                (Eigen::MatrixXd(llt.matrixL()) * rng.normal_vec(dim_));

    double lt_prop = target(prop);
    double log_alpha = lt_prop - log_target_value;
    double alpha = std::exp(std::min(0.0, log_alpha));
    bool accept = rng.uniform() < alpha;
    if (accept) {
        x = prop;
        log_target_value = lt_prop;
        ++accepted_;
    }

    if (!frozen_) {
        double gamma = std::pow(double(t_), -decay_);
        log_scale_ += gamma * (alpha - target_accept_);
        Eigen::VectorXd centered = x - mean_;
        mean_ += gamma * centered;
        cov_ += gamma * ((x - mean_) * (x - mean_).transpose() - cov_);
    }
    return accept;
}

double AdaptiveMetropolis::accept_rate() const {
    return proposed_ > 0 ? double(accepted_) / double(proposed_) : 0.0;
}

bool AdaptiveMetropolis::degenerate() const {
    return scale0_ * std::exp(log_scale_) == 0.0;
}

Eigen::VectorXd x_from_theta(const Hyperparams& t) {
    Eigen::VectorXd x(5);
    x << std::log(t.nu0 - 2.0), std::log(t.s0), std::log(t.delta1),
        std::log(t.delta2), std::log(t.delta3);
    return x;
}

Hyperparams theta_from_x(const Eigen::VectorXd& x) {
    Hyperparams t;
    t.nu0 = 2.0 + std::exp(x[0]);
    t.s0 = std::exp(x[1]);
    t.delta1 = std::exp(x[2]);
    t.delta2 = std::exp(x[3]);
    t.delta3 = std::exp(x[4]);
    return t;
}

double theta_log_target(const Eigen::VectorXd& x, const CanonicalParams& canon,
                        const std::vector<int>& sizes,
                        const HyperpriorConfig& hyper) {
    const Hyperparams t = theta_from_x(x);
    double out = hyperprior_logdensity(t, hyper) + x[2] + x[3] + x[4];
    if (!std::isfinite(out)) return -std::numeric_limits<double>::infinity();

    const int k = static_cast<int>(sizes.size());
    out += inverse_wishart_logpdf(canon.A, t.nu0 + k + 1.0,
                                  t.nu0 * hierarchical_A0(t, sizes));
    for (int u = 0; u < k; ++u)
        out += inverse_gamma_logpdf(canon.lambda[u], 0.5 * (t.s0 + 2.0),
                                    0.5 * t.s0 * t.delta1);
    return out;
}

namespace {

struct Chain {
    SuffStats stats;
    MarginalEval eval;
    MfmPrior mfm;
    RandomStream rng;
    ChainConfig cfg;
    double cur_logml = 0.0;
    std::vector<double> logv_cache; // by k, lazily filled

    long gibbs_updates = 0, gibbs_moved = 0;
    long sams_proposed = 0, sams_accepted = 0;

    Chain(const Eigen::MatrixXd& Y, const ChainConfig& config)
        : stats(Y), eval(config.prior, static_cast<int>(Y.rows())),
          mfm(config.mfm), rng(config.seed), cfg(config) {}

    double log_v(int k) {
        if (static_cast<int>(logv_cache.size()) <= k)
            logv_cache.resize(k + 1, std::numeric_limits<double>::quiet_NaN());
        if (std::isnan(logv_cache[k])) logv_cache[k] = log_V(stats.p(), k, mfm);
        return logv_cache[k];
    }

    double eppf_current() {
        double out = log_v(stats.k());
        for (int u = 0; u < stats.k(); ++u)
            out += log_rising(mfm.rho, stats.size(u));
        return out;
    }

    void gibbs_scan() {
        const int p = stats.p();
        const double rho = mfm.rho;
        for (int i = 0; i < p; ++i) {
            const int old_label = stats.label(i);
            const bool was_singleton = stats.size(old_label) == 1;
            stats.remove(i);
            const int km = stats.k();
            Eigen::VectorXd logw(km + 1);
            std::vector<double> cand_logml(km + 1);
            for (int u = 0; u < km; ++u) {
                cand_logml[u] = eval(stats.view_add(i, u));
                logw[u] = std::log(stats.size(u) + rho) + cand_logml[u];
            }
            cand_logml[km] = eval(stats.view_add(i, km));
            logw[km] =
                std::log(rho) + log_v(km + 1) - log_v(km) + cand_logml[km];
            const int pick = rng.categorical_log(logw);
            stats.add(i, pick);
            cur_logml = cand_logml[pick];
            ++gibbs_updates;
            // old co-members keep their index unless i was a singleton, in
            // which case "unchanged" means opening a fresh singleton
            if (was_singleton ? (pick != km) : (pick != old_label))
                ++gibbs_moved;
        }
    }

    void sams_move() {
        const int p = stats.p();
        if (p < 2) return;
        ++sams_proposed;
        const int i = rng.uniform_int(p);
        int j = rng.uniform_int(p - 1);
        if (j >= i) ++j;

        if (stats.label(i) == stats.label(j)) sams_split(i, j);
        else sams_merge(i, j);
    }

    // members of i's block, excluding the seeds, in random order
    std::vector<int> split_order(int i, int j, const SuffStats& s) {
        std::vector<int> rest;
        for (int m = 0; m < s.p(); ++m)
            if (m != i && m != j && s.label(m) == s.label(i)) rest.push_back(m);
        rng.shuffle(rest);
        return rest;
    }

    // allocate `rest` onto the two seeded sub-blocks (a, b) of `s`; returns
    // the accumulated log proposal probability. When forced_of is non-null,
    // item m goes to (*forced_of)[m] instead of being sampled.
    double allocate(SuffStats& s, int a, int b, const std::vector<int>& rest,
                    const std::vector<int>* forced_of) {
        const double rho = mfm.rho;
        double log_q = 0.0;
        for (int m : rest) {
            double wa = std::log(s.size(a) + rho) + eval(s.view_add(m, a));
            double wb = std::log(s.size(b) + rho) + eval(s.view_add(m, b));
            double norm = std::max(wa, wb) +
                          std::log1p(std::exp(-std::abs(wa - wb)));
            int dest;
            if (forced_of) {
                dest = (*forced_of)[m];
            } else {
                Eigen::Vector2d lw(wa, wb);
                dest = (rng.categorical_log(lw) == 0) ? a : b;
            }
            log_q += ((dest == a) ? wa : wb) - norm;
            s.add(m, dest);
        }
        return log_q;
    }

    void sams_split(int i, int j) {
        const SuffStats backup = stats;
        const double rho = mfm.rho;
        const int k0 = stats.k();
        const int m_all = stats.size(stats.label(i));

        std::vector<int> rest = split_order(i, j, stats);
        std::vector<int> members = rest;
        members.push_back(i);
        members.push_back(j);
        for (int m : members) stats.remove(m);

        const int a = stats.k();
        stats.add(i, a);
        const int b = stats.k();
        stats.add(j, b);
        double log_q = allocate(stats, a, b, rest, nullptr);

        double logml_new = eval(stats.current_view());
        double d_eppf = log_v(k0 + 1) - log_v(k0) +
                        log_rising(rho, stats.size(a)) +
                        log_rising(rho, stats.size(b)) - log_rising(rho, m_all);
        double log_alpha = d_eppf + logml_new - cur_logml - log_q;
        if (std::log(rng.uniform()) < log_alpha) {
            cur_logml = logml_new;
            ++sams_accepted;
        } else {
            stats = backup;
        }
    }

    void sams_merge(int i, int j) {
        const double rho = mfm.rho;
        const int k0 = stats.k();
        const int a0 = stats.label(i), b0 = stats.label(j);
        const int ma = stats.size(a0), mb = stats.size(b0);

        double logml_new = eval(stats.view_merge(a0, b0));
        double d_eppf = log_v(k0 - 1) - log_v(k0) + log_rising(rho, ma + mb) -
                        log_rising(rho, ma) - log_rising(rho, mb);

        // reverse split probability: force the dry run to land every member
        // in its current sub-block, along a fresh uniform order
        std::vector<int> forced_of(stats.p(), -1);
        std::vector<int> rest;
        for (int m = 0; m < stats.p(); ++m) {
            if (m == i || m == j) continue;
            if (stats.label(m) == a0 || stats.label(m) == b0) rest.push_back(m);
        }
        rng.shuffle(rest);

        SuffStats dry = stats;
        std::vector<int> members = rest;
        members.push_back(i);
        members.push_back(j);
        for (int m : members) dry.remove(m);
        const int a = dry.k();
        dry.add(i, a);
        const int b = dry.k();
        dry.add(j, b);
        for (int m : rest)
            forced_of[m] = (stats.label(m) == a0) ? a : b;
        double log_q_rev = allocate(dry, a, b, rest, &forced_of);

        double log_alpha = d_eppf + logml_new - cur_logml + log_q_rev;
        if (std::log(rng.uniform()) < log_alpha) {
            stats.merge_blocks(a0, b0);
            cur_logml = logml_new;
            ++sams_accepted;
        }
    }

    void verify_integrity(int iteration) {
        stats.refresh();
        double fresh = eval(stats.current_view());
        if (std::abs(cur_logml - fresh) > 1e-8 * (1.0 + std::abs(fresh))) {
            std::ostringstream os;
            os << "incremental marginal drifted from recomputation at iteration "
               << iteration << ": cached " << cur_logml << " vs fresh " << fresh
               << " (k = " << stats.k() << ")";
            throw numeric_error(os.str());
        }
        cur_logml = fresh;
    }

    void check_finite(int iteration) {
        if (std::isfinite(cur_logml)) return;
        std::ostringstream os;
        os << "non-finite log marginal likelihood at iteration " << iteration
           << " (k = " << stats.k() << ", sizes:";
        for (int u = 0; u < stats.k(); ++u) os << ' ' << stats.size(u);
        os << ")";
        throw numeric_error(os.str());
    }
};

// The incremental stats keep blocks in internal (swap-delete) order while
// Partition canonicalizes to first-appearance order; block parameters must be
// permuted accordingly before they are paired with a canonical partition.
PosteriorParams reorder_to_canonical(const PosteriorParams& post,
                                     const SuffStats& stats) {
    const int k = stats.k();
    std::vector<int> internal_of;
    internal_of.reserve(k);
    std::vector<char> seen(k, 0);
    for (int i = 0; i < stats.p(); ++i) {
        const int u = stats.label(i);
        if (!seen[u]) {
            seen[u] = 1;
            internal_of.push_back(u);
        }
    }
    PosteriorParams out;
    out.nu_n = post.nu_n;
    out.A_n.resize(k, k);
    out.s_n.resize(k);
    out.lambda_n.resize(k);
    out.sizes.resize(k);
    for (int a = 0; a < k; ++a) {
        out.s_n[a] = post.s_n[internal_of[a]];
        out.lambda_n[a] = post.lambda_n[internal_of[a]];
        out.sizes[a] = post.sizes[internal_of[a]];
        for (int b = 0; b < k; ++b)
            out.A_n(a, b) = post.A_n(internal_of[a], internal_of[b]);
    }
    return out;
}

} // namespace

ChainOutput run_chain(const Eigen::MatrixXd& Y, const ChainConfig& config) {
    const int n = static_cast<int>(Y.rows());
    const int p = static_cast<int>(Y.cols());
    if (n < 1 || p < 1) throw data_error("run_chain needs a nonempty data matrix");
    if (config.burnin >= config.iterations)
        throw config_error("burnin must be smaller than iterations");
    if (config.thin < 1) throw config_error("thin must be >= 1");
    if (config.sams_repeats < 0) throw config_error("sams_repeats must be >= 0");
    if (!config.do_gibbs && (!config.do_sams || config.sams_repeats == 0))
        throw config_error("chain has no partition move enabled");

    ChainConfig cfg = config;
    {
        Eigen::MatrixXd gram = Y.transpose() * Y;
        cfg.prior.tau0 = median_variance(gram, n);
    }
    const bool hier = cfg.prior.regime == PriorRegime::Hierarchical;
    if (hier && cfg.theta_init_from_data) {
        cfg.prior.theta.nu0 = 3.0;
        cfg.prior.theta.s0 = 2.0;
        cfg.prior.theta.delta1 = 0.5 * cfg.prior.tau0;
        cfg.prior.theta.delta2 = 0.25 * cfg.prior.tau0;
        cfg.prior.theta.delta3 = 0.25 * cfg.prior.tau0;
    }
    const bool learn_theta = hier && cfg.learn_theta;

    Chain chain(Y, cfg);
    // single starting block
    chain.stats.assign_all(Partition::from_labels(std::vector<int>(p, 0)));
    chain.cur_logml = chain.eval(chain.stats.current_view());

    AdaptiveMetropolis am(5, cfg.am_target_accept, cfg.am_decay,
                          cfg.am_init_scale);
    Eigen::VectorXd x = x_from_theta(cfg.prior.theta);
    long theta_proposed = 0, theta_accepted = 0;

    ChainOutput out;
    out.config = cfg;
    out.sigma_mean = Eigen::MatrixXd::Zero(p, p);
    Eigen::MatrixXd psm_counts = Eigen::MatrixXd::Zero(p, p);
    long retained = 0;

    for (int t = 1; t <= cfg.iterations; ++t) {
        if (cfg.do_gibbs) chain.gibbs_scan();
        if (cfg.do_sams)
            for (int r = 0; r < cfg.sams_repeats; ++r) chain.sams_move();

        if (learn_theta) {
            if (t == cfg.burnin + 1) am.freeze();
            StatsView view = chain.stats.current_view();
            PosteriorParams post =
                posterior_params(prior_params(chain.eval.spec(), view), view);
            CanonicalParams canon = sample_A_lambda(post, chain.rng);
            const std::vector<int> sizes = view.sizes;
            auto target = [&](const Eigen::VectorXd& xv) {
                return theta_log_target(xv, canon, sizes, cfg.prior.hyper);
            };
            double lt = target(x);
            ++theta_proposed;
            if (am.step(x, lt, target, chain.rng)) {
                ++theta_accepted;
                chain.eval.set_theta(theta_from_x(x));
                chain.cur_logml = chain.eval(chain.stats.current_view());
            }
        }

        chain.check_finite(t);
        if (t % 100 == 0) chain.verify_integrity(t);

        out.k_trace.push_back(chain.stats.k());
        if (hier) out.theta_trace.push_back(theta_from_x(x));

        if (t > cfg.burnin && (t - cfg.burnin) % cfg.thin == 0) {
            Partition part = chain.stats.partition();
            out.partition_trace.push_back(part);
            out.log_marg_trace.push_back(chain.cur_logml);
            StatsView view = chain.stats.current_view();
            PosteriorParams post =
                posterior_params(prior_params(chain.eval.spec(), view), view);
            out.sigma_mean += posterior_mean_sigma(
                reorder_to_canonical(post, chain.stats), part);
            for (int a = 0; a < p; ++a)
                for (int b = a + 1; b < p; ++b)
                    if (part.label(a) == part.label(b)) {
                        psm_counts(a, b) += 1.0;
                        psm_counts(b, a) += 1.0;
                    }
            ++retained;
        }
    }

    if (retained == 0) throw config_error("no iterations retained");
    out.sigma_mean /= double(retained);
    out.psm = psm_counts / double(retained);
    out.psm.diagonal().setOnes();
    out.final_log_marg = chain.cur_logml;
    out.gibbs_move_rate = chain.gibbs_updates > 0
                              ? double(chain.gibbs_moved) / chain.gibbs_updates
                              : 0.0;
    out.sams_accept_rate = chain.sams_proposed > 0
                               ? double(chain.sams_accepted) / chain.sams_proposed
                               : 0.0;
    out.theta_accept_rate =
        theta_proposed > 0 ? double(theta_accepted) / theta_proposed : 0.0;
    out.am_degenerate = learn_theta && am.degenerate();
    return out;
}

EstimateResult estimate(const ChainOutput& output) {
    if (output.partition_trace.empty())
        throw config_error("estimate requires a nonempty retained trace");
    EstimateResult res;
    res.sigma_hat = output.sigma_mean;
    res.psm = output.psm;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < output.partition_trace.size(); ++t) {
        double score = eppf_log(output.partition_trace[t], output.config.mfm) +
                       output.log_marg_trace[t];
        if (score > best) {
            best = score;
            res.map_partition = output.partition_trace[t];
        }
    }
    res.map_score = best;
    return res;
}

} // namespace bcov
