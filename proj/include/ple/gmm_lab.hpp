#pragma once

#include <string>
#include <vector>

#include "ple/distributions.hpp"
#include "ple/hypernet.hpp"
#include "ple/rng.hpp"

namespace ple {

struct EmConfig {
    double tolerance = 1e-12;  // absolute change of the total log-likelihood
    std::size_t max_iterations = 100000;
    int restarts = 5;  // random initializations, best final likelihood kept
    double variance_floor = 1e-6;
};

struct EmResult {
    ParamVector params{FamilyTag::gmm2, {}};
    double log_likelihood = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    bool variance_floored = false;
    /// Log-likelihood after every accepted iteration of the winning restart;
    /// non-decreasing up to accumulation noise.
    std::vector<double> likelihood_path;
};

/// Two-component 1-D EM. Restart r initializes means at two distinct random
/// data points (rng.substream(r)), variances at the data variance and weights
/// at one half. Collapsing variances are floored, not fatal.
EmResult em_fit(const Dataset& data, const EmConfig& cfg, const SeededRng& rng);

struct KlEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
};

/// Monte-Carlo KL(q || p) = E_{x~q}[ln q(x) - ln p(x)]. Sampling is an
/// inverse-CDF transform of the rng stream, so two calls with the same rng
/// share their underlying draws (paired comparisons).
KlEstimate kl_divergence(const ParamVector& q, const ParamVector& p, std::size_t samples,
                         const SeededRng& rng);

struct FairnessReport {
    double s_maj = 0.0;
    double s_min = 0.0;
    double r_fair = 0.0;
};

/// Per-class representation scores: estimated components are matched to the
/// true ones by nearest mean (ties by weight order); score = 1 / closed-form
/// Gaussian KL(estimated || true), capped at 1e6; majority = larger true
/// weight. r_fair = s_maj / s_min.
FairnessReport fairness_report(const ParamVector& fit, const ParamVector& truth);

/// Closed-form KL between two Gaussians, used by the fairness score.
double gaussian_kl(double mu_q, double var_q, double mu_p, double var_p);

struct SolverPleConfig {
    EmConfig em;                     // base fit configuration
    std::size_t replications = 32;   // synthetic refits per round
    int rounds = 2;                  // fixed-point updates of the constraint solve
    std::size_t refit_max_iterations = 500;
    double weight_clamp = 1e-4;
    double variance_clamp = 1e-6;
    double step_cap = 0.75;          // per-coordinate workspace trust region
    double likelihood_slack = 3.0;   // largest log-likelihood drop a correction may cost
};

/// Constraint-solving PLE for gmm2: starting from the EM fit t0, iterate
/// t <- t + t0 - med_j EM(Y_j(t)) in working coordinates (means linear,
/// variances in log, weight in logit) with a fixed bank of unit draws and
/// warm-started refits, which drives the re-estimate distribution at the
/// reported parameters onto the observed EM statistic. One round is the
/// parametric bootstrap bias correction; later rounds polish the fixed point.
/// Corrections are trust-capped per coordinate and backtracked so they never
/// cost more than likelihood_slack nats of data likelihood: the estimator
/// maximizes likelihood subject to the constraint, so a correction that
/// craters the likelihood is off the candidate set.
ParamVector ple_gmm_solver(const Dataset& data, const SolverPleConfig& cfg, const SeededRng& rng);

struct HypernetFitConfig {
    int hidden = 8;
    TrainConfig train;                // lambda 0.1, Adam defaults
    std::size_t batch = 200;          // minibatch cap for large datasets
};

/// Per-dataset hypernet PLE: trains a fresh set encoder on (minibatches of)
/// the observed dataset and reads the fit off the full dataset.
ParamVector ple_gmm_hypernet(const Dataset& data, const HypernetFitConfig& cfg,
                             const SeededRng& rng);

enum class PleMethod { solver, hypernet };
PleMethod parse_ple_method(std::string_view name);
std::string_view ple_method_name(PleMethod m);

struct GridSpec {
    std::vector<double> weights{0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
    std::vector<std::size_t> sizes{20, 50, 100, 500, 2000};
    std::size_t seeds_per_cell = 100;
    std::size_t kl_samples = 100000;
    double mu1 = 0.0, mu2 = 2.0, var1 = 1.0, var2 = 1.0;
    EmConfig em;
    SolverPleConfig solver;
    HypernetFitConfig hypernet;
};

struct GridCell {
    double weight = 0.0;
    std::size_t n = 0;
    double kl_mle_mean = 0.0;
    double kl_ple_mean = 0.0;
    double d_mean = 0.0;    // mean of per-seed KL_MLE - KL_PLE
    double d_stderr = 0.0;  // paired standard error
    double rfair_mle = 0.0;
    double rfair_ple = 0.0;
    std::size_t failures = 0;
};

struct GridResult {
    GridSpec spec;
    PleMethod method = PleMethod::solver;
    std::vector<GridCell> cells;
};

/// Full imbalance-by-size benchmark. Cell seeds run in parallel; every seed
/// owns a substream and the two KL estimates of a seed share one stream.
GridResult run_grid(const GridSpec& spec, PleMethod method, const SeededRng& rng);

}  // namespace ple
