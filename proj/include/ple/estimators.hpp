#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ple/distributions.hpp"
#include "ple/rng.hpp"

namespace ple {

/// Deterministic map from a dataset to a parameter vector. Every registered
/// estimator is exactly permutation invariant (reductions run over sorted
/// copies of their addends).
struct EstimatorFn {
    std::string name;
    FamilyTag family;
    std::function<ParamVector(const Dataset&)> apply;
};

/// Registered names: uniform -> mle | ple-linear | ple-max,
/// gaussian -> mle | ple. Unknown names throw config_error.
const EstimatorFn& find_estimator(FamilyTag family, const std::string& name);
std::vector<std::string> estimator_names(FamilyTag family);

ParamVector mle_uniform(const Dataset& data);
ParamVector ple_uniform_linear(const Dataset& data);
ParamVector ple_uniform_max(const Dataset& data);
ParamVector mle_gaussian(const Dataset& data);
ParamVector ple_gaussian(const Dataset& data);

/// Closed-form bias per parameter at the given truth, when one exists.
std::optional<std::vector<double>> analytic_bias(const std::string& estimator_name,
                                                 const ParamVector& truth, std::size_t n);

struct BiasReport {
    std::string estimator;
    ParamVector truth;
    std::optional<std::vector<double>> analytic;
    std::vector<double> mc_bias;
    std::vector<double> mc_stderr;
    std::size_t trials = 0;
};

/// Monte-Carlo bias estimate over independent trials; trial t draws its data
/// from rng.substream(t).substream(0). Trials run in parallel, reductions are
/// done in trial order afterwards.
BiasReport monte_carlo_bias(const EstimatorFn& estimator, const ParamVector& truth, std::size_t n,
                            std::size_t trials, const SeededRng& rng);

}  // namespace ple
