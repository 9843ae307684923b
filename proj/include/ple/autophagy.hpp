#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ple/distributions.hpp"
#include "ple/estimators.hpp"
#include "ple/rng.hpp"

namespace ple {

struct LoopConfig {
    FamilyTag family;
    ParamVector truth;
    std::size_t n = 20;           // points per generation
    std::size_t generations = 10; // synthetic refits after the ground-truth anchor
    std::size_t trials = 100;
    std::string estimator = "mle";
};

/// Per-trial, per-generation parameter estimates for a self-consuming loop.
/// Row 0 is the ground-truth parameter anchor (identical across trials);
/// row g >= 1 is the estimate refit on data sampled from row g-1. Trial t,
/// generation g draws from rng.substream(t).substream(g-1), which makes
/// generation 1 reproduce monte_carlo_bias trial t exactly.
struct GenerationTrace {
    LoopConfig config;
    // estimates[trial][generation][parameter], generation in [0, G]
    std::vector<std::vector<std::vector<double>>> estimates;
    std::vector<bool> degenerate;  // per trial: chain left the family domain

    std::size_t generations() const { return config.generations; }
    std::size_t trials() const { return config.trials; }

    /// Cross-trial mean and standard error of one parameter at each
    /// generation, after applying `transform` to the per-trial values
    /// (identity by default; sqrt turns a variance chain into a std chain).
    struct Summary {
        std::vector<double> mean;
        std::vector<double> stderr_;
    };
    Summary summarize(std::size_t param,
                      const std::function<double(double)>& transform = nullptr) const;
};

GenerationTrace run_loop(const LoopConfig& cfg, const SeededRng& rng);

/// Least-squares slope of ln(cross-trial mean) against the generation index.
/// Throws divergence_error when any generation mean is not positive.
double collapse_rate(const GenerationTrace& trace, std::size_t param = 0);

}  // namespace ple
