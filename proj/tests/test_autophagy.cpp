#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ple/autophagy.hpp"

using namespace ple;

namespace {
SeededRng rng(std::uint64_t seed) { return SeededRng{seed, 0}; }

LoopConfig uniform_loop(const std::string& estimator, std::size_t trials = 100) {
    LoopConfig cfg;
    cfg.family = FamilyTag::one_sided_uniform;
    cfg.truth = ParamVector{FamilyTag::one_sided_uniform, {1.0}};
    cfg.n = 20;
    cfg.generations = 10;
    cfg.trials = trials;
    cfg.estimator = estimator;
    return cfg;
}
}

TEST_CASE("mle loop collapses along the tower-property curve") {
    GenerationTrace trace = run_loop(uniform_loop("mle"), rng(1));
    GenerationTrace::Summary s = trace.summarize(0);
    REQUIRE(s.mean.size() == 11);
    CHECK(s.mean[0] == 1.0);  // generation 0 anchors the ground truth
    for (std::size_t g = 1; g <= 10; ++g) {
        double expected = std::pow(20.0 / 21.0, static_cast<double>(g));
        CHECK(std::fabs(s.mean[g] - expected) < 4.0 * s.stderr_[g]);
    }
    CHECK(std::fabs(std::pow(20.0 / 21.0, 10.0) - 0.6139) < 5e-4);  // curve value the fit chases
}

TEST_CASE("ple loops hold the ground truth") {
    for (const char* name : {"ple-linear", "ple-max"}) {
        GenerationTrace trace = run_loop(uniform_loop(name), rng(2));
        GenerationTrace::Summary s = trace.summarize(0);
        for (std::size_t g = 1; g <= 10; ++g)
            CHECK(std::fabs(s.mean[g] - 1.0) < 4.0 * s.stderr_[g]);
    }
}

TEST_CASE("gaussian ple variance chain is a martingale") {
    LoopConfig cfg;
    cfg.family = FamilyTag::gaussian;
    cfg.truth = ParamVector{FamilyTag::gaussian, {0.0, 1.0}};
    cfg.n = 10;
    cfg.generations = 10;
    cfg.trials = 1000;
    cfg.estimator = "ple";
    GenerationTrace trace = run_loop(cfg, rng(3));
    GenerationTrace::Summary s = trace.summarize(1);
    for (std::size_t g = 1; g <= 10; ++g)
        CHECK(std::fabs(s.mean[g] - 1.0) < 4.0 * s.stderr_[g]);
}

TEST_CASE("collapse rates") {
    SUBCASE("mle slope matches ln(20/21)") {
        GenerationTrace trace = run_loop(uniform_loop("mle"), rng(4));
        CHECK(std::fabs(collapse_rate(trace) - std::log(20.0 / 21.0)) < 0.01);
    }
    SUBCASE("ple slope is flat") {
        GenerationTrace trace = run_loop(uniform_loop("ple-max"), rng(5));
        CHECK(std::fabs(collapse_rate(trace)) < 0.005);
    }
    SUBCASE("constant chain has slope zero") {
        GenerationTrace trace;
        trace.config = uniform_loop("mle", 3);
        trace.config.generations = 4;
        trace.estimates.assign(3, std::vector<std::vector<double>>(5, {1.0}));
        trace.degenerate.assign(3, false);
        CHECK(collapse_rate(trace) == doctest::Approx(0.0));
    }
    SUBCASE("nonpositive mean is rejected") {
        GenerationTrace trace;
        trace.config = uniform_loop("mle", 2);
        trace.config.generations = 2;
        trace.estimates.assign(2, std::vector<std::vector<double>>(3, {0.0}));
        trace.degenerate.assign(2, false);
        CHECK_THROWS_AS(collapse_rate(trace), divergence_error);
    }
}

TEST_CASE("estimator and family must match") {
    LoopConfig cfg = uniform_loop("mle");
    cfg.estimator = "ple";  // gaussian-only name
    CHECK_THROWS_AS(run_loop(cfg, rng(6)), config_error);
}

TEST_CASE("mle uniform chains never increase within a trial") {
    GenerationTrace trace = run_loop(uniform_loop("mle"), rng(7));
    for (std::size_t t = 0; t < trace.trials(); ++t)
        for (std::size_t g = 1; g <= trace.generations(); ++g)
            CHECK(trace.estimates[t][g][0] <= trace.estimates[t][g - 1][0]);
}

TEST_CASE("generation one reproduces monte_carlo_bias draws bit for bit") {
    LoopConfig cfg = uniform_loop("mle", 50);
    SeededRng shared = rng(8);
    GenerationTrace trace = run_loop(cfg, shared);
    BiasReport report = monte_carlo_bias(find_estimator(cfg.family, cfg.estimator), cfg.truth,
                                         cfg.n, cfg.trials, shared);
    double mean_gen1 = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) mean_gen1 += trace.estimates[t][1][0];
    mean_gen1 /= static_cast<double>(cfg.trials);
    CHECK(mean_gen1 - cfg.truth.values[0] == doctest::Approx(report.mc_bias[0]).epsilon(1e-15));

    // Trial-level check: re-draw trial 3's generation-1 dataset directly.
    Dataset direct = sample(cfg.truth, cfg.n, shared.substream(3).substream(0));
    CHECK(mle_uniform(direct).values[0] == trace.estimates[3][1][0]);
}

TEST_CASE("traces are reproducible") {
    GenerationTrace a = run_loop(uniform_loop("mle", 20), rng(9));
    GenerationTrace b = run_loop(uniform_loop("mle", 20), rng(9));
    CHECK(a.estimates == b.estimates);
}
