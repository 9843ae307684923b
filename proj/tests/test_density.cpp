#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "ple/density.hpp"

using namespace ple;

namespace {

DensityGrid unit_uniform(std::size_t nodes = 1025) {
    return grid_from_family(ParamVector{FamilyTag::one_sided_uniform, {1.0}}, 0.0, 1.0, nodes);
}

DensityGrid standard_normal(std::size_t nodes = 2049, double span = 8.0) {
    return grid_from_family(ParamVector{FamilyTag::gaussian, {0.0, 1.0}}, -span, span, nodes);
}

}  // namespace

TEST_CASE("pushforward closed cases") {
    SUBCASE("doubling the uniform halves the height") {
        DensityGrid g = pushforward(unit_uniform(), LocalEstimateMap::linear(2.0));
        CHECK(g.lo == doctest::Approx(0.0));
        CHECK(g.hi == doctest::Approx(2.0));
        CHECK(g.values[g.count() / 2] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(std::fabs(g.integral() - 1.0) < 1e-9);
    }
    SUBCASE("identity is a no-op") {
        DensityGrid f = unit_uniform();
        DensityGrid g = pushforward(f, LocalEstimateMap::identity());
        for (std::size_t i = 0; i < f.count(); ++i)
            CHECK(g.values[i] == doctest::Approx(f.values[i]).epsilon(1e-12));
    }
    SUBCASE("shifting a normal moves its grid") {
        DensityGrid g = pushforward(standard_normal(), LocalEstimateMap::linear(1.0, 3.0));
        double worst = 0.0;
        for (std::size_t i = 0; i < g.count(); ++i)
            worst = std::max(worst, std::fabs(g.values[i] - oracle::gauss_pdf(g.node(i), 3.0, 1.0)));
        CHECK(worst < 1e-6);
    }
    SUBCASE("non-monotone maps are rejected") {
        LocalEstimateMap square{[](double x) { return x * x; }, [](double b) { return std::sqrt(b); }};
        CHECK_THROWS_AS(pushforward(standard_normal(), square), invalid_map_error);
    }
}

TEST_CASE("self convolution closed cases") {
    SUBCASE("n = 1 returns the density unchanged") {
        DensityGrid f = unit_uniform();
        DensityGrid g = self_convolve(f, 1);
        for (std::size_t i = 0; i < f.count(); ++i)
            CHECK(g.values[i] == doctest::Approx(f.values[i]).epsilon(1e-12));
    }
    SUBCASE("two uniforms make the triangle") {
        DensityGrid g = self_convolve(unit_uniform(), 2);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.count(); ++i)
            worst = std::max(worst, std::fabs(g.values[i] - oracle::irwin_hall_pdf(g.node(i), 2)));
        CHECK(worst < 1e-3);
        CHECK(g.interpolate(1.0) == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("four standard normals make N(0, 4)") {
        DensityGrid g = self_convolve(standard_normal(), 4);
        double worst = 0.0;
        for (std::size_t i = 0; i < g.count(); ++i)
            worst = std::max(worst, std::fabs(g.values[i] - oracle::gauss_pdf(g.node(i), 0.0, 4.0)));
        CHECK(worst < 1e-4);
    }
    SUBCASE("coarse grids are rejected") {
        DensityGrid coarse = grid_from_family(ParamVector{FamilyTag::one_sided_uniform, {1.0}},
                                              0.0, 1.0, 33);
        CHECK_THROWS_AS(self_convolve(coarse, 2), resolution_error);
    }
}

TEST_CASE("estimator density of twice the mean") {
    SUBCASE("n = 1 with identity returns the input") {
        DensityGrid f = unit_uniform();
        DensityGrid g = estimator_density(f, LocalEstimateMap::identity(), 1);
        for (std::size_t i = 0; i < f.count(); ++i)
            CHECK(g.values[i] == doctest::Approx(f.values[i]).epsilon(1e-12));
    }
    SUBCASE("mean of the estimator density is the true parameter") {
        DensityGrid g = estimator_density(unit_uniform(), LocalEstimateMap::linear(2.0), 20);
        CHECK(std::fabs(g.mean() - 1.0) < 0.005);
    }
    SUBCASE("L1 distance to a brute-force histogram, n = 5") {
        DensityGrid g = estimator_density(unit_uniform(), LocalEstimateMap::linear(2.0), 5);
        oracle::XorShift oracle_rng(777);
        auto draw = [&]() {
            double s = 0.0;
            for (int i = 0; i < 5; ++i) s += oracle_rng.unit();
            return 2.0 * s / 5.0;
        };
        oracle::Histogram h = oracle::mc_histogram(draw, 1000000, g.lo, g.hi, 100);
        double l1 = oracle::histogram_l1(h, [&](double x) { return g.interpolate(x); });
        CHECK(l1 < 0.02);
    }
}

TEST_CASE("mass, mean and variance bookkeeping") {
    DensityGrid f = unit_uniform();
    LocalEstimateMap twice = LocalEstimateMap::linear(2.0);
    // E[h(x)] = 1, Var[h(x)] = 4/12
    for (std::size_t n : {2ul, 8ul, 32ul}) {
        DensityGrid g = estimator_density(f, twice, n);
        CHECK(std::fabs(g.integral() - 1.0) < 1e-6);
        CHECK(std::fabs(g.mean() - 1.0) < 2.0 * g.step());
        double expected_var = (4.0 / 12.0) / static_cast<double>(n);
        CHECK(std::fabs(g.variance() - expected_var) < 0.05 * expected_var);
    }
}

TEST_CASE("central limit shape at n = 32") {
    DensityGrid g = estimator_density(unit_uniform(), LocalEstimateMap::identity(), 32);
    double mu = g.mean();
    double var = g.variance();
    std::vector<double> cdf = g.cdf();
    double worst = 0.0;
    for (std::size_t i = 0; i < g.count(); ++i)
        worst = std::max(worst, std::fabs(cdf[i] - oracle::gauss_cdf(g.node(i), mu, var)));
    CHECK(worst < 0.01);
}
