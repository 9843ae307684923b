#pragma once

#include <functional>
#include <vector>

#include "ple/distributions.hpp"

namespace ple {

/// Discretized density on a uniform grid over [lo, hi].
struct DensityGrid {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> values;

    std::size_t count() const { return values.size(); }
    double step() const { return (hi - lo) / static_cast<double>(values.size() - 1); }
    double node(std::size_t i) const { return lo + step() * static_cast<double>(i); }

    /// Linear interpolation; zero outside [lo, hi].
    double interpolate(double x) const;

    double integral() const;       // trapezoid
    void normalize();              // scale so integral() == 1
    double mean() const;           // trapezoid of x f(x)
    double variance() const;
    std::vector<double> cdf() const;  // cumulative trapezoid, one entry per node
};

/// Tabulates a family pdf on [lo, hi] and normalizes.
DensityGrid grid_from_family(const ParamVector& params, double lo, double hi, std::size_t count);

/// Strictly monotone per-point estimate map and its inverse.
struct LocalEstimateMap {
    std::function<double(double)> h;
    std::function<double(double)> h_inverse;

    static LocalEstimateMap identity();
    static LocalEstimateMap linear(double slope, double intercept = 0.0);
};

/// Change of variables: density of h(x) for x ~ f, with the Jacobian
/// |d h^-1 / db| taken by finite differences. Throws invalid_map_error when h
/// is not strictly monotone on the grid or h_inverse fails to invert h within
/// 1e-9.
DensityGrid pushforward(const DensityGrid& f, const LocalEstimateMap& map);

/// Density of the sum of n i.i.d. draws from f, by repeated direct
/// convolution with trapezoid end weights; renormalized after every step.
/// Throws resolution_error when the grid has fewer than 65 nodes.
DensityGrid self_convolve(const DensityGrid& f, std::size_t n);

/// Density of H(X) = (1/n) sum h(x_i): pushforward by h, n-fold
/// self-convolution, then the mean rescaling b -> n b (values scaled by n so
/// mass is conserved).
DensityGrid estimator_density(const DensityGrid& f_x, const LocalEstimateMap& map, std::size_t n);

}  // namespace ple
