#include "ple/density.hpp"

#include <algorithm>
#include <cmath>

#include "ple/errors.hpp"
#include "ple/parallel.hpp"

namespace ple {

double DensityGrid::interpolate(double x) const {
    if (x < lo || x > hi) return 0.0;
    double pos = (x - lo) / step();
    std::size_t i = static_cast<std::size_t>(pos);
    if (i >= count() - 1) return values.back();
    double frac = pos - static_cast<double>(i);
    return values[i] * (1.0 - frac) + values[i + 1] * frac;
}

double DensityGrid::integral() const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < count(); ++i) s += 0.5 * (values[i] + values[i + 1]);
    return s * step();
}

void DensityGrid::normalize() {
    double z = integral();
    if (!(z > 0.0)) throw divergence_error("density grid has nonpositive mass");
    for (double& v : values) v /= z;
}

double DensityGrid::mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < count(); ++i)
        s += 0.5 * (node(i) * values[i] + node(i + 1) * values[i + 1]);
    return s * step();
}

double DensityGrid::variance() const {
    double m = mean();
    double s = 0.0;
    auto term = [&](std::size_t i) {
        double d = node(i) - m;
        return d * d * values[i];
    };
    for (std::size_t i = 0; i + 1 < count(); ++i) s += 0.5 * (term(i) + term(i + 1));
    return s * step();
}

std::vector<double> DensityGrid::cdf() const {
    std::vector<double> out(count(), 0.0);
    for (std::size_t i = 1; i < count(); ++i)
        out[i] = out[i - 1] + 0.5 * (values[i - 1] + values[i]) * step();
    return out;
}

DensityGrid grid_from_family(const ParamVector& params, double lo, double hi, std::size_t count) {
    if (!(hi > lo) || count < 2) throw config_error("bad grid bounds");
    DensityGrid g;
    g.lo = lo;
    g.hi = hi;
    g.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) g.values[i] = pdf(params, g.node(i));
    g.normalize();
    return g;
}

LocalEstimateMap LocalEstimateMap::identity() {
    return {[](double x) { return x; }, [](double b) { return b; }};
}

LocalEstimateMap LocalEstimateMap::linear(double slope, double intercept) {
    if (slope == 0.0) throw invalid_map_error("linear map needs a nonzero slope");
    return {[slope, intercept](double x) { return slope * x + intercept; },
            [slope, intercept](double b) { return (b - intercept) / slope; }};
}

DensityGrid pushforward(const DensityGrid& f, const LocalEstimateMap& map) {
    const std::size_t count = f.count();
    // Strict monotonicity probe on the input nodes.
    double prev = map.h(f.node(0));
    bool increasing = map.h(f.node(count - 1)) > prev;
    for (std::size_t i = 1; i < count; ++i) {
        double cur = map.h(f.node(i));
        if ((increasing && cur <= prev) || (!increasing && cur >= prev))
            throw invalid_map_error("estimate map is not strictly monotone on the grid");
        prev = cur;
    }

    DensityGrid out;
    double b0 = map.h(f.lo);
    double b1 = map.h(f.hi);
    out.lo = std::min(b0, b1);
    out.hi = std::max(b0, b1);
    out.values.resize(count);
    const double bstep = (out.hi - out.lo) / static_cast<double>(count - 1);

    for (std::size_t i = 0; i < count; ++i) {
        double b = out.lo + bstep * static_cast<double>(i);
        double x = map.h_inverse(b);
        if (std::fabs(map.h(x) - b) > 1e-9 * std::max(1.0, std::fabs(b)))
            throw invalid_map_error("h_inverse does not invert h within 1e-9");
        // |d h^-1/db| by central differences, one-sided at the edges.
        double delta = std::max(1e-7, 1e-7 * std::fabs(b));
        double blo = std::max(out.lo, b - delta);
        double bhi = std::min(out.hi, b + delta);
        double deriv = (map.h_inverse(bhi) - map.h_inverse(blo)) / (bhi - blo);
        out.values[i] = f.interpolate(x) * std::fabs(deriv);
    }
    out.normalize();
    return out;
}

namespace {

/// One convolution step with trapezoid weights on the valid overlap range.
DensityGrid convolve(const DensityGrid& a, const DensityGrid& b) {
    const double step = a.step();
    DensityGrid out;
    out.lo = a.lo + b.lo;
    out.hi = a.hi + b.hi;
    out.values.assign(a.count() + b.count() - 1, 0.0);
    const std::ptrdiff_t na = static_cast<std::ptrdiff_t>(a.count());
    const std::ptrdiff_t nb = static_cast<std::ptrdiff_t>(b.count());
    par::for_index(out.values.size(), [&](std::size_t kz) {
        const std::ptrdiff_t k = static_cast<std::ptrdiff_t>(kz);
        const std::ptrdiff_t ilo = std::max<std::ptrdiff_t>(0, k - (nb - 1));
        const std::ptrdiff_t ihi = std::min<std::ptrdiff_t>(na - 1, k);
        double s = 0.0;
        for (std::ptrdiff_t i = ilo; i <= ihi; ++i) {
            double w = (i == ilo || i == ihi) ? 0.5 : 1.0;
            s += w * a.values[i] * b.values[k - i];
        }
        out.values[kz] = s * step;
    });
    return out;
}

}  // namespace

DensityGrid self_convolve(const DensityGrid& f, std::size_t n) {
    if (n < 1) throw config_error("self convolution needs n >= 1");
    if (f.count() < 65)
        throw resolution_error("grid too coarse: need step <= (hi - lo) / 64");
    DensityGrid base = f;
    base.normalize();
    DensityGrid acc = base;
    for (std::size_t i = 1; i < n; ++i) {
        acc = convolve(acc, base);
        acc.normalize();
    }
    return acc;
}

DensityGrid estimator_density(const DensityGrid& f_x, const LocalEstimateMap& map, std::size_t n) {
    DensityGrid pushed = pushforward(f_x, map);
    DensityGrid sum = self_convolve(pushed, n);
    // Density of the mean: f_mean(b) = n * f_sum(n b). The factor n keeps the
    // mass at 1; the argument scaling alone would not.
    DensityGrid out;
    double dn = static_cast<double>(n);
    out.lo = sum.lo / dn;
    out.hi = sum.hi / dn;
    out.values = sum.values;
    for (double& v : out.values) v *= dn;
    out.normalize();
    return out;
}

}  // namespace ple
