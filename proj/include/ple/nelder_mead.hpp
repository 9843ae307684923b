#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace ple {

struct NelderMeadResult {
    std::vector<double> x;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    double tolerance = 1e-6;  // simplex diameter
    int max_iterations = 5000;
    double initial_step = 0.05;
};

/// Downhill simplex minimizer (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5). Works in any dimension >= 1; the solver uses it on the
/// one-coefficient estimator classes.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                                    std::vector<double> start, const NelderMeadOptions& opt = {}) {
    const std::size_t dim = start.size();
    const std::size_t m = dim + 1;
    std::vector<std::vector<double>> x(m, start);
    for (std::size_t j = 1; j < m; ++j) {
        double step = opt.initial_step * std::max(1.0, std::fabs(start[j - 1]));
        x[j][j - 1] += step;
    }
    std::vector<double> fx(m);
    for (std::size_t j = 0; j < m; ++j) fx[j] = f(x[j]);

    auto order = [&]() {
        std::vector<std::size_t> idx(m);
        for (std::size_t i = 0; i < m; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        std::vector<std::vector<double>> x2(m);
        std::vector<double> f2(m);
        for (std::size_t i = 0; i < m; ++i) {
            x2[i] = x[idx[i]];
            f2[i] = fx[idx[i]];
        }
        x.swap(x2);
        fx.swap(f2);
    };

    auto diameter = [&]() {
        double d = 0.0;
        for (std::size_t j = 1; j < m; ++j)
            for (std::size_t i = 0; i < dim; ++i) d = std::max(d, std::fabs(x[j][i] - x[0][i]));
        return d;
    };

    NelderMeadResult res;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        order();
        if (diameter() <= opt.tolerance) {
            res.converged = true;
            break;
        }
        std::vector<double> centroid(dim, 0.0);
        for (std::size_t j = 0; j < dim; ++j)
            for (std::size_t i = 0; i < dim; ++i) centroid[i] += x[j][i] / static_cast<double>(dim);

        auto blend = [&](const std::vector<double>& from, double coef) {
            std::vector<double> p(dim);
            for (std::size_t i = 0; i < dim; ++i) p[i] = centroid[i] + coef * (from[i] - centroid[i]);
            return p;
        };

        std::vector<double> xr = blend(x[dim], -1.0);
        double fr = f(xr);
        if (fr < fx[0]) {
            std::vector<double> xe = blend(x[dim], -2.0);
            double fe = f(xe);
            if (fe < fr) {
                x[dim] = xe;
                fx[dim] = fe;
            } else {
                x[dim] = xr;
                fx[dim] = fr;
            }
        } else if (fr < fx[dim - 1]) {
            x[dim] = xr;
            fx[dim] = fr;
        } else {
            bool outside = fr < fx[dim];
            std::vector<double> xc = blend(x[dim], outside ? -0.5 : 0.5);
            double fc = f(xc);
            if (fc < std::min(fr, fx[dim])) {
                x[dim] = xc;
                fx[dim] = fc;
            } else {
                for (std::size_t j = 1; j < m; ++j) {
                    for (std::size_t i = 0; i < dim; ++i) x[j][i] = x[0][i] + 0.5 * (x[j][i] - x[0][i]);
                    fx[j] = f(x[j]);
                }
            }
        }
    }
    order();
    res.x = x[0];
    res.fx = fx[0];
    res.iterations = it;
    return res;
}

}  // namespace ple
