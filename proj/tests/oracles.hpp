// Independent oracles used by the test suites. Everything here is computed
// from first principles (closed forms, quadrature, brute-force sampling) and
// deliberately avoids the library code paths it is used to check.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

inline double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

/// Density of the sum of n i.i.d. U[0,1] draws.
inline double irwin_hall_pdf(double x, int n) {
    if (x < 0.0 || x > n) return 0.0;
    double fact = 1.0;
    for (int i = 2; i <= n - 1; ++i) fact *= i;
    double s = 0.0;
    for (int k = 0; k <= static_cast<int>(x); ++k) {
        double term = binomial(n, k) * std::pow(x - k, n - 1);
        s += (k % 2 == 0 ? term : -term);
    }
    return s / fact;
}

inline double gauss_pdf(double x, double mu, double var) {
    double d = x - mu;
    return std::exp(-d * d / (2.0 * var)) / std::sqrt(2.0 * kPi * var);
}

inline double gauss_cdf(double x, double mu, double var) {
    return 0.5 * std::erfc(-(x - mu) / std::sqrt(2.0 * var));
}

/// KL(N(mu_q, var_q) || N(mu_p, var_p)).
inline double gauss_kl(double mu_q, double var_q, double mu_p, double var_p) {
    double d = mu_q - mu_p;
    return 0.5 * (var_q / var_p + d * d / var_p - 1.0 + std::log(var_p / var_q));
}

/// Central finite difference of f at x along coordinate i.
inline double central_difference(const std::function<double()>& f, double& x, double step) {
    double saved = x;
    x = saved + step;
    double fp = f();
    x = saved - step;
    double fm = f();
    x = saved;
    return (fp - fm) / (2.0 * step);
}

struct Histogram {
    double lo = 0.0, hi = 1.0;
    std::vector<double> density;

    double width() const { return (hi - lo) / static_cast<double>(density.size()); }
    double center(std::size_t i) const {
        return lo + width() * (static_cast<double>(i) + 0.5);
    }
};

/// Density histogram of `count` draws from `sampler` over [lo, hi].
inline Histogram mc_histogram(const std::function<double()>& sampler, std::size_t count,
                              double lo, double hi, std::size_t bins) {
    Histogram h;
    h.lo = lo;
    h.hi = hi;
    h.density.assign(bins, 0.0);
    double width = h.width();
    for (std::size_t i = 0; i < count; ++i) {
        double x = sampler();
        if (x < lo || x >= hi) continue;
        h.density[static_cast<std::size_t>((x - lo) / width)] += 1.0;
    }
    for (double& d : h.density) d /= (static_cast<double>(count) * width);
    return h;
}

/// Sum over bins of |p_hist - p_other| where p are bin probabilities and the
/// comparison density is bin-averaged by trapezoid over each bin.
inline double histogram_l1(const Histogram& h, const std::function<double(double)>& density) {
    double total = 0.0;
    double w = h.width();
    for (std::size_t i = 0; i < h.density.size(); ++i) {
        double a = h.lo + w * static_cast<double>(i);
        // 8-point trapezoid inside the bin
        double p = 0.0;
        const int steps = 8;
        for (int s = 0; s < steps; ++s) {
            double x0 = a + w * s / steps;
            double x1 = a + w * (s + 1) / steps;
            p += 0.5 * (density(x0) + density(x1)) * (x1 - x0);
        }
        total += std::fabs(h.density[i] * w - p);
    }
    return total;
}

/// Tiny xorshift generator for oracle-side sampling so oracle draws never
/// share a stream with library draws.
struct XorShift {
    std::uint64_t s;
    explicit XorShift(std::uint64_t seed) : s(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
    std::uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
    double unit() { return ((next() >> 11) + 0.5) * 0x1.0p-53; }
};

}  // namespace oracle
