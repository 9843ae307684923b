#include "ple/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "ple/math.hpp"
#include "ple/parallel.hpp"

namespace ple {

namespace {

double sorted_mean(const Dataset& data) {
    return stable_sum(data.points) / static_cast<double>(data.n());
}

double max_point(const Dataset& data) {
    return *std::max_element(data.points.begin(), data.points.end());
}

void require_nonnegative(const Dataset& data) {
    for (double x : data.points) {
        if (x < 0.0) throw data_domain_error("one-sided uniform data must be nonnegative");
    }
}

/// Centered sum of squares, permutation invariant.
double centered_ss(const Dataset& data, double mean) {
    std::vector<double> sq(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) {
        double d = data.points[i] - mean;
        sq[i] = d * d;
    }
    return stable_sum(std::move(sq));
}

}  // namespace

ParamVector mle_uniform(const Dataset& data) {
    validate_dataset(data);
    require_nonnegative(data);
    return ParamVector{FamilyTag::one_sided_uniform, {max_point(data)}};
}

ParamVector ple_uniform_linear(const Dataset& data) {
    validate_dataset(data);
    return ParamVector{FamilyTag::one_sided_uniform, {2.0 * sorted_mean(data)}};
}

ParamVector ple_uniform_max(const Dataset& data) {
    validate_dataset(data);
    require_nonnegative(data);
    double n = static_cast<double>(data.n());
    return ParamVector{FamilyTag::one_sided_uniform, {(n + 1.0) / n * max_point(data)}};
}

ParamVector mle_gaussian(const Dataset& data) {
    validate_dataset(data);
    if (data.n() < 2) throw data_domain_error("gaussian estimation needs n >= 2");
    double mean = sorted_mean(data);
    double var = centered_ss(data, mean) / static_cast<double>(data.n());
    return ParamVector{FamilyTag::gaussian, {mean, var}};
}

ParamVector ple_gaussian(const Dataset& data) {
    validate_dataset(data);
    if (data.n() < 2) throw data_domain_error("gaussian estimation needs n >= 2");
    double n = static_cast<double>(data.n());
    double mean = sorted_mean(data);
    double var_mle = centered_ss(data, mean) / n;
    return ParamVector{FamilyTag::gaussian, {mean, var_mle * (n / (n - 1.0))}};
}

namespace {
const EstimatorFn kEstimators[] = {
    {"mle", FamilyTag::one_sided_uniform, mle_uniform},
    {"ple-linear", FamilyTag::one_sided_uniform, ple_uniform_linear},
    {"ple-max", FamilyTag::one_sided_uniform, ple_uniform_max},
    {"mle", FamilyTag::gaussian, mle_gaussian},
    {"ple", FamilyTag::gaussian, ple_gaussian},
};
}  // namespace

const EstimatorFn& find_estimator(FamilyTag family, const std::string& name) {
    for (const EstimatorFn& e : kEstimators) {
        if (e.family == family && e.name == name) return e;
    }
    throw config_error("no estimator '" + name + "' for family " +
                       std::string(family_name(family)));
}

std::vector<std::string> estimator_names(FamilyTag family) {
    std::vector<std::string> out;
    for (const EstimatorFn& e : kEstimators) {
        if (e.family == family) out.push_back(e.name);
    }
    return out;
}

std::optional<std::vector<double>> analytic_bias(const std::string& estimator_name,
                                                 const ParamVector& truth, std::size_t n) {
    double dn = static_cast<double>(n);
    if (truth.family == FamilyTag::one_sided_uniform) {
        double a = truth.values[0];
        if (estimator_name == "mle") return std::vector<double>{-a / (dn + 1.0)};
        if (estimator_name == "ple-linear" || estimator_name == "ple-max")
            return std::vector<double>{0.0};
    }
    if (truth.family == FamilyTag::gaussian) {
        double var = truth.values[1];
        if (estimator_name == "mle") return std::vector<double>{0.0, -var / dn};
        if (estimator_name == "ple") return std::vector<double>{0.0, 0.0};
    }
    return std::nullopt;
}

BiasReport monte_carlo_bias(const EstimatorFn& estimator, const ParamVector& truth, std::size_t n,
                            std::size_t trials, const SeededRng& rng) {
    validate_params(truth);
    if (truth.family != estimator.family)
        throw config_error("estimator family does not match the sampling family");
    if (trials < 2) throw config_error("monte_carlo_bias needs trials >= 2");

    const std::size_t params = truth.values.size();
    std::vector<std::vector<double>> estimates(trials);
    par::for_index(trials, [&](std::size_t t) {
        Dataset d = sample(truth, n, rng.substream(t).substream(0));
        estimates[t] = estimator.apply(d).values;
    });

    BiasReport report;
    report.estimator = estimator.name;
    report.truth = truth;
    report.analytic = analytic_bias(estimator.name, truth, n);
    report.trials = trials;
    report.mc_bias.resize(params);
    report.mc_stderr.resize(params);
    std::vector<double> column(trials);
    for (std::size_t p = 0; p < params; ++p) {
        for (std::size_t t = 0; t < trials; ++t) column[t] = estimates[t][p];
        MeanStderr ms = mean_stderr(column);
        report.mc_bias[p] = ms.mean - truth.values[p];
        report.mc_stderr[p] = ms.stderr_;
    }
    return report;
}

}  // namespace ple
