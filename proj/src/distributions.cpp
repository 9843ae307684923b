#include "ple/distributions.hpp"

#include <cmath>
#include <limits>

#include "ple/math.hpp"

namespace ple {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kWeightTol = 1e-9;

const char* kUniformParams[] = {"a"};
const char* kGaussianParams[] = {"mu", "var"};
const char* kExponentialParams[] = {"mean"};
const char* kBernoulliParams[] = {"p"};
const char* kGmm2Params[] = {"mu1", "mu2", "var1", "var2", "w1"};

const FamilySpec kSpecs[] = {
    {FamilyTag::one_sided_uniform, 1, kUniformParams},
    {FamilyTag::gaussian, 2, kGaussianParams},
    {FamilyTag::exponential, 1, kExponentialParams},
    {FamilyTag::bernoulli, 1, kBernoulliParams},
    {FamilyTag::gmm2, 5, kGmm2Params},
};
}  // namespace

std::string_view family_name(FamilyTag tag) {
    switch (tag) {
        case FamilyTag::one_sided_uniform: return "one_sided_uniform";
        case FamilyTag::gaussian: return "gaussian";
        case FamilyTag::exponential: return "exponential";
        case FamilyTag::bernoulli: return "bernoulli";
        case FamilyTag::gmm2: return "gmm2";
    }
    return "?";
}

FamilyTag parse_family(std::string_view name) {
    if (name == "uniform" || name == "one_sided_uniform") return FamilyTag::one_sided_uniform;
    if (name == "gaussian") return FamilyTag::gaussian;
    if (name == "exponential") return FamilyTag::exponential;
    if (name == "bernoulli") return FamilyTag::bernoulli;
    if (name == "gmm2") return FamilyTag::gmm2;
    throw config_error("unknown family: " + std::string(name));
}

const FamilySpec& family_spec(FamilyTag tag) { return kSpecs[static_cast<int>(tag)]; }

ParamVector make_params(FamilyTag family, std::vector<double> values) {
    ParamVector p{family, std::move(values)};
    validate_params(p);
    return p;
}

bool params_in_domain(const ParamVector& p) {
    const FamilySpec& spec = family_spec(p.family);
    if (p.values.size() != static_cast<std::size_t>(spec.param_count)) return false;
    for (double v : p.values) {
        if (!std::isfinite(v)) return false;
    }
    switch (p.family) {
        case FamilyTag::one_sided_uniform:
            return p.values[0] > 0.0;
        case FamilyTag::gaussian:
            return p.values[1] > 0.0;
        case FamilyTag::exponential:
            return p.values[0] > 0.0;
        case FamilyTag::bernoulli:
            return p.values[0] >= 0.0 && p.values[0] <= 1.0;
        case FamilyTag::gmm2:
            return p.values[2] > 0.0 && p.values[3] > 0.0 && p.values[4] >= -kWeightTol &&
                   p.values[4] <= 1.0 + kWeightTol;
    }
    return false;
}

void validate_params(const ParamVector& p) {
    if (!params_in_domain(p)) {
        throw param_domain_error("parameters outside the " + std::string(family_name(p.family)) +
                                 " domain");
    }
}

void validate_dataset(const Dataset& d) {
    if (d.points.empty()) throw data_domain_error("dataset must hold at least one point");
    for (double x : d.points) {
        if (!std::isfinite(x)) throw data_domain_error("dataset contains a non-finite point");
    }
}

namespace gmm {
Canon canonical(const ParamVector& p) {
    double w1 = std::min(1.0, std::max(0.0, p.values[4]));
    double mu[2] = {p.values[0], p.values[1]};
    double var[2] = {p.values[2], p.values[3]};
    double w[2] = {w1, 1.0 - w1};
    int a = 0, b = 1;
    if (mu[1] < mu[0] || (mu[1] == mu[0] && (var[1] < var[0] || (var[1] == var[0] && w[1] < w[0])))) {
        a = 1;
        b = 0;
    }
    return Canon{{mu[a], mu[b]}, {var[a], var[b]}, {w[a], w[b]}};
}
}  // namespace gmm

int draws_per_point(FamilyTag tag) { return tag == FamilyTag::gmm2 ? 2 : 1; }

double transform_unit_draws(const ParamVector& params, const double* u) {
    switch (params.family) {
        case FamilyTag::one_sided_uniform:
            return params.values[0] * u[0];
        case FamilyTag::gaussian:
            return params.values[0] + std::sqrt(params.values[1]) * inv_norm_cdf(u[0]);
        case FamilyTag::exponential:
            return -params.values[0] * std::log1p(-u[0]);
        case FamilyTag::bernoulli:
            return u[0] < params.values[0] ? 1.0 : 0.0;
        case FamilyTag::gmm2: {
            gmm::Canon c = gmm::canonical(params);
            int comp = u[0] < c.w[0] ? 0 : 1;
            return c.mu[comp] + std::sqrt(c.var[comp]) * inv_norm_cdf(u[1]);
        }
    }
    return 0.0;
}

Dataset sample(const ParamVector& params, std::size_t n, const SeededRng& rng) {
    validate_params(params);
    if (n < 1) throw data_domain_error("sample size must be >= 1");
    Pcg32 eng = rng.engine();
    const int per = draws_per_point(params.family);
    Dataset out;
    out.points.resize(n);
    double u[2];
    for (std::size_t i = 0; i < n; ++i) {
        for (int j = 0; j < per; ++j) u[j] = eng.next_unit();
        out.points[i] = transform_unit_draws(params, u);
    }
    return out;
}

double pdf(const ParamVector& params, double x) {
    validate_params(params);
    switch (params.family) {
        case FamilyTag::one_sided_uniform: {
            double a = params.values[0];
            return (x >= 0.0 && x <= a) ? 1.0 / a : 0.0;
        }
        case FamilyTag::gaussian:
            return norm_pdf(x, params.values[0], params.values[1]);
        case FamilyTag::exponential: {
            double m = params.values[0];
            return x >= 0.0 ? std::exp(-x / m) / m : 0.0;
        }
        case FamilyTag::bernoulli: {
            double p = params.values[0];
            if (x == 1.0) return p;
            if (x == 0.0) return 1.0 - p;
            return 0.0;
        }
        case FamilyTag::gmm2: {
            gmm::Canon c = gmm::canonical(params);
            return c.w[0] * norm_pdf(x, c.mu[0], c.var[0]) +
                   c.w[1] * norm_pdf(x, c.mu[1], c.var[1]);
        }
    }
    return 0.0;
}

double log_pdf(const ParamVector& params, double x) {
    switch (params.family) {
        case FamilyTag::gaussian:
            validate_params(params);
            return norm_log_pdf(x, params.values[0], params.values[1]);
        case FamilyTag::gmm2: {
            validate_params(params);
            gmm::Canon c = gmm::canonical(params);
            double l0 = c.w[0] > 0.0 ? std::log(c.w[0]) + norm_log_pdf(x, c.mu[0], c.var[0]) : -kInf;
            double l1 = c.w[1] > 0.0 ? std::log(c.w[1]) + norm_log_pdf(x, c.mu[1], c.var[1]) : -kInf;
            return logsumexp2(l0, l1);
        }
        default: {
            double d = pdf(params, x);
            return d > 0.0 ? std::log(d) : -kInf;
        }
    }
}

double log_likelihood(const ParamVector& params, const Dataset& data) {
    validate_params(params);
    validate_dataset(data);
    double total = 0.0;
    for (double x : data.points) {
        double l = log_pdf(params, x);
        if (l == -kInf) return -kInf;
        total += l;
    }
    return total;
}

}  // namespace ple
