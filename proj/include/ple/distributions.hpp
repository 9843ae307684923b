#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ple/errors.hpp"
#include "ple/rng.hpp"

namespace ple {

enum class FamilyTag { one_sided_uniform, gaussian, exponential, bernoulli, gmm2 };

std::string_view family_name(FamilyTag tag);
FamilyTag parse_family(std::string_view name);

/// Static description of a parametric family: parameter count and per-parameter
/// open/closed bounds used for domain validation.
struct FamilySpec {
    FamilyTag tag;
    int param_count;
    const char* const* param_names;
};

const FamilySpec& family_spec(FamilyTag tag);

/// Parameter vector bound to a family. gmm2 layout is
/// (mu1, mu2, var1, var2, w1) with w2 = 1 - w1.
struct ParamVector {
    FamilyTag family;
    std::vector<double> values;

    double operator[](std::size_t i) const { return values[i]; }
    std::size_t size() const { return values.size(); }
};

ParamVector make_params(FamilyTag family, std::vector<double> values);

/// Throws param_domain_error when the vector violates the family domain.
void validate_params(const ParamVector& p);
bool params_in_domain(const ParamVector& p);

/// 1-D sample, ordered as drawn.
struct Dataset {
    std::vector<double> points;

    std::size_t n() const { return points.size(); }
};

void validate_dataset(const Dataset& d);

Dataset sample(const ParamVector& params, std::size_t n, const SeededRng& rng);

double pdf(const ParamVector& params, double x);
double log_pdf(const ParamVector& params, double x);
double log_likelihood(const ParamVector& params, const Dataset& data);

/// Inverse-CDF style transform of a block of unit-interval draws into one
/// sample; the common-random-numbers hook used by the constraint solver.
/// Every family here consumes draws_per_point(u) values per output point.
int draws_per_point(FamilyTag tag);
double transform_unit_draws(const ParamVector& params, const double* u);

namespace gmm {
/// Canonical component order (by mean, then variance, then weight). Density,
/// likelihood and sampling all run in this order so swapping the stored
/// component labels changes nothing, bit for bit.
struct Canon {
    double mu[2];
    double var[2];
    double w[2];
};
Canon canonical(const ParamVector& p);
}  // namespace gmm

}  // namespace ple
