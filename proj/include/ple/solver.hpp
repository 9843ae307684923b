#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ple/distributions.hpp"
#include "ple/estimators.hpp"
#include "ple/rng.hpp"

namespace ple {

/// Single-coefficient estimator classes. Permutation symmetry collapses the
/// per-point coefficients of the linear and quadratic forms to one shared
/// scalar, so each class is a 1-D search space.
enum class ClassForm {
    linear,             // H(X) = coeff * sum(x_i); estimates a scale/mean parameter
    scaled_max,         // H(X) = coeff * max(x_i)
    quadratic_centered  // H(X) = coeff * sum((x_i - mean)^2); variance with the mean fixed
};

std::string_view class_form_name(ClassForm form);
ClassForm parse_class_form(std::string_view name);

struct EstimatorClass {
    FamilyTag family;
    ClassForm form;
    double coeff = 0.0;
};

/// Applies the class at its current coefficient.
ParamVector ple_point_estimate(const EstimatorClass& cls, const Dataset& data);

/// Coefficient whose point estimate matches the plain maximum-likelihood
/// answer; the solver's starting point.
double mle_start_coefficient(const EstimatorClass& cls, const Dataset& data);

struct ConstraintEstimate {
    std::vector<double> value;    // mean of H(Y_j) - H(X), one entry per parameter
    std::vector<double> stderr_;  // standard error of each entry
    std::size_t inner_samples = 0;  // m, points per synthetic dataset
    std::size_t outer_samples = 0;  // k, synthetic replications
};

struct PenaltyConfig {
    double lambda = 0.1;    // initial penalty weight
    std::size_t m = 0;      // synthetic dataset size; 0 means match the data size
    std::size_t k = 2000;   // constraint replications
    double tolerance = 1e-6;  // simplex diameter tolerance
    int max_iterations = 5000;
    bool escalate = true;       // multiply lambda by 10 until the constraint sits in its noise floor
    double max_lambda = 1e10;
};

/// Monte-Carlo estimate of E[H(Y) - H(X)] with Y ~ P(.; H(data)), |Y| = m.
/// A fixed bank of unit draws is transformed under H(data), so repeated calls
/// with the same rng are deterministic; replications fill independent slots in
/// parallel and are reduced in order.
ConstraintEstimate estimate_constraint(const std::function<ParamVector(const Dataset&)>& H,
                                       const Dataset& data, FamilyTag family,
                                       const PenaltyConfig& cfg, const SeededRng& rng);

struct PleFitResult {
    EstimatorClass fitted;
    ConstraintEstimate constraint;
    double objective = 0.0;      // penalized objective at the fit
    double log_likelihood = 0.0; // likelihood part alone
    double lambda_final = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Penalized relaxation of the constrained likelihood problem: maximize
/// log-likelihood minus lambda * ||constraint||^2 over the class coefficient
/// with a simplex search. When cfg.escalate is set, lambda grows tenfold per
/// round until the constraint estimate is within twice its own standard error,
/// which pins the fit to the constraint manifold up to Monte-Carlo noise.
/// Infeasible coefficients score -1e18 instead of being rejected.
PleFitResult ple_fit(const EstimatorClass& cls, const Dataset& data, const PenaltyConfig& cfg,
                     const SeededRng& rng);

}  // namespace ple
