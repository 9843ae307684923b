#include "ple/solver.hpp"

#include <algorithm>
#include <cmath>

#include "ple/math.hpp"
#include "ple/nelder_mead.hpp"
#include "ple/parallel.hpp"

namespace ple {

namespace {
constexpr double kInfeasibleObjective = -1e18;
}

std::string_view class_form_name(ClassForm form) {
    switch (form) {
        case ClassForm::linear: return "linear";
        case ClassForm::scaled_max: return "scaled-max";
        case ClassForm::quadratic_centered: return "quadratic";
    }
    return "?";
}

ClassForm parse_class_form(std::string_view name) {
    if (name == "linear") return ClassForm::linear;
    if (name == "scaled-max" || name == "scaled_max") return ClassForm::scaled_max;
    if (name == "quadratic" || name == "quadratic_centered") return ClassForm::quadratic_centered;
    throw config_error("unknown estimator class form: " + std::string(name));
}

namespace {

void check_compatible(FamilyTag family, ClassForm form) {
    switch (form) {
        case ClassForm::linear:
            if (family == FamilyTag::one_sided_uniform || family == FamilyTag::exponential) return;
            break;
        case ClassForm::scaled_max:
            if (family == FamilyTag::one_sided_uniform) return;
            break;
        case ClassForm::quadratic_centered:
            if (family == FamilyTag::gaussian) return;
            break;
    }
    throw config_error(std::string("class form ") + std::string(class_form_name(form)) +
                       " is not defined for family " + std::string(family_name(family)));
}

}  // namespace

ParamVector ple_point_estimate(const EstimatorClass& cls, const Dataset& data) {
    validate_dataset(data);
    check_compatible(cls.family, cls.form);
    switch (cls.form) {
        case ClassForm::linear: {
            double s = stable_sum(data.points);
            return ParamVector{cls.family, {cls.coeff * s}};
        }
        case ClassForm::scaled_max: {
            double mx = *std::max_element(data.points.begin(), data.points.end());
            return ParamVector{cls.family, {cls.coeff * mx}};
        }
        case ClassForm::quadratic_centered: {
            double n = static_cast<double>(data.n());
            double mean = stable_sum(data.points) / n;
            std::vector<double> sq(data.n());
            for (std::size_t i = 0; i < data.n(); ++i) {
                double d = data.points[i] - mean;
                sq[i] = d * d;
            }
            return ParamVector{cls.family, {mean, cls.coeff * stable_sum(std::move(sq))}};
        }
    }
    throw config_error("unreachable class form");
}

double mle_start_coefficient(const EstimatorClass& cls, const Dataset& data) {
    double n = static_cast<double>(data.n());
    switch (cls.form) {
        case ClassForm::linear: {
            if (cls.family == FamilyTag::one_sided_uniform) {
                double mx = *std::max_element(data.points.begin(), data.points.end());
                double s = stable_sum(data.points);
                return s > 0.0 ? mx / s : 1.0 / n;
            }
            return 1.0 / n;  // exponential: MLE of the mean is the sample mean
        }
        case ClassForm::scaled_max:
            return 1.0;
        case ClassForm::quadratic_centered:
            return 1.0 / n;
    }
    return 1.0;
}

namespace {

/// Fixed bank of standard draws (uniform, standard normal, or standard
/// exponential) shared by every candidate coefficient. Re-transforming the
/// same bank under candidate parameters keeps the penalized objective a
/// deterministic, smooth function of the coefficient.
struct CrnBank {
    FamilyTag family;
    std::size_t k = 0;
    std::size_t m = 0;
    std::vector<double> std_draws;  // k * m values

    static CrnBank make(FamilyTag family, std::size_t k, std::size_t m, const SeededRng& rng) {
        CrnBank bank;
        bank.family = family;
        bank.k = k;
        bank.m = m;
        bank.std_draws.resize(k * m);
        Pcg32 eng = rng.engine();
        for (double& v : bank.std_draws) {
            double u = eng.next_unit();
            switch (family) {
                case FamilyTag::one_sided_uniform: v = u; break;
                case FamilyTag::gaussian: v = inv_norm_cdf(u); break;
                case FamilyTag::exponential: v = -std::log1p(-u); break;
                default:
                    throw config_error("constraint bank supports uniform, gaussian, exponential");
            }
        }
        return bank;
    }

    void fill_dataset(std::size_t j, const ParamVector& params, Dataset& out) const {
        out.points.resize(m);
        const double* d = std_draws.data() + j * m;
        switch (family) {
            case FamilyTag::one_sided_uniform: {
                double a = params.values[0];
                for (std::size_t i = 0; i < m; ++i) out.points[i] = a * d[i];
                break;
            }
            case FamilyTag::gaussian: {
                double mu = params.values[0];
                double sd = std::sqrt(params.values[1]);
                for (std::size_t i = 0; i < m; ++i) out.points[i] = mu + sd * d[i];
                break;
            }
            case FamilyTag::exponential: {
                double mean = params.values[0];
                for (std::size_t i = 0; i < m; ++i) out.points[i] = mean * d[i];
                break;
            }
            default: break;
        }
    }
};

ConstraintEstimate constraint_from_bank(const CrnBank& bank,
                                        const std::function<ParamVector(const Dataset&)>& H,
                                        const ParamVector& theta_hat) {
    const std::size_t params = theta_hat.values.size();
    std::vector<std::vector<double>> diffs(bank.k);
    par::for_index(bank.k, [&](std::size_t j) {
        Dataset y;
        bank.fill_dataset(j, theta_hat, y);
        ParamVector hy = H(y);
        std::vector<double> row(params);
        for (std::size_t p = 0; p < params; ++p) row[p] = hy.values[p] - theta_hat.values[p];
        diffs[j] = std::move(row);
    });

    ConstraintEstimate est;
    est.inner_samples = bank.m;
    est.outer_samples = bank.k;
    est.value.resize(params);
    est.stderr_.resize(params);
    std::vector<double> column(bank.k);
    for (std::size_t p = 0; p < params; ++p) {
        for (std::size_t j = 0; j < bank.k; ++j) column[j] = diffs[j][p];
        MeanStderr ms = mean_stderr(column);
        est.value[p] = ms.mean;
        est.stderr_[p] = ms.stderr_;
    }
    return est;
}

}  // namespace

ConstraintEstimate estimate_constraint(const std::function<ParamVector(const Dataset&)>& H,
                                       const Dataset& data, FamilyTag family,
                                       const PenaltyConfig& cfg, const SeededRng& rng) {
    validate_dataset(data);
    ParamVector theta_hat = H(data);
    if (theta_hat.family != family || !params_in_domain(theta_hat))
        throw infeasible_error("H(data) lies outside the family parameter domain");
    std::size_t m = cfg.m > 0 ? cfg.m : data.n();
    CrnBank bank = CrnBank::make(family, cfg.k, m, rng);
    return constraint_from_bank(bank, H, theta_hat);
}

PleFitResult ple_fit(const EstimatorClass& cls, const Dataset& data, const PenaltyConfig& cfg,
                     const SeededRng& rng) {
    validate_dataset(data);
    check_compatible(cls.family, cls.form);
    std::size_t m = cfg.m > 0 ? cfg.m : data.n();
    CrnBank bank = CrnBank::make(cls.family, cfg.k, m, rng);

    auto apply_at = [&](double coeff) {
        EstimatorClass c = cls;
        c.coeff = coeff;
        return [c](const Dataset& d) { return ple_point_estimate(c, d); };
    };

    // Penalized objective at one coefficient; larger is better.
    auto objective = [&](double coeff, double lambda, ConstraintEstimate* out_constraint,
                         double* out_ll) -> double {
        auto H = apply_at(coeff);
        ParamVector theta_hat = H(data);
        if (!params_in_domain(theta_hat)) return kInfeasibleObjective;
        double ll = log_likelihood(theta_hat, data);
        if (!std::isfinite(ll)) return kInfeasibleObjective;
        ConstraintEstimate est = constraint_from_bank(bank, H, theta_hat);
        double penalty = 0.0;
        for (double v : est.value) penalty += v * v;
        if (out_constraint) *out_constraint = est;
        if (out_ll) *out_ll = ll;
        return ll - lambda * penalty;
    };

    double coeff = cls.coeff != 0.0 ? cls.coeff : mle_start_coefficient(cls, data);
    double lambda = cfg.lambda;
    NelderMeadOptions nm_opt;
    nm_opt.tolerance = cfg.tolerance;
    nm_opt.max_iterations = cfg.max_iterations;

    PleFitResult result;
    result.fitted = cls;
    int total_iterations = 0;
    bool simplex_converged = false;

    auto constraint_in_noise = [](const ConstraintEstimate& est) {
        for (std::size_t p = 0; p < est.value.size(); ++p) {
            double band = 2.0 * est.stderr_[p];
            if (std::fabs(est.value[p]) > std::max(band, 1e-12)) return false;
        }
        return true;
    };

    while (true) {
        NelderMeadResult nm = nelder_mead(
            [&](const std::vector<double>& x) { return -objective(x[0], lambda, nullptr, nullptr); },
            {coeff}, nm_opt);
        total_iterations += nm.iterations;
        simplex_converged = nm.converged;
        coeff = nm.x[0];
        if (nm.fx >= -kInfeasibleObjective * 0.999)
            throw infeasible_error("every candidate coefficient was infeasible");

        ConstraintEstimate est;
        double ll = 0.0;
        double obj = objective(coeff, lambda, &est, &ll);
        result.fitted.coeff = coeff;
        result.constraint = est;
        result.objective = obj;
        result.log_likelihood = ll;
        result.lambda_final = lambda;

        if (!cfg.escalate || lambda <= 0.0 || constraint_in_noise(est) || lambda >= cfg.max_lambda)
            break;
        lambda *= 10.0;
    }

    result.iterations = total_iterations;
    bool within_noise = true;
    for (std::size_t p = 0; p < result.constraint.value.size(); ++p) {
        if (std::fabs(result.constraint.value[p]) >
            std::max(4.0 * result.constraint.stderr_[p], 1e-12))
            within_noise = false;
    }
    // With escalation the fit only counts as converged once the constraint sits
    // inside its own Monte-Carlo noise; a pure likelihood fit (lambda = 0) just
    // needs the simplex to have settled.
    result.converged = simplex_converged && (cfg.lambda == 0.0 || !cfg.escalate || within_noise);
    return result;
}

}  // namespace ple
