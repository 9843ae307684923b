#include "ple/gmm_lab.hpp"

#include <algorithm>
#include <cmath>

#include "ple/math.hpp"
#include "ple/parallel.hpp"

namespace ple {

namespace {

struct Resp {
    double r1 = 0.0;       // responsibility of component 1
    double log_lik = 0.0;  // per-point log density
};

Resp point_responsibility(double x, const std::vector<double>& p) {
    double lw1 = p[4] > 0.0 ? std::log(p[4]) : -std::numeric_limits<double>::infinity();
    double lw2 = p[4] < 1.0 ? std::log(1.0 - p[4]) : -std::numeric_limits<double>::infinity();
    double l1 = lw1 + norm_log_pdf(x, p[0], p[2]);
    double l2 = lw2 + norm_log_pdf(x, p[1], p[3]);
    double m = std::max(l1, l2);
    double e1 = std::exp(l1 - m);
    double e2 = std::exp(l2 - m);
    return Resp{e1 / (e1 + e2), m + std::log(e1 + e2)};
}

/// One EM chain from an explicit starting point.
EmResult em_chain(const Dataset& data, std::vector<double> p, const EmConfig& cfg) {
    const std::size_t n = data.n();
    const double dn = static_cast<double>(n);
    EmResult res;
    double prev_ll = -std::numeric_limits<double>::infinity();
    std::vector<double> resp(n);

    for (std::size_t iter = 0; iter < cfg.max_iterations; ++iter) {
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            Resp r = point_responsibility(data.points[i], p);
            resp[i] = r.r1;
            ll += r.log_lik;
        }
        res.likelihood_path.push_back(ll);
        res.iterations = iter + 1;
        if (std::fabs(ll - prev_ll) < cfg.tolerance) {
            res.converged = true;
            prev_ll = ll;
            break;
        }
        prev_ll = ll;

        double n1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) n1 += resp[i];
        double n2 = dn - n1;
        // A component with no mass keeps its location; only the weight moves.
        if (n1 > 1e-12) {
            double mu1 = 0.0;
            for (std::size_t i = 0; i < n; ++i) mu1 += resp[i] * data.points[i];
            mu1 /= n1;
            double v1 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double d = data.points[i] - mu1;
                v1 += resp[i] * d * d;
            }
            v1 /= n1;
            if (v1 < cfg.variance_floor) {
                v1 = cfg.variance_floor;
                res.variance_floored = true;
            }
            p[0] = mu1;
            p[2] = v1;
        }
        if (n2 > 1e-12) {
            double mu2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) mu2 += (1.0 - resp[i]) * data.points[i];
            mu2 /= n2;
            double v2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double d = data.points[i] - mu2;
                v2 += (1.0 - resp[i]) * d * d;
            }
            v2 /= n2;
            if (v2 < cfg.variance_floor) {
                v2 = cfg.variance_floor;
                res.variance_floored = true;
            }
            p[1] = mu2;
            p[3] = v2;
        }
        p[4] = std::min(1.0, std::max(0.0, n1 / dn));
    }
    res.log_likelihood = prev_ll;
    res.params = ParamVector{FamilyTag::gmm2, std::move(p)};
    return res;
}

double data_variance(const Dataset& data) {
    double mean = stable_sum(data.points) / static_cast<double>(data.n());
    double ss = 0.0;
    for (double x : data.points) {
        double d = x - mean;
        ss += d * d;
    }
    return ss / static_cast<double>(data.n());
}

/// Reorders `fit` so its components line up with `reference` by nearest mean;
/// equal costs fall back to matching by weight order.
std::vector<double> align_components(const std::vector<double>& fit,
                                     const std::vector<double>& reference) {
    double keep = std::fabs(fit[0] - reference[0]) + std::fabs(fit[1] - reference[1]);
    double swap = std::fabs(fit[0] - reference[1]) + std::fabs(fit[1] - reference[0]);
    bool do_swap;
    if (keep < swap) {
        do_swap = false;
    } else if (swap < keep) {
        do_swap = true;
    } else {
        bool fit_first_major = fit[4] >= 0.5;
        bool ref_first_major = reference[4] >= 0.5;
        do_swap = fit_first_major != ref_first_major;
    }
    if (!do_swap) return fit;
    return {fit[1], fit[0], fit[3], fit[2], 1.0 - fit[4]};
}

}  // namespace

EmResult em_fit(const Dataset& data, const EmConfig& cfg, const SeededRng& rng) {
    validate_dataset(data);
    if (data.n() < 4) throw data_domain_error("em_fit needs at least 4 points");

    EmResult best;
    bool have_best = false;
    for (int r = 0; r < cfg.restarts; ++r) {
        Pcg32 eng = rng.substream(static_cast<std::uint64_t>(r)).engine();
        std::size_t i = static_cast<std::size_t>(eng.next_u64() % data.n());
        std::size_t j = static_cast<std::size_t>(eng.next_u64() % data.n());
        for (int guard = 0; data.points[i] == data.points[j] && guard < 64; ++guard)
            j = static_cast<std::size_t>(eng.next_u64() % data.n());
        double var0 = std::max(cfg.variance_floor, data_variance(data));
        std::vector<double> init{data.points[i], data.points[j], var0, var0, 0.5};
        EmResult res = em_chain(data, std::move(init), cfg);
        if (!have_best || res.log_likelihood > best.log_likelihood) {
            best = std::move(res);
            have_best = true;
        }
    }
    return best;
}

KlEstimate kl_divergence(const ParamVector& q, const ParamVector& p, std::size_t samples,
                         const SeededRng& rng) {
    validate_params(q);
    validate_params(p);
    if (samples < 2) throw config_error("kl_divergence needs at least 2 samples");

    Dataset draws = sample(q, samples, rng);
    std::vector<double> terms(samples);
    par::for_index(samples, [&](std::size_t i) {
        double x = draws.points[i];
        terms[i] = log_pdf(q, x) - log_pdf(p, x);
    });
    MeanStderr ms = mean_stderr(terms);
    return KlEstimate{ms.mean, ms.stderr_};
}

double gaussian_kl(double mu_q, double var_q, double mu_p, double var_p) {
    double d = mu_q - mu_p;
    return 0.5 * (var_q / var_p + d * d / var_p - 1.0 + std::log(var_p / var_q));
}

FairnessReport fairness_report(const ParamVector& fit, const ParamVector& truth) {
    validate_params(fit);
    validate_params(truth);
    std::vector<double> aligned = align_components(fit.values, truth.values);

    auto score = [](double kl) {
        constexpr double cap = 1e6;
        return kl <= 1.0 / cap ? cap : 1.0 / kl;
    };
    double kl1 = gaussian_kl(aligned[0], aligned[2], truth.values[0], truth.values[2]);
    double kl2 = gaussian_kl(aligned[1], aligned[3], truth.values[1], truth.values[3]);

    FairnessReport out;
    bool first_is_majority = truth.values[4] >= 0.5;
    out.s_maj = score(first_is_majority ? kl1 : kl2);
    out.s_min = score(first_is_majority ? kl2 : kl1);
    out.r_fair = out.s_maj / out.s_min;
    return out;
}

namespace {

/// Working coordinates for the gmm2 constraint solve: means stay linear,
/// variances move in log space and the weight in logit space, so corrections
/// are multiplicative where the domain is one-sided and can never step out.
std::vector<double> to_workspace(const std::vector<double>& p, double wclamp) {
    double w = std::min(1.0 - wclamp, std::max(wclamp, p[4]));
    return {p[0], p[1], std::log(p[2]), std::log(p[3]), std::log(w / (1.0 - w))};
}

std::vector<double> from_workspace(const std::vector<double>& f) {
    double w = 1.0 / (1.0 + std::exp(-f[4]));
    return {f[0], f[1], std::exp(f[2]), std::exp(f[3]), w};
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ParamVector ple_gmm_solver(const Dataset& data, const SolverPleConfig& cfg, const SeededRng& rng) {
    validate_dataset(data);
    ParamVector base = em_fit(data, cfg.em, rng.substream(0)).params;

    const std::size_t k = cfg.replications;
    const std::size_t n = data.n();
    // Fixed unit bank: one component draw and one standard normal per point.
    std::vector<double> comp_u(k * n);
    std::vector<double> z(k * n);
    {
        Pcg32 eng = rng.substream(1).engine();
        for (std::size_t i = 0; i < k * n; ++i) {
            comp_u[i] = eng.next_unit();
            z[i] = inv_norm_cdf(eng.next_unit());
        }
    }

    EmConfig refit_cfg = cfg.em;
    refit_cfg.max_iterations = cfg.refit_max_iterations;

    const std::vector<double> anchor = to_workspace(base.values, cfg.weight_clamp);
    std::vector<double> t = base.values;
    for (int round = 0; round < cfg.rounds; ++round) {
        ParamVector current{FamilyTag::gmm2, t};
        std::vector<std::vector<double>> refits(k);
        par::for_index(k, [&](std::size_t j) {
            gmm::Canon c = gmm::canonical(current);
            Dataset y;
            y.points.resize(n);
            const double* u = comp_u.data() + j * n;
            const double* zz = z.data() + j * n;
            for (std::size_t i = 0; i < n; ++i) {
                int comp = u[i] < c.w[0] ? 0 : 1;
                y.points[i] = c.mu[comp] + std::sqrt(c.var[comp]) * zz[i];
            }
            // Warm start at the generating parameters: fast and label-stable.
            EmResult refit = em_chain(y, t, refit_cfg);
            refits[j] = to_workspace(align_components(refit.params.values, t), cfg.weight_clamp);
        });

        // Componentwise median across refits: a collapsed synthetic refit
        // would otherwise drag the whole correction with it.
        std::vector<double> center(5);
        std::vector<double> column(k);
        for (int pidx = 0; pidx < 5; ++pidx) {
            for (std::size_t j = 0; j < k; ++j) column[j] = refits[j][pidx];
            center[pidx] = median_of(column);
        }

        std::vector<double> cur = to_workspace(t, cfg.weight_clamp);
        std::vector<double> step(5);
        bool ok = true;
        for (int pidx = 0; pidx < 5; ++pidx) {
            step[pidx] = anchor[pidx] - center[pidx];
            if (!std::isfinite(step[pidx])) ok = false;
        }
        if (!ok) return base;
        // Trust caps: means in units of their component spread, the log and
        // logit coordinates directly.
        double cap[5] = {cfg.step_cap * std::sqrt(t[2]), cfg.step_cap * std::sqrt(t[3]),
                         cfg.step_cap, cfg.step_cap, cfg.step_cap};
        for (int pidx = 0; pidx < 5; ++pidx)
            step[pidx] = std::min(cap[pidx], std::max(-cap[pidx], step[pidx]));

        double ll_base = log_likelihood(ParamVector{FamilyTag::gmm2, t}, data);
        std::vector<double> accepted = t;
        for (double scale : {1.0, 0.5, 0.25, 0.125}) {
            std::vector<double> trial = cur;
            for (int pidx = 0; pidx < 5; ++pidx) trial[pidx] += scale * step[pidx];
            std::vector<double> candidate = from_workspace(trial);
            candidate[2] = std::max(candidate[2], cfg.variance_clamp);
            candidate[3] = std::max(candidate[3], cfg.variance_clamp);
            double ll = log_likelihood(ParamVector{FamilyTag::gmm2, candidate}, data);
            if (ll >= ll_base - cfg.likelihood_slack) {
                accepted = std::move(candidate);
                break;
            }
        }
        t = std::move(accepted);
    }
    return ParamVector{FamilyTag::gmm2, t};
}

ParamVector ple_gmm_hypernet(const Dataset& data, const HypernetFitConfig& cfg,
                             const SeededRng& rng) {
    validate_dataset(data);
    HyperNet net = HyperNet::init(cfg.hidden, rng.substream(0));

    const std::size_t batch = std::min<std::size_t>(cfg.batch, data.n());
    SeededRng batch_rng = rng.substream(1);
    auto provider = [&](std::size_t step) {
        if (batch == data.n()) return data;
        Pcg32 eng = batch_rng.substream(step).engine();
        Dataset sub;
        sub.points.resize(batch);
        for (std::size_t i = 0; i < batch; ++i)
            sub.points[i] = data.points[eng.next_u64() % data.n()];
        return sub;
    };

    net = train(std::move(net), provider, cfg.train, rng.substream(2));
    return hypernet_forward(net, data);
}

PleMethod parse_ple_method(std::string_view name) {
    if (name == "solver") return PleMethod::solver;
    if (name == "hypernet") return PleMethod::hypernet;
    throw config_error("unknown PLE method: " + std::string(name));
}

std::string_view ple_method_name(PleMethod m) {
    return m == PleMethod::solver ? "solver" : "hypernet";
}

GridResult run_grid(const GridSpec& spec, PleMethod method, const SeededRng& rng) {
    if (spec.weights.empty() || spec.sizes.empty() || spec.seeds_per_cell < 1)
        throw config_error("grid spec needs weights, sizes and at least one seed");
    for (double w : spec.weights) {
        if (!(w > 0.0 && w < 1.0)) throw config_error("grid weights must lie in (0, 1)");
    }

    GridResult result;
    result.spec = spec;
    result.method = method;

    std::size_t cell_index = 0;
    for (double w : spec.weights) {
        for (std::size_t n : spec.sizes) {
            ParamVector truth{FamilyTag::gmm2, {spec.mu1, spec.mu2, spec.var1, spec.var2, w}};
            validate_params(truth);
            SeededRng cell_rng = rng.substream(cell_index++);

            const std::size_t seeds = spec.seeds_per_cell;
            std::vector<double> kl_mle(seeds), kl_ple(seeds), rf_mle(seeds), rf_ple(seeds);
            std::vector<char> failed(seeds, 0);

            par::for_index(seeds, [&](std::size_t s) {
                SeededRng rs = cell_rng.substream(s);
                try {
                    Dataset data = sample(truth, n, rs.substream(0));
                    ParamVector mle = em_fit(data, spec.em, rs.substream(1)).params;
                    ParamVector ple = method == PleMethod::solver
                                          ? ple_gmm_solver(data, spec.solver, rs.substream(2))
                                          : ple_gmm_hypernet(data, spec.hypernet, rs.substream(2));
                    SeededRng kl_rng = rs.substream(3);  // shared: paired KL draws
                    kl_mle[s] = kl_divergence(mle, truth, spec.kl_samples, kl_rng).value;
                    kl_ple[s] = kl_divergence(ple, truth, spec.kl_samples, kl_rng).value;
                    rf_mle[s] = fairness_report(mle, truth).r_fair;
                    rf_ple[s] = fairness_report(ple, truth).r_fair;
                } catch (const std::exception&) {
                    failed[s] = 1;
                }
            });

            GridCell cell;
            cell.weight = w;
            cell.n = n;
            std::vector<double> d;
            std::vector<double> km, kp, fm, fp;
            for (std::size_t s = 0; s < seeds; ++s) {
                if (failed[s]) {
                    ++cell.failures;
                    continue;
                }
                km.push_back(kl_mle[s]);
                kp.push_back(kl_ple[s]);
                fm.push_back(rf_mle[s]);
                fp.push_back(rf_ple[s]);
                d.push_back(kl_mle[s] - kl_ple[s]);
            }
            if (!d.empty()) {
                cell.kl_mle_mean = mean_stderr(km).mean;
                cell.kl_ple_mean = mean_stderr(kp).mean;
                MeanStderr dms = mean_stderr(d);
                cell.d_mean = dms.mean;
                cell.d_stderr = dms.stderr_;
                cell.rfair_mle = mean_stderr(fm).mean;
                cell.rfair_ple = mean_stderr(fp).mean;
            }
            result.cells.push_back(cell);
        }
    }
    return result;
}

}  // namespace ple
