#include "ple/autophagy.hpp"

#include <cmath>

#include "ple/math.hpp"
#include "ple/parallel.hpp"

namespace ple {

GenerationTrace run_loop(const LoopConfig& cfg, const SeededRng& rng) {
    validate_params(cfg.truth);
    if (cfg.truth.family != cfg.family)
        throw config_error("loop truth parameters do not match the configured family");
    if (cfg.generations < 1 || cfg.trials < 1 || cfg.n < 1)
        throw config_error("loop needs generations, trials and n all >= 1");
    const EstimatorFn& estimator = find_estimator(cfg.family, cfg.estimator);

    GenerationTrace trace;
    trace.config = cfg;
    trace.estimates.resize(cfg.trials);
    std::vector<char> degenerate(cfg.trials, 0);

    par::for_index(cfg.trials, [&](std::size_t t) {
        auto& chain = trace.estimates[t];
        chain.resize(cfg.generations + 1);
        chain[0] = cfg.truth.values;
        ParamVector current = cfg.truth;
        bool dead = false;
        SeededRng trial_rng = rng.substream(t);
        for (std::size_t g = 1; g <= cfg.generations; ++g) {
            if (dead) {
                chain[g] = chain[g - 1];
                continue;
            }
            Dataset data = sample(current, cfg.n, trial_rng.substream(g - 1));
            ParamVector est = estimator.apply(data);
            chain[g] = est.values;
            if (!params_in_domain(est)) {
                // Clamp the chain at the degenerate value instead of dropping
                // the trial; dropping would bias the cross-trial mean.
                dead = true;
                degenerate[t] = 1;
            } else {
                current = est;
            }
        }
    });

    trace.degenerate.assign(degenerate.begin(), degenerate.end());
    return trace;
}

GenerationTrace::Summary GenerationTrace::summarize(
    std::size_t param, const std::function<double(double)>& transform) const {
    Summary s;
    const std::size_t gens = config.generations;
    s.mean.resize(gens + 1);
    s.stderr_.resize(gens + 1);
    std::vector<double> column(trials());
    for (std::size_t g = 0; g <= gens; ++g) {
        for (std::size_t t = 0; t < trials(); ++t) {
            double v = estimates[t][g][param];
            column[t] = transform ? transform(v) : v;
        }
        MeanStderr ms = mean_stderr(column);
        s.mean[g] = ms.mean;
        s.stderr_[g] = ms.stderr_;
    }
    return s;
}

double collapse_rate(const GenerationTrace& trace, std::size_t param) {
    if (trace.config.generations < 2)
        throw config_error("collapse rate needs at least two generations");
    GenerationTrace::Summary s = trace.summarize(param);
    const std::size_t count = s.mean.size();
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t g = 0; g < count; ++g) {
        if (!(s.mean[g] > 0.0))
            throw divergence_error("collapse rate undefined: nonpositive generation mean");
        double x = static_cast<double>(g);
        double y = std::log(s.mean[g]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double n = static_cast<double>(count);
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace ple
