#include "ple/hypernet.hpp"

#include <algorithm>
#include <cmath>

#include "ple/math.hpp"
#include "ple/tape.hpp"

namespace ple {

namespace {

DenseLayer make_layer(int in, int out, Activation act, Pcg32& eng) {
    DenseLayer l;
    l.in = in;
    l.out = out;
    l.act = act;
    l.weights.resize(static_cast<std::size_t>(in) * out);
    l.bias.resize(out);
    double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (double& w : l.weights) w = (2.0 * eng.next_unit() - 1.0) * scale;
    for (double& b : l.bias) b = (2.0 * eng.next_unit() - 1.0) * scale;
    return l;
}

template <class Net, class F>
void visit_layers(Net& net, F&& f) {
    for (std::size_t i = 0; i < net.encoder.size(); ++i)
        f("encoder" + std::to_string(i), net.encoder[i]);
    for (std::size_t i = 0; i < net.trunk.size(); ++i) f("trunk" + std::to_string(i), net.trunk[i]);
    f("mean_head", net.mean_head);
    f("var_head", net.var_head);
    f("resp_head", net.resp_head);
}

}  // namespace

HyperNet HyperNet::init(int hidden, const SeededRng& rng) {
    Pcg32 eng = rng.engine();
    HyperNet net;
    net.encoder.push_back(make_layer(1, hidden, Activation::relu, eng));
    net.encoder.push_back(make_layer(hidden, hidden, Activation::relu, eng));
    net.encoder.push_back(make_layer(hidden, hidden, Activation::relu, eng));
    net.trunk.push_back(make_layer(hidden, hidden, Activation::relu, eng));
    net.trunk.push_back(make_layer(hidden, hidden, Activation::relu, eng));
    net.mean_head = make_layer(hidden, 2, Activation::identity, eng);
    net.var_head = make_layer(hidden, 2, Activation::identity, eng);
    net.resp_head = make_layer(hidden, 2, Activation::identity, eng);
    return net;
}

std::size_t HyperNet::parameter_count() const {
    std::size_t n = 0;
    visit_layers(*this, [&](const std::string&, const DenseLayer& l) {
        n += l.weights.size() + l.bias.size();
    });
    return n;
}

std::vector<double*> HyperNet::parameters() {
    std::vector<double*> out;
    visit_layers(*this, [&](const std::string&, DenseLayer& l) {
        for (double& w : l.weights) out.push_back(&w);
        for (double& b : l.bias) out.push_back(&b);
    });
    return out;
}

std::vector<const double*> HyperNet::parameters() const {
    std::vector<const double*> out;
    visit_layers(*this, [&](const std::string&, const DenseLayer& l) {
        for (const double& w : l.weights) out.push_back(&w);
        for (const double& b : l.bias) out.push_back(&b);
    });
    return out;
}

std::vector<std::pair<std::string, const std::vector<double>*>> HyperNet::named_tensors() const {
    std::vector<std::pair<std::string, const std::vector<double>*>> out;
    visit_layers(*this, [&](const std::string& name, const DenseLayer& l) {
        out.emplace_back(name + ".weight", &l.weights);
        out.emplace_back(name + ".bias", &l.bias);
    });
    return out;
}

namespace {

using ad::maximum;
using ad::relu;
using ad::softplus;
using ad::value_of;
using ad::Var;
using std::exp;
using std::log;
using std::sqrt;
using ad::exp;
using ad::log;
using ad::sqrt;

template <class Real>
struct LayerVals {
    std::vector<Real> weights;
    std::vector<Real> bias;
    int in = 0;
    int out = 0;
    Activation act = Activation::identity;
};

template <class Real>
struct NetVals {
    std::vector<LayerVals<Real>> encoder;
    std::vector<LayerVals<Real>> trunk;
    LayerVals<Real> mean_head;
    LayerVals<Real> var_head;
    LayerVals<Real> resp_head;
};

template <class Real, class Make>
LayerVals<Real> layer_vals(const DenseLayer& l, Make&& mk) {
    LayerVals<Real> out;
    out.in = l.in;
    out.out = l.out;
    out.act = l.act;
    out.weights.reserve(l.weights.size());
    out.bias.reserve(l.bias.size());
    for (double w : l.weights) out.weights.push_back(mk(w));
    for (double b : l.bias) out.bias.push_back(mk(b));
    return out;
}

/// Materializes the net in the same traversal order as parameters(), which is
/// what lets gradients be read back by leaf index.
template <class Real, class Make>
NetVals<Real> net_vals(const HyperNet& net, Make&& mk) {
    NetVals<Real> out;
    for (const DenseLayer& l : net.encoder) out.encoder.push_back(layer_vals<Real>(l, mk));
    for (const DenseLayer& l : net.trunk) out.trunk.push_back(layer_vals<Real>(l, mk));
    out.mean_head = layer_vals<Real>(net.mean_head, mk);
    out.var_head = layer_vals<Real>(net.var_head, mk);
    out.resp_head = layer_vals<Real>(net.resp_head, mk);
    return out;
}

template <class Real>
std::vector<Real> apply_layer(const LayerVals<Real>& l, const std::vector<Real>& in) {
    std::vector<Real> out;
    out.reserve(l.out);
    for (int r = 0; r < l.out; ++r) {
        Real acc = l.bias[r];
        const Real* row = l.weights.data() + static_cast<std::size_t>(r) * l.in;
        for (int c = 0; c < l.in; ++c) acc = acc + row[c] * in[c];
        if (l.act == Activation::relu) acc = relu(acc);
        out.push_back(acc);
    }
    return out;
}

template <class Real>
struct Gmm2Out {
    Real mu[2];
    Real var[2];
    Real w[2];
};

/// Mean pooling with the addends summed in sorted value order: the pooled
/// feature depends only on the multiset of per-point features.
template <class Real>
Real pooled_mean(std::vector<Real>& column) {
    std::sort(column.begin(), column.end(),
              [](const Real& a, const Real& b) { return value_of(a) < value_of(b); });
    Real acc = column[0];
    for (std::size_t i = 1; i < column.size(); ++i) acc = acc + column[i];
    return acc / static_cast<double>(column.size());
}

template <class Real>
Gmm2Out<Real> forward_vals(const NetVals<Real>& net, const std::vector<Real>& points) {
    const std::size_t n = points.size();
    const std::size_t feat = static_cast<std::size_t>(net.encoder.back().out);
    std::vector<std::vector<Real>> features(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Real> h{points[i]};
        for (const auto& layer : net.encoder) h = apply_layer(layer, h);
        features[i] = std::move(h);
    }

    std::vector<Real> pooled;
    pooled.reserve(feat);
    std::vector<Real> column(n, points[0]);
    for (std::size_t f = 0; f < feat; ++f) {
        for (std::size_t i = 0; i < n; ++i) column[i] = features[i][f];
        pooled.push_back(pooled_mean(column));
    }

    std::vector<Real> h = pooled;
    for (const auto& layer : net.trunk) h = apply_layer(layer, h);

    std::vector<Real> means = apply_layer(net.mean_head, h);
    std::vector<Real> raw_var = apply_layer(net.var_head, h);
    std::vector<Real> logits = apply_layer(net.resp_head, h);

    Gmm2Out<Real> out{{means[0], means[1]},
                      {softplus(raw_var[0]), softplus(raw_var[1])},
                      {means[0], means[1]}};
    Real mx = maximum(logits[0], logits[1]);
    Real e0 = exp(logits[0] - mx);
    Real e1 = exp(logits[1] - mx);
    Real denom = e0 + e1;
    out.w[0] = e0 / denom;
    out.w[1] = e1 / denom;
    return out;
}

template <class Real, class X>
Real gmm2_log_pdf_t(const Gmm2Out<Real>& p, const X& x) {
    Real l[2] = {p.mu[0], p.mu[1]};
    for (int c = 0; c < 2; ++c) {
        auto d = x - p.mu[c];
        l[c] = log(p.w[c]) - 0.5 * log(kTwoPi * p.var[c]) - d * d / (2.0 * p.var[c]);
    }
    Real mx = maximum(l[0], l[1]);
    return mx + log(exp(l[0] - mx) + exp(l[1] - mx));
}

}  // namespace

ParamVector hypernet_forward(const HyperNet& net, const Dataset& data) {
    validate_dataset(data);
    NetVals<double> vals = net_vals<double>(net, [](double v) { return v; });
    Gmm2Out<double> out = forward_vals(vals, data.points);
    return ParamVector{FamilyTag::gmm2, {out.mu[0], out.mu[1], out.var[0], out.var[1], out.w[0]}};
}

HypernetLoss hypernet_loss(const HyperNet& net, const Dataset& data, double lambda, std::size_t m,
                           const SeededRng& rng, std::vector<double>* gradients) {
    validate_dataset(data);
    if (lambda > 0.0 && m < 1) throw config_error("penalty needs m >= 1 synthetic points");

    ad::Tape tape;
    // Parameter leaves first so gradients can be read back by position.
    NetVals<Var> vals = net_vals<Var>(net, [&](double v) { return ad::make_var(tape, v); });
    const std::size_t param_count = net.parameter_count();

    std::vector<Var> x_vars;
    x_vars.reserve(data.n());
    for (double x : data.points) x_vars.push_back(ad::make_var(tape, x));
    Gmm2Out<Var> hx = forward_vals(vals, x_vars);

    Var total_ll = gmm2_log_pdf_t(hx, data.points[0]);
    for (std::size_t i = 1; i < data.n(); ++i)
        total_ll = total_ll + gmm2_log_pdf_t(hx, data.points[i]);
    Var nll = -(total_ll / static_cast<double>(data.n()));

    Var total = nll;
    HypernetLoss out;
    if (lambda > 0.0) {
        // Reparameterized synthetic set: fixed unit draws, component picked by
        // thresholding against the predicted weight (held constant in the
        // backward pass), gaussian part mu_c + sqrt(var_c) * z.
        Pcg32 eng = rng.engine();
        std::vector<Var> y_vars;
        y_vars.reserve(m);
        double w0 = value_of(hx.w[0]);
        for (std::size_t i = 0; i < m; ++i) {
            double u = eng.next_unit();
            double z = inv_norm_cdf(eng.next_unit());
            int comp = u < w0 ? 0 : 1;
            y_vars.push_back(hx.mu[comp] + sqrt(hx.var[comp]) * z);
        }
        Gmm2Out<Var> hy = forward_vals(vals, y_vars);
        Var d0 = hy.mu[0] - hx.mu[0];
        Var d1 = hy.mu[1] - hx.mu[1];
        Var d2 = hy.var[0] - hx.var[0];
        Var d3 = hy.var[1] - hx.var[1];
        Var d4 = hy.w[0] - hx.w[0];
        Var penalty = d0 * d0 + d1 * d1 + d2 * d2 + d3 * d3 + d4 * d4;
        out.penalty = value_of(penalty);
        total = nll + lambda * penalty;
    }

    out.nll = value_of(nll);
    out.total = value_of(total);
    if (!std::isfinite(out.total)) throw divergence_error("hypernet loss is not finite");

    if (gradients) {
        std::vector<double> adj = tape.gradient(total.idx);
        gradients->assign(adj.begin(), adj.begin() + static_cast<std::ptrdiff_t>(param_count));
    }
    return out;
}

HyperNet train(HyperNet net, const std::function<Dataset(std::size_t)>& provider,
               const TrainConfig& cfg, const SeededRng& rng, std::vector<TrainStep>* curve) {
    if (cfg.steps < 1 || cfg.learning_rate <= 0.0) throw config_error("bad training config");
    std::vector<double*> params = net.parameters();
    const std::size_t count = params.size();
    std::vector<double> grad(count, 0.0), m1(count, 0.0), m2(count, 0.0);

    for (int step = 0; step < cfg.steps; ++step) {
        Dataset data = provider(static_cast<std::size_t>(step));
        std::size_t m = cfg.m > 0 ? cfg.m : data.n();
        HypernetLoss loss =
            hypernet_loss(net, data, cfg.lambda, m, rng.substream(static_cast<std::uint64_t>(step)),
                          &grad);
        if (curve) curve->push_back({step, loss.nll, loss.penalty});

        double t = static_cast<double>(step + 1);
        double corr1 = 1.0 - std::pow(cfg.beta1, t);
        double corr2 = 1.0 - std::pow(cfg.beta2, t);
        for (std::size_t i = 0; i < count; ++i) {
            m1[i] = cfg.beta1 * m1[i] + (1.0 - cfg.beta1) * grad[i];
            m2[i] = cfg.beta2 * m2[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
            double mhat = m1[i] / corr1;
            double vhat = m2[i] / corr2;
            *params[i] -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
    return net;
}

}  // namespace ple
