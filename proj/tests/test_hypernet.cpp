#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "ple/gmm_lab.hpp"
#include "ple/hypernet.hpp"

using namespace ple;

namespace {
SeededRng rng(std::uint64_t seed) { return SeededRng{seed, 0}; }

Dataset gmm_data(double w1, std::size_t n, std::uint64_t seed) {
    return sample(ParamVector{FamilyTag::gmm2, {0.0, 2.0, 1.0, 1.0, w1}}, n, rng(seed));
}
}

TEST_CASE("forward output is always a valid gmm2 parameter vector") {
    for (std::uint64_t trial = 0; trial < 10000; ++trial) {
        HyperNet net = HyperNet::init(8, rng(100).substream(trial));
        std::size_t n = 1 + trial % 64;
        Dataset data = gmm_data(0.5, n, 1000 + trial);
        ParamVector p = hypernet_forward(net, data);
        REQUIRE(p.values.size() == 5);
        CHECK(p.values[2] > 0.0);
        CHECK(p.values[3] > 0.0);
        CHECK(p.values[4] >= 0.0);
        CHECK(p.values[4] <= 1.0);
        for (double v : p.values) CHECK(std::isfinite(v));
    }
}

TEST_CASE("forward is exactly permutation invariant") {
    HyperNet net = HyperNet::init(8, rng(7));
    Dataset data = gmm_data(0.7, 40, 11);
    std::vector<double> expected = hypernet_forward(net, data).values;
    Pcg32 eng = rng(12).engine();
    Dataset shuffled = data;
    for (int round = 0; round < 100; ++round) {
        for (std::size_t i = shuffled.n() - 1; i > 0; --i) {
            std::size_t j = eng.next_u64() % (i + 1);
            std::swap(shuffled.points[i], shuffled.points[j]);
        }
        CHECK(hypernet_forward(net, shuffled).values == expected);
    }
}

TEST_CASE("zero weights leave softmax responsibilities at one half") {
    HyperNet net = HyperNet::init(8, rng(3));
    for (auto params = net.parameters(); double* p : params) *p = 0.0;
    ParamVector out = hypernet_forward(net, gmm_data(0.5, 16, 21));
    CHECK(out.values[4] == 0.5);
    // biases only: both branch outputs collapse to the bias image of zero
    CHECK(out.values[0] == out.values[1]);
}

TEST_CASE("forward handles any dataset size without reconfiguration") {
    HyperNet net = HyperNet::init(8, rng(5));
    for (std::size_t n : {1ul, 2ul, 7ul, 200ul}) {
        ParamVector p = hypernet_forward(net, gmm_data(0.9, n, 31 + n));
        CHECK(p.values[2] > 0.0);
    }
}

TEST_CASE("analytic gradients match central differences") {
    HyperNet net = HyperNet::init(8, rng(9));
    Dataset data = gmm_data(0.7, 24, 41);
    const double lambda = 0.1;
    const std::size_t m = 24;
    SeededRng loss_rng = rng(42);

    std::vector<double> grad;
    hypernet_loss(net, data, lambda, m, loss_rng, &grad);

    std::vector<double*> params = net.parameters();
    REQUIRE(grad.size() == params.size());

    // Probe a slice that covers every layer and head at least once.
    std::vector<std::size_t> probes;
    {
        auto tensors = net.named_tensors();
        std::size_t offset = 0;
        Pcg32 eng = rng(43).engine();
        for (const auto& [name, tensor] : tensors) {
            probes.push_back(offset + eng.next_u64() % tensor->size());
            offset += tensor->size();
        }
    }

    const double step = 1e-5;
    for (std::size_t idx : probes) {
        double* p = params[idx];
        double saved = *p;
        *p = saved + step;
        double up = hypernet_loss(net, data, lambda, m, loss_rng, nullptr).total;
        *p = saved - step;
        double down = hypernet_loss(net, data, lambda, m, loss_rng, nullptr).total;
        *p = saved;
        double fd = (up - down) / (2.0 * step);
        double denom = std::max({1e-6, std::fabs(fd), std::fabs(grad[idx])});
        CHECK(std::fabs(fd - grad[idx]) / denom < 1e-4);
    }
}

TEST_CASE("lambda zero reduces the loss to the bare negative log-likelihood") {
    HyperNet net = HyperNet::init(8, rng(13));
    Dataset data = gmm_data(0.6, 20, 51);
    HypernetLoss with = hypernet_loss(net, data, 0.1, 20, rng(52), nullptr);
    HypernetLoss without = hypernet_loss(net, data, 0.0, 20, rng(52), nullptr);
    CHECK(without.total == without.nll);
    CHECK(without.penalty == 0.0);
    ParamVector predicted = hypernet_forward(net, data);
    double direct = -log_likelihood(predicted, data) / static_cast<double>(data.n());
    CHECK(without.nll == doctest::Approx(direct).epsilon(1e-12));
    CHECK(with.total == doctest::Approx(with.nll + 0.1 * with.penalty));
}

TEST_CASE("duplicating every point leaves the pooled feature unchanged") {
    HyperNet net = HyperNet::init(8, rng(15));
    Dataset data = gmm_data(0.6, 12, 61);
    Dataset doubled;
    doubled.points = data.points;
    doubled.points.insert(doubled.points.end(), data.points.begin(), data.points.end());
    std::vector<double> a = hypernet_forward(net, data).values;
    std::vector<double> b = hypernet_forward(net, doubled).values;
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
    double nll_a = hypernet_loss(net, data, 0.0, 1, rng(62), nullptr).nll;
    double nll_b = hypernet_loss(net, doubled, 0.0, 1, rng(62), nullptr).nll;
    CHECK(nll_a == doctest::Approx(nll_b).epsilon(1e-12));
}

TEST_CASE("training descends and is reproducible") {
    ParamVector truth{FamilyTag::gmm2, {0.0, 2.0, 1.0, 1.0, 0.5}};
    auto provider = [&](std::size_t step) { return sample(truth, 50, rng(70).substream(step)); };

    TrainConfig cfg;
    cfg.steps = 300;
    std::vector<TrainStep> curve;
    HyperNet net = HyperNet::init(8, rng(71));
    HyperNet trained = train(net, provider, cfg, rng(72), &curve);
    REQUIRE(curve.size() == 300);
    double head = 0.0, tail = 0.0;
    for (int i = 0; i < 30; ++i) {
        head += curve[i].nll;
        tail += curve[curve.size() - 1 - i].nll;
    }
    CHECK(tail < head);

    HyperNet again = train(net, provider, cfg, rng(72), nullptr);
    auto pa = trained.parameters();
    auto pb = again.parameters();
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(*pa[i] == *pb[i]);
}

TEST_CASE("penalty weight helps on imbalanced low-count data") {
    // Amortized regime: two identically seeded trainings, one with the
    // autophagy penalty and one without, scored by KL to the truth over 50
    // held-out datasets.
    ParamVector truth{FamilyTag::gmm2, {0.0, 2.0, 1.0, 1.0, 0.9}};
    const std::size_t n = 50;
    auto provider = [&](std::size_t step) { return sample(truth, n, rng(80).substream(step)); };

    TrainConfig base;
    base.steps = 1500;
    TrainConfig penalized = base;
    penalized.lambda = 0.1;
    TrainConfig plain = base;
    plain.lambda = 0.0;

    HyperNet init = HyperNet::init(8, rng(81));
    HyperNet with = train(init, provider, penalized, rng(82), nullptr);
    HyperNet without = train(init, provider, plain, rng(82), nullptr);

    double kl_with = 0.0, kl_without = 0.0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        Dataset eval = sample(truth, n, rng(83).substream(s));
        SeededRng kl_rng = rng(84).substream(s);
        kl_with += kl_divergence(hypernet_forward(with, eval), truth, 20000, kl_rng).value;
        kl_without += kl_divergence(hypernet_forward(without, eval), truth, 20000, kl_rng).value;
    }
    CHECK(kl_with / 50.0 < kl_without / 50.0);
}
