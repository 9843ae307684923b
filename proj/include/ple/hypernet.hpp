#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ple/distributions.hpp"
#include "ple/rng.hpp"

namespace ple {

enum class Activation { identity, relu };

struct DenseLayer {
    int in = 0;
    int out = 0;
    Activation act = Activation::identity;
    std::vector<double> weights;  // row-major, out x in
    std::vector<double> bias;
};

/// Permutation-invariant set encoder predicting gmm2 parameters:
/// a per-point encoder, mean pooling, a shared trunk and three branch heads
/// (means linear, variances through softplus, responsibilities through
/// softmax). Pooling sums features in sorted value order, so shuffling the
/// data cannot change the output even at the last bit.
struct HyperNet {
    std::vector<DenseLayer> encoder;  // 1 -> hidden -> ... (relu)
    std::vector<DenseLayer> trunk;    // hidden -> hidden (relu)
    DenseLayer mean_head;             // hidden -> 2
    DenseLayer var_head;              // hidden -> 2, softplus outside
    DenseLayer resp_head;             // hidden -> 2, softmax outside

    /// Three encoder layers and a two-layer trunk at the given hidden width,
    /// weights uniform in +/- 1/sqrt(fan_in).
    static HyperNet init(int hidden, const SeededRng& rng);

    std::size_t parameter_count() const;
    std::vector<double*> parameters();
    std::vector<const double*> parameters() const;
    /// (name, tensor) pairs in parameter order, for checkpoints.
    std::vector<std::pair<std::string, const std::vector<double>*>> named_tensors() const;
};

/// Forward pass on plain doubles; output is a valid gmm2 parameter vector.
ParamVector hypernet_forward(const HyperNet& net, const Dataset& data);

struct HypernetLoss {
    double total = 0.0;
    double nll = 0.0;      // negative mean log-likelihood of the data
    double penalty = 0.0;  // squared parameter drift under self-resampling
};

/// Penalized loss: nll + lambda * ||H(Y) - H(X)||^2 with Y of size m drawn
/// from the predicted mixture by reparameterized draws (fixed unit bank from
/// rng; the component indicator is treated as constant in the backward pass).
/// When gradients is non-null it is filled in parameters() order.
/// Throws divergence_error on a non-finite loss.
HypernetLoss hypernet_loss(const HyperNet& net, const Dataset& data, double lambda, std::size_t m,
                           const SeededRng& rng, std::vector<double>* gradients);

struct TrainConfig {
    int steps = 1500;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double lambda = 0.1;
    std::size_t m = 0;  // synthetic points per step; 0 means match the dataset size
};

struct TrainStep {
    int step = 0;
    double nll = 0.0;
    double penalty = 0.0;
};

/// Adam training loop; provider(step) supplies the dataset for that step.
/// Deterministic given rng. Throws divergence_error when the loss leaves the
/// finite range.
HyperNet train(HyperNet net, const std::function<Dataset(std::size_t)>& provider,
               const TrainConfig& cfg, const SeededRng& rng,
               std::vector<TrainStep>* curve = nullptr);

}  // namespace ple
