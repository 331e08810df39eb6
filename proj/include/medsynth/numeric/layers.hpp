#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "medsynth/errors.hpp"
#include "medsynth/numeric/matrix.hpp"
#include "medsynth/numeric/random.hpp"

namespace medsynth {

enum class Activation { Identity, Relu, Tanh, Sigmoid };

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline Vector apply_activation(Activation kind, const Vector& pre) {
    Vector out(pre.size());
    switch (kind) {
        case Activation::Identity:
            out = pre;
            break;
        case Activation::Relu:
            for (std::size_t i = 0; i < pre.size(); ++i) out[i] = std::max(0.0, pre[i]);
            break;
        case Activation::Tanh:
            for (std::size_t i = 0; i < pre.size(); ++i) out[i] = std::tanh(pre[i]);
            break;
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < pre.size(); ++i) out[i] = sigmoid(pre[i]);
            break;
    }
    return out;
}

// Element-wise derivative d activation / d pre_activation.
// The relu derivative at exactly 0 is defined as 0.
inline Vector activation_grad(Activation kind, const Vector& pre) {
    Vector g(pre.size());
    switch (kind) {
        case Activation::Identity:
            std::fill(g.begin(), g.end(), 1.0);
            break;
        case Activation::Relu:
            for (std::size_t i = 0; i < pre.size(); ++i) g[i] = pre[i] > 0.0 ? 1.0 : 0.0;
            break;
        case Activation::Tanh:
            for (std::size_t i = 0; i < pre.size(); ++i) {
                const double t = std::tanh(pre[i]);
                g[i] = 1.0 - t * t;
            }
            break;
        case Activation::Sigmoid:
            for (std::size_t i = 0; i < pre.size(); ++i) {
                const double s = sigmoid(pre[i]);
                g[i] = s * (1.0 - s);
            }
            break;
    }
    return g;
}

// Numerically stable softmax; outputs sum to 1 and are strictly positive
// for logits within double range.
inline Vector softmax(const Vector& logits) {
    Vector out(logits.size());
    double max_logit = logits.empty() ? 0.0 : logits[0];
    for (double z : logits) max_logit = std::max(max_logit, z);
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        out[i] = std::exp(logits[i] - max_logit);
        sum += out[i];
    }
    for (auto& p : out) p /= sum;
    return out;
}

// Fully connected layer: output = activation(W x + b), W is out x in.
struct AffineLayer {
    DenseMatrix weights;
    Vector bias;
    Activation activation = Activation::Identity;

    AffineLayer() = default;
    AffineLayer(std::size_t out_dim, std::size_t in_dim, Activation act)
        : weights(out_dim, in_dim), bias(out_dim, 0.0), activation(act) {}

    std::size_t in_dim() const { return weights.cols; }
    std::size_t out_dim() const { return weights.rows; }
};

// Xavier-uniform weights (limit sqrt(6 / (fan_in + fan_out))), zero biases,
// filled row-major so the draw order is reproducible.
inline AffineLayer init_affine_layer(std::size_t out_dim, std::size_t in_dim,
                                     Activation act, RandomSource& rng) {
    AffineLayer layer(out_dim, in_dim, act);
    const double limit =
        std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
    for (auto& w : layer.weights.entries) w = rng.uniform(-limit, limit);
    return layer;
}

// Per-layer forward record kept for backpropagation.
struct LayerCache {
    Vector input;
    Vector pre_activation;
    Vector output;
};

inline LayerCache affine_forward(const AffineLayer& layer, const Vector& x) {
    LayerCache cache;
    cache.input = x;
    cache.pre_activation = matvec(layer.weights, x);
    if (layer.bias.size() != cache.pre_activation.size())
        throw ShapeError("affine_forward: bias has length " +
                         std::to_string(layer.bias.size()) + " but layer emits " +
                         std::to_string(cache.pre_activation.size()) + " values");
    for (std::size_t i = 0; i < layer.bias.size(); ++i)
        cache.pre_activation[i] += layer.bias[i];
    cache.output = apply_activation(layer.activation, cache.pre_activation);
    return cache;
}

struct LayerGrads {
    DenseMatrix weights;
    Vector bias;
};

inline LayerGrads zero_grads_like(const AffineLayer& layer) {
    return LayerGrads{DenseMatrix(layer.weights.rows, layer.weights.cols),
                      Vector(layer.bias.size(), 0.0)};
}

// Backward through one layer. out_grad is dLoss/d output; accumulates the
// weight and bias gradients into `into` and returns dLoss/d input.
inline Vector affine_backward(const AffineLayer& layer, const LayerCache& cache,
                              const Vector& out_grad, LayerGrads& into) {
    if (out_grad.size() != layer.out_dim())
        throw ShapeError("affine_backward: gradient has length " +
                         std::to_string(out_grad.size()) + " but layer emits " +
                         std::to_string(layer.out_dim()) + " values");
    const Vector act_grad = activation_grad(layer.activation, cache.pre_activation);
    Vector pre_grad(out_grad.size());
    for (std::size_t i = 0; i < out_grad.size(); ++i)
        pre_grad[i] = out_grad[i] * act_grad[i];
    add_outer(into.weights, pre_grad, cache.input);
    for (std::size_t i = 0; i < pre_grad.size(); ++i) into.bias[i] += pre_grad[i];
    return matvec_transposed(layer.weights, pre_grad);
}

struct MlpGradients {
    std::vector<LayerGrads> layers;
    Vector input_grad;
};

// Exact analytic gradients through a chain of affine layers. caches must
// come from a matching forward pass; output_grad is the gradient of the
// scalar loss at the network output. input_grad allows chaining further
// upstream (encoder <- decoder through the reparameterization).
inline MlpGradients mlp_backward(const std::vector<AffineLayer>& layers,
                                 const std::vector<LayerCache>& caches,
                                 const Vector& output_grad) {
    if (layers.size() != caches.size())
        throw ShapeError("mlp_backward: " + std::to_string(layers.size()) +
                         " layers but " + std::to_string(caches.size()) + " caches");
    MlpGradients grads;
    grads.layers.reserve(layers.size());
    for (const auto& layer : layers) grads.layers.push_back(zero_grads_like(layer));
    Vector g = output_grad;
    for (std::size_t i = layers.size(); i > 0; --i)
        g = affine_backward(layers[i - 1], caches[i - 1], g, grads.layers[i - 1]);
    grads.input_grad = std::move(g);
    return grads;
}

}  // namespace medsynth
