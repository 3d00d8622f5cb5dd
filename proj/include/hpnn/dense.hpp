// dense.hpp -- fully connected layers for the classification head.

#pragma once

#include <vector>

#include "hpnn/feature_map.hpp"

namespace hpnn {

struct DenseLayerSpec {
    int units = 1;
    Activation activation = Activation::Tanh;
};

// weights indexed [unit][input]; biases indexed [unit].
struct DenseParams {
    std::vector<double> weights;
    std::vector<double> biases;
};

DenseParams make_dense_params(int units, int fan_in);

struct DenseCache {
    std::vector<double> input;
    std::vector<double> pre_activation;
    std::vector<double> output;
};

// out = f(W * input + b). Throws ShapeMismatch when params disagree with
// the input length.
DenseCache dense_forward(const std::vector<double>& input,
                         const DenseLayerSpec& spec, const DenseParams& params);

struct DenseBackward {
    std::vector<double> delta_input; // dE/d(input value), i.e. W^T * delta
    DenseParams grads;               // dE/dW = delta x input, dE/db = delta
};

// delta_pre is the sensitivity of this layer's pre-activations (dE/dx).
DenseBackward dense_backward(const std::vector<double>& delta_pre,
                             const DenseCache& cache, const DenseParams& params);

} // namespace hpnn
