// feature_map.hpp -- layer activations container, activation functions,
// and the softmax cross-entropy head.

#pragma once

#include <cassert>
#include <cstddef>
#include <string>
#include <vector>

namespace hpnn {

// Activations of one layer: S sub-layer grids of H x W doubles.
// Storage is sub-layer-contiguous, row-major within a sub-layer; that order
// is also the flattening order between the last pyramidal layer and the
// first dense layer.
class FeatureMap {
public:
    FeatureMap() : sublayers_(0), height_(0), width_(0) {}

    FeatureMap(int sublayers, int height, int width, double fill = 0.0)
        : sublayers_(sublayers), height_(height), width_(width),
          values_(static_cast<std::size_t>(sublayers) * height * width, fill) {
        assert(sublayers >= 1 && height >= 1 && width >= 1);
    }

    int sublayers() const { return sublayers_; }
    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const { return values_.size(); }

    double& operator()(int s, int row, int col) {
        return values_[index(s, row, col)];
    }
    double operator()(int s, int row, int col) const {
        return values_[index(s, row, col)];
    }

    std::vector<double>& data() { return values_; }
    const std::vector<double>& data() const { return values_; }

    bool same_shape(const FeatureMap& other) const {
        return sublayers_ == other.sublayers_ && height_ == other.height_ &&
               width_ == other.width_;
    }

private:
    std::size_t index(int s, int row, int col) const {
        assert(s >= 0 && s < sublayers_ && row >= 0 && row < height_ &&
               col >= 0 && col < width_);
        return (static_cast<std::size_t>(s) * height_ + row) * width_ + col;
    }

    int sublayers_;
    int height_;
    int width_;
    std::vector<double> values_;
};

enum class Activation {
    Tanh,
    Logistic,
    Rectifier,
    Identity,
};

std::string activation_name(Activation kind);
Activation activation_from_name(const std::string& name);

double activate(double x, Activation kind);

// Derivative of the activation evaluated at the pre-activation value x.
// The rectifier subgradient at exactly 0 is defined as 0.
double activate_derivative(double x, Activation kind);

FeatureMap apply_activation(const FeatureMap& pre, Activation kind);
FeatureMap activation_derivative_map(const FeatureMap& pre, Activation kind);

// Softmax output: per-class probabilities summing to 1.
using ClassDistribution = std::vector<double>;

struct SoftmaxResult {
    double loss = 0.0;
    ClassDistribution probs;
    std::vector<double> dloss_dlogits; // probs - onehot(target); sums to 0
};

// Max-subtracted softmax with cross-entropy loss against the target class.
// The log argument is clamped at 1e-300 so pathological inputs never produce
// -inf. Throws TargetOutOfRange when target is not a valid class index.
SoftmaxResult softmax_xent(const std::vector<double>& logits, int target);

// Probabilities only (same max-subtracted evaluation), for inference.
ClassDistribution softmax_probs(const std::vector<double>& logits);

} // namespace hpnn
