#include "hpnn/feature_map.hpp"

#include <algorithm>
#include <cmath>

#include "hpnn/error.hpp"

namespace hpnn {

std::string activation_name(Activation kind) {
    switch (kind) {
    case Activation::Tanh:      return "tanh";
    case Activation::Logistic:  return "logistic";
    case Activation::Rectifier: return "rectifier";
    case Activation::Identity:  return "identity";
    }
    return "unknown";
}

Activation activation_from_name(const std::string& name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "logistic" || name == "sigmoid") return Activation::Logistic;
    if (name == "rectifier" || name == "relu") return Activation::Rectifier;
    if (name == "identity" || name == "linear") return Activation::Identity;
    throw ParseError("unknown activation name: '" + name + "'");
}

double activate(double x, Activation kind) {
    switch (kind) {
    case Activation::Tanh:      return std::tanh(x);
    case Activation::Logistic:  return 1.0 / (1.0 + std::exp(-x));
    case Activation::Rectifier: return x > 0.0 ? x : 0.0;
    case Activation::Identity:  return x;
    }
    return x;
}

double activate_derivative(double x, Activation kind) {
    switch (kind) {
    case Activation::Tanh: {
        double t = std::tanh(x);
        return 1.0 - t * t;
    }
    case Activation::Logistic: {
        double s = 1.0 / (1.0 + std::exp(-x));
        return s * (1.0 - s);
    }
    case Activation::Rectifier:
        return x > 0.0 ? 1.0 : 0.0; // f'(0) defined as 0
    case Activation::Identity:
        return 1.0;
    }
    return 1.0;
}

FeatureMap apply_activation(const FeatureMap& pre, Activation kind) {
    FeatureMap out = pre;
    for (double& v : out.data()) v = activate(v, kind);
    return out;
}

FeatureMap activation_derivative_map(const FeatureMap& pre, Activation kind) {
    FeatureMap out = pre;
    for (double& v : out.data()) v = activate_derivative(v, kind);
    return out;
}

SoftmaxResult softmax_xent(const std::vector<double>& logits, int target) {
    const std::size_t n = logits.size();
    if (n < 2) {
        throw ShapeMismatch("softmax_xent needs at least 2 classes, got " +
                            std::to_string(n));
    }
    if (target < 0 || static_cast<std::size_t>(target) >= n) {
        throw TargetOutOfRange("target class " + std::to_string(target) +
                               " out of range for " + std::to_string(n) +
                               " classes");
    }

    SoftmaxResult result;
    result.probs.resize(n);

    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        result.probs[i] = std::exp(logits[i] - max_logit);
        sum += result.probs[i];
    }
    for (double& p : result.probs) p /= sum;

    result.loss = -std::log(std::max(result.probs[target], 1e-300));

    result.dloss_dlogits = result.probs;
    result.dloss_dlogits[target] -= 1.0;
    return result;
}

ClassDistribution softmax_probs(const std::vector<double>& logits) {
    if (logits.empty()) {
        throw ShapeMismatch("softmax_probs on empty logits");
    }
    ClassDistribution probs(logits.size());
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - max_logit);
        sum += probs[i];
    }
    for (double& p : probs) p /= sum;
    return probs;
}

} // namespace hpnn
