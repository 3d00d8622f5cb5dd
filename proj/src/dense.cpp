#include "hpnn/dense.hpp"

#include <string>

#include "hpnn/error.hpp"

namespace hpnn {

DenseParams make_dense_params(int units, int fan_in) {
    DenseParams p;
    p.weights.assign(static_cast<std::size_t>(units) * fan_in, 0.0);
    p.biases.assign(static_cast<std::size_t>(units), 0.0);
    return p;
}

DenseCache dense_forward(const std::vector<double>& input,
                         const DenseLayerSpec& spec, const DenseParams& params) {
    const std::size_t fan_in = input.size();
    const std::size_t units = params.biases.size();
    if (units != static_cast<std::size_t>(spec.units) ||
        params.weights.size() != units * fan_in || fan_in == 0) {
        throw ShapeMismatch("dense params do not match input of size " +
                            std::to_string(fan_in) + " and " +
                            std::to_string(spec.units) + " units");
    }

    DenseCache cache;
    cache.input = input;
    cache.pre_activation.resize(units);
    cache.output.resize(units);
    for (std::size_t n = 0; n < units; ++n) {
        double acc = params.biases[n];
        const double* row = &params.weights[n * fan_in];
        for (std::size_t m = 0; m < fan_in; ++m) {
            acc += row[m] * input[m];
        }
        cache.pre_activation[n] = acc;
        cache.output[n] = activate(acc, spec.activation);
    }
    return cache;
}

DenseBackward dense_backward(const std::vector<double>& delta_pre,
                             const DenseCache& cache, const DenseParams& params) {
    const std::size_t fan_in = cache.input.size();
    const std::size_t units = params.biases.size();
    if (delta_pre.size() != units || params.weights.size() != units * fan_in) {
        throw ShapeMismatch("dense backward shapes disagree");
    }

    DenseBackward back;
    back.delta_input.assign(fan_in, 0.0);
    back.grads.weights.resize(units * fan_in);
    back.grads.biases.resize(units);
    for (std::size_t n = 0; n < units; ++n) {
        const double d = delta_pre[n];
        back.grads.biases[n] = d;
        const double* row = &params.weights[n * fan_in];
        double* grow = &back.grads.weights[n * fan_in];
        for (std::size_t m = 0; m < fan_in; ++m) {
            grow[m] = d * cache.input[m];
            back.delta_input[m] += row[m] * d;
        }
    }
    return back;
}

} // namespace hpnn
