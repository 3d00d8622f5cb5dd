#include "hpnn/network.hpp"

#include <cmath>
#include <string>

#include "hpnn/error.hpp"
#include "hpnn/rng.hpp"

namespace hpnn {

NetworkGeometry resolve_network(const NetworkSpec& spec) {
    if (spec.input_height < 1 || spec.input_width < 1) {
        throw GeometryMismatch("network input size must be positive");
    }
    if (spec.n_classes < 2) {
        throw GeometryMismatch("network needs at least 2 classes");
    }
    // A dense-free spec is allowed for counting/initialization; forward
    // requires the classification head.
    if (!spec.dense.empty() && spec.dense.back().units != spec.n_classes) {
        throw GeometryMismatch("final dense layer has " +
                               std::to_string(spec.dense.back().units) +
                               " units but the network declares " +
                               std::to_string(spec.n_classes) + " classes");
    }

    NetworkGeometry geom;
    int k = 1;
    int h = spec.input_height;
    int w = spec.input_width;
    for (const PyramidalLayerSpec& layer : spec.pyramidal) {
        PyramidalGeometry g = resolve_geometry(k, h, w, layer);
        geom.pyramidal.push_back(g);
        k = g.sublayers_out;
        h = g.out_height;
        w = g.out_width;
    }
    geom.flattened = k * h * w;

    int fan_in = geom.flattened;
    for (const DenseLayerSpec& layer : spec.dense) {
        if (layer.units < 1) {
            throw GeometryMismatch("dense layer unit count must be >= 1");
        }
        geom.dense_fan_in.push_back(fan_in);
        fan_in = layer.units;
    }
    return geom;
}

Network init_params(const NetworkSpec& spec, std::uint64_t seed) {
    const NetworkGeometry geom = resolve_network(spec);
    SplitMix64 rng(seed);

    Network net;
    net.spec = spec;
    for (std::size_t l = 0; l < spec.pyramidal.size(); ++l) {
        const PyramidalGeometry& g = geom.pyramidal[l];
        const double r2 = static_cast<double>(g.field_size) * g.field_size;
        const double fan_in = r2 * g.sublayers_in;
        // Average outgoing connections per input neuron: every output
        // neuron has r^2 inputs per input sub-layer, spread over the
        // in_h * in_w weight positions of each of the S sub-layers.
        const double fan_out = r2 * g.sublayers_out *
                               (static_cast<double>(g.out_height) * g.out_width) /
                               (static_cast<double>(g.in_height) * g.in_width);
        const double a = std::sqrt(6.0 / (fan_in + fan_out));
        PyramidalParams p = make_pyramidal_params(geom.pyramidal[l],
                                                  spec.pyramidal[l].bias_mode);
        for (double& wv : p.weights) wv = rng.uniform(-a, a);
        net.params.pyramidal.push_back(std::move(p));
    }
    for (std::size_t l = 0; l < spec.dense.size(); ++l) {
        const int fan_in = geom.dense_fan_in[l];
        const int units = spec.dense[l].units;
        const double a = std::sqrt(6.0 / (fan_in + units));
        DenseParams p = make_dense_params(units, fan_in);
        for (double& wv : p.weights) wv = rng.uniform(-a, a);
        net.params.dense.push_back(std::move(p));
    }
    return net;
}

ParamCountReport count_params(const NetworkSpec& spec) {
    const NetworkGeometry geom = resolve_network(spec);
    ParamCountReport report;
    for (std::size_t l = 0; l < spec.pyramidal.size(); ++l) {
        LayerParamCount c;
        c.layer = "pyramidal" + std::to_string(l + 1);
        c.weights = geom.pyramidal[l].weight_count();
        c.biases = bias_count(geom.pyramidal[l], spec.pyramidal[l].bias_mode);
        report.total += c.total();
        report.layers.push_back(std::move(c));
    }
    for (std::size_t l = 0; l < spec.dense.size(); ++l) {
        LayerParamCount c;
        c.layer = "dense" + std::to_string(l + 1);
        c.weights = static_cast<std::size_t>(spec.dense[l].units) *
                    geom.dense_fan_in[l];
        c.biases = static_cast<std::size_t>(spec.dense[l].units);
        report.total += c.total();
        report.layers.push_back(std::move(c));
    }
    return report;
}

ForwardTrace network_forward(const Network& net, const FeatureMap& image) {
    const NetworkSpec& spec = net.spec;
    if (spec.dense.empty()) {
        throw GeometryMismatch("network has no dense head to produce logits");
    }
    if (spec.pyramidal.empty()) {
        if (image.sublayers() * image.height() * image.width() !=
            resolve_network(spec).flattened) {
            throw ShapeMismatch("image does not match network input size");
        }
    } else if (image.height() != spec.input_height ||
               image.width() != spec.input_width) {
        throw ShapeMismatch(
            "image " + std::to_string(image.height()) + "x" +
            std::to_string(image.width()) + " does not match network input " +
            std::to_string(spec.input_height) + "x" +
            std::to_string(spec.input_width));
    }

    ForwardTrace trace;
    const FeatureMap* current = &image;
    for (std::size_t l = 0; l < spec.pyramidal.size(); ++l) {
        trace.pyramidal.push_back(
            pyramidal_forward(*current, spec.pyramidal[l], net.params.pyramidal[l]));
        current = &trace.pyramidal.back().output;
    }

    // Flatten sub-layer-major then row-major -- exactly the storage order.
    std::vector<double> vec = current->data();
    for (std::size_t l = 0; l < spec.dense.size(); ++l) {
        trace.dense.push_back(dense_forward(vec, spec.dense[l], net.params.dense[l]));
        vec = trace.dense.back().output;
    }

    trace.logits = trace.dense.back().output;
    trace.probs = softmax_probs(trace.logits);
    return trace;
}

BackwardResult network_backward(const Network& net, const ForwardTrace& trace,
                                int target) {
    const NetworkSpec& spec = net.spec;
    BackwardResult result;
    result.grads.pyramidal.resize(spec.pyramidal.size());
    result.grads.dense.resize(spec.dense.size());

    const SoftmaxResult sm = softmax_xent(trace.logits, target);
    result.loss = sm.loss;

    // Sensitivity of the final dense layer's pre-activations.
    std::vector<double> delta = sm.dloss_dlogits;
    {
        const DenseCache& last = trace.dense.back();
        const Activation kind = spec.dense.back().activation;
        for (std::size_t i = 0; i < delta.size(); ++i) {
            delta[i] *= activate_derivative(last.pre_activation[i], kind);
        }
    }

    std::vector<double> delta_flat; // dE/d(flattened pyramidal output)
    for (std::size_t l = spec.dense.size(); l-- > 0;) {
        DenseBackward back = dense_backward(delta, trace.dense[l], net.params.dense[l]);
        result.grads.dense[l] = std::move(back.grads);
        if (l > 0) {
            delta = std::move(back.delta_input);
            const DenseCache& prev = trace.dense[l - 1];
            const Activation kind = spec.dense[l - 1].activation;
            for (std::size_t i = 0; i < delta.size(); ++i) {
                delta[i] *= activate_derivative(prev.pre_activation[i], kind);
            }
        } else {
            delta_flat = std::move(back.delta_input);
        }
    }

    if (spec.pyramidal.empty()) {
        return result;
    }

    // Unflatten onto the last pyramidal layer and fold in its f'.
    const LayerCache& last = trace.pyramidal.back();
    FeatureMap delta_map(last.output.sublayers(), last.output.height(),
                         last.output.width());
    for (std::size_t i = 0; i < delta_flat.size(); ++i) {
        delta_map.data()[i] =
            delta_flat[i] *
            activate_derivative(last.pre_activation.data()[i],
                                spec.pyramidal.back().activation);
    }

    for (std::size_t l = spec.pyramidal.size(); l-- > 0;) {
        result.grads.pyramidal[l] =
            weight_gradients(delta_map, trace.pyramidal[l].input,
                             spec.pyramidal[l], net.params.pyramidal[l]);
        if (l > 0) {
            delta_map = backprop_sensitivity(
                delta_map, trace.pyramidal[l - 1].pre_activation,
                spec.pyramidal[l - 1].activation, spec.pyramidal[l],
                net.params.pyramidal[l]);
        }
    }
    return result;
}

GradientSet make_zero_gradients(const NetworkSpec& spec) {
    const NetworkGeometry geom = resolve_network(spec);
    GradientSet grads;
    for (std::size_t l = 0; l < spec.pyramidal.size(); ++l) {
        grads.pyramidal.push_back(
            make_pyramidal_params(geom.pyramidal[l], spec.pyramidal[l].bias_mode));
    }
    for (std::size_t l = 0; l < spec.dense.size(); ++l) {
        grads.dense.push_back(
            make_dense_params(spec.dense[l].units, geom.dense_fan_in[l]));
    }
    return grads;
}

std::vector<std::vector<double>*> parameter_tensors(ParamSet& params) {
    std::vector<std::vector<double>*> tensors;
    for (PyramidalParams& p : params.pyramidal) {
        tensors.push_back(&p.weights);
        tensors.push_back(&p.biases);
    }
    for (DenseParams& p : params.dense) {
        tensors.push_back(&p.weights);
        tensors.push_back(&p.biases);
    }
    return tensors;
}

std::vector<const std::vector<double>*> parameter_tensors(const ParamSet& params) {
    std::vector<const std::vector<double>*> tensors;
    for (const PyramidalParams& p : params.pyramidal) {
        tensors.push_back(&p.weights);
        tensors.push_back(&p.biases);
    }
    for (const DenseParams& p : params.dense) {
        tensors.push_back(&p.weights);
        tensors.push_back(&p.biases);
    }
    return tensors;
}

std::size_t parameter_count(const ParamSet& params) {
    std::size_t n = 0;
    for (const auto* t : parameter_tensors(params)) n += t->size();
    return n;
}

} // namespace hpnn
