// network.hpp -- network assembly: an ordered stack of pyramidal layers,
// then dense layers, with a softmax cross-entropy head on the final dense
// layer's outputs (the logits).

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hpnn/dense.hpp"
#include "hpnn/feature_map.hpp"
#include "hpnn/pyramidal.hpp"

namespace hpnn {

struct NetworkSpec {
    int input_height = 1;
    int input_width = 1;
    std::vector<PyramidalLayerSpec> pyramidal;
    // All dense layers including the final logits layer; the last entry's
    // unit count equals n_classes and its activation should be Identity.
    std::vector<DenseLayerSpec> dense;
    int n_classes = 2;
};

// Resolved shapes for every pyramidal layer plus the dense fan-ins.
struct NetworkGeometry {
    std::vector<PyramidalGeometry> pyramidal;
    std::vector<int> dense_fan_in; // one per dense layer
    int flattened = 0;             // size of the last pyramidal output
                                   // (or the input image when no pyramidal
                                   // layers are configured)
};

// Validates the whole chain; throws GeometryMismatch when any layer fails
// or the final dense layer disagrees with n_classes.
NetworkGeometry resolve_network(const NetworkSpec& spec);

// All trainable parameters. GradientSet and the momentum velocity reuse the
// same struct so shape congruence is structural.
struct ParamSet {
    std::vector<PyramidalParams> pyramidal;
    std::vector<DenseParams> dense;
};

using GradientSet = ParamSet;

struct Network {
    NetworkSpec spec;
    ParamSet params;
};

// Glorot-style uniform initialization, fully determined by the seed via
// splitmix64: weights ~ U[-a, a] with a = sqrt(6 / (fan_in + fan_out)),
// biases 0. For a pyramidal layer fan_in = r^2 * K (inputs per neuron) and
// fan_out = r^2 * S * (out_h * out_w) / (in_h * in_w) (average number of
// outgoing connections per input neuron); dense layers use fan_in = inputs,
// fan_out = units.
Network init_params(const NetworkSpec& spec, std::uint64_t seed);

struct LayerParamCount {
    std::string layer;
    std::size_t weights = 0;
    std::size_t biases = 0;
    std::size_t total() const { return weights + biases; }
};

struct ParamCountReport {
    std::vector<LayerParamCount> layers;
    std::size_t total = 0;
};

ParamCountReport count_params(const NetworkSpec& spec);

// Everything the backward pass needs from a forward pass.
struct ForwardTrace {
    std::vector<LayerCache> pyramidal;
    std::vector<DenseCache> dense;
    std::vector<double> logits;
    ClassDistribution probs;
};

// Runs one image (a 1 x H x W map, or K x H x W when feeding intermediate
// maps) through the network. Flattening between the last pyramidal layer
// and the first dense layer is sub-layer-major, then row-major.
ForwardTrace network_forward(const Network& net, const FeatureMap& image);

struct BackwardResult {
    double loss = 0.0;
    GradientSet grads;
};

// Chains softmax-xent, dense_backward, then backprop_sensitivity /
// weight_gradients through every pyramidal layer.
BackwardResult network_backward(const Network& net, const ForwardTrace& trace,
                                int target);

// Shape-congruent zero gradients / velocity for a network.
GradientSet make_zero_gradients(const NetworkSpec& spec);

// The parameter tensors in declaration order (per pyramidal layer weights
// then biases, then per dense layer weights then biases). Used by the
// optimizer, the gradient checker and the serializer so all three agree on
// ordering.
std::vector<std::vector<double>*> parameter_tensors(ParamSet& params);
std::vector<const std::vector<double>*> parameter_tensors(const ParamSet& params);

std::size_t parameter_count(const ParamSet& params);

} // namespace hpnn
