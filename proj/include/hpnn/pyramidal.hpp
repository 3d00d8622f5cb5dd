// pyramidal.hpp -- sub-layered pyramidal layers.
//
// A pyramidal layer maps an input stack of K grids (H_in x W_in) onto S
// output sub-layer grids (H_out x W_out). Each output neuron (s,u,v) is
// connected to an r x r receptive field of the input; adjacent fields
// overlap by o rows/columns, so the stride is g = r - o. Weights are tied
// to input-neuron positions: w[s][k][i][j] multiplies input (k,i,j) for
// every output neuron of sub-layer s whose field covers (i,j). Each
// sub-layer has its own full-input-size weight matrix; setting S = 1
// everywhere recovers the single-weight-per-input-neuron scheme.

#pragma once

#include <cstddef>
#include <vector>

#include "hpnn/feature_map.hpp"

namespace hpnn {

enum class BiasMode {
    PerNeuron,   // one bias per output neuron (s,u,v) -- the default
    PerSubLayer, // one scalar bias per output sub-layer s
};

struct PyramidalLayerSpec {
    int sublayers_out = 1;  // S
    int field_size = 1;     // r, square receptive field in neurons
    int overlap = 0;        // o, 0 <= o < r; stride is r - o
    Activation activation = Activation::Tanh;
    BiasMode bias_mode = BiasMode::PerNeuron;
};

// Output grid extent along one axis: (in_dim - o) / (r - o). The division
// must be exact -- no padding is ever applied; a remainder means the fields
// cannot tile the input and raises GeometryMismatch.
int output_grid_shape(int in_dim, int field_size, int overlap);

// Resolved shapes for one layer instance. Receptive-field bounds and the
// dual cover bounds (which output neurons see a given input neuron) all
// live here; forward and backward index exclusively through these, which
// keeps the two directions mutually consistent.
struct PyramidalGeometry {
    int sublayers_in = 1;  // K
    int in_height = 1;
    int in_width = 1;
    int sublayers_out = 1; // S
    int out_height = 1;
    int out_width = 1;
    int field_size = 1;    // r
    int stride = 1;        // g = r - o

    // Forward: input rows covered by output coordinate u (same for columns).
    int field_lo(int u) const { return u * stride; }
    int field_hi(int u) const { return u * stride + field_size - 1; }

    // Backward: output coordinates whose field covers input row i,
    // clamped to the output grid.
    int cover_lo(int i) const {
        // ceil((i - r + 1) / g); truncation plus the clamp handles the
        // negative numerators that occur for i < r - 1.
        int lo = (i - field_size + stride) / stride;
        return lo > 0 ? lo : 0;
    }
    int cover_hi(int i, int out_dim) const {
        int hi = i / stride;
        return hi < out_dim ? hi : out_dim - 1;
    }

    std::size_t weight_count() const {
        return static_cast<std::size_t>(sublayers_out) * sublayers_in *
               in_height * in_width;
    }
    std::size_t weight_index(int s, int k, int i, int j) const {
        return ((static_cast<std::size_t>(s) * sublayers_in + k) * in_height + i) *
                   in_width + j;
    }
    std::size_t output_count() const {
        return static_cast<std::size_t>(sublayers_out) * out_height * out_width;
    }
};

// Validates the layer against an input shape and resolves all extents.
// Throws GeometryMismatch when the fields do not tile the input.
PyramidalGeometry resolve_geometry(int sublayers_in, int in_height, int in_width,
                                   const PyramidalLayerSpec& spec);

// Weights indexed [s][k][i][j] (sub-layer, input sub-layer, input row,
// input column); biases indexed [s][u][v] for PerNeuron or [s] for
// PerSubLayer. GradientSet entries reuse this struct shape-congruently.
struct PyramidalParams {
    std::vector<double> weights;
    std::vector<double> biases;
};

std::size_t bias_count(const PyramidalGeometry& geom, BiasMode mode);

PyramidalParams make_pyramidal_params(const PyramidalGeometry& geom, BiasMode mode);

struct LayerCache {
    FeatureMap input;          // y^(in), what the layer consumed
    FeatureMap pre_activation; // x, the weighted sums plus bias
    FeatureMap output;         // f(x)
};

// Forward pass:
//   x(s,u,v) = bias(s,u,v) + sum_k sum_{i in field(u)} sum_{j in field(v)}
//              w[s][k][i][j] * input(k,i,j)
//   output   = f(x)
// Implemented as a per-sub-layer elementwise product map reduced over k,
// then window sums; tests hold an independent nested-loop oracle.
LayerCache pyramidal_forward(const FeatureMap& input,
                             const PyramidalLayerSpec& spec,
                             const PyramidalParams& params);

// Sum of delta_out over every output neuron of sub-layer s whose field
// covers input position (i,j). Shared by the input-sensitivity and the
// weight-gradient computations.
FeatureMap cover_sums(const FeatureMap& delta_out, const PyramidalGeometry& geom);

// Error sensitivity of the layer's inputs:
//   delta_in(k,i,j) = f'(prev_pre(k,i,j)) * sum_s w[s][k][i][j]
//                     * sum_{u,v covering (i,j)} delta_out(s,u,v)
// prev_pre is the pre-activation map of the layer that PRODUCED this
// layer's input, and prev_kind its activation (f' does not depend on s, so
// it is hoisted out of the sub-layer sum). Pass Identity with any map to
// obtain plain dE/d(input value).
FeatureMap backprop_sensitivity(const FeatureMap& delta_out,
                                const FeatureMap& prev_pre, Activation prev_kind,
                                const PyramidalLayerSpec& spec,
                                const PyramidalParams& params);

// Parameter gradients:
//   dE/dw[s][k][i][j] = input(k,i,j) * sum_{u,v covering (i,j)} delta_out(s,u,v)
//   dE/dbias(s,u,v)   = delta_out(s,u,v)        (PerNeuron)
//   dE/dbias(s)       = sum_{u,v} delta_out(s,u,v)  (PerSubLayer)
PyramidalParams weight_gradients(const FeatureMap& delta_out,
                                 const FeatureMap& input,
                                 const PyramidalLayerSpec& spec,
                                 const PyramidalParams& params);

} // namespace hpnn
