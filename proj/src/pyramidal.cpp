#include "hpnn/pyramidal.hpp"

#include <string>

#include "hpnn/error.hpp"

namespace hpnn {

int output_grid_shape(int in_dim, int field_size, int overlap) {
    if (field_size < 1 || field_size > in_dim) {
        throw GeometryMismatch("field size " + std::to_string(field_size) +
                               " invalid for input extent " +
                               std::to_string(in_dim));
    }
    if (overlap < 0 || overlap >= field_size) {
        throw GeometryMismatch("overlap " + std::to_string(overlap) +
                               " must satisfy 0 <= o < r (r = " +
                               std::to_string(field_size) + ")");
    }
    const int stride = field_size - overlap;
    if ((in_dim - overlap) % stride != 0) {
        throw GeometryMismatch(
            "fields of size " + std::to_string(field_size) + " with overlap " +
            std::to_string(overlap) + " do not tile an input of extent " +
            std::to_string(in_dim) + " ((" + std::to_string(in_dim) + " - " +
            std::to_string(overlap) + ") mod " + std::to_string(stride) +
            " != 0)");
    }
    return (in_dim - overlap) / stride;
}

PyramidalGeometry resolve_geometry(int sublayers_in, int in_height, int in_width,
                                   const PyramidalLayerSpec& spec) {
    if (sublayers_in < 1 || in_height < 1 || in_width < 1) {
        throw GeometryMismatch("pyramidal layer input shape must be positive");
    }
    if (spec.sublayers_out < 1) {
        throw GeometryMismatch("sub-layer count must be >= 1, got " +
                               std::to_string(spec.sublayers_out));
    }
    PyramidalGeometry geom;
    geom.sublayers_in = sublayers_in;
    geom.in_height = in_height;
    geom.in_width = in_width;
    geom.sublayers_out = spec.sublayers_out;
    geom.field_size = spec.field_size;
    geom.stride = spec.field_size - spec.overlap;
    geom.out_height = output_grid_shape(in_height, spec.field_size, spec.overlap);
    geom.out_width = output_grid_shape(in_width, spec.field_size, spec.overlap);
    return geom;
}

std::size_t bias_count(const PyramidalGeometry& geom, BiasMode mode) {
    return mode == BiasMode::PerNeuron ? geom.output_count()
                                       : static_cast<std::size_t>(geom.sublayers_out);
}

PyramidalParams make_pyramidal_params(const PyramidalGeometry& geom, BiasMode mode) {
    PyramidalParams p;
    p.weights.assign(geom.weight_count(), 0.0);
    p.biases.assign(bias_count(geom, mode), 0.0);
    return p;
}

namespace {

PyramidalGeometry checked_geometry(const FeatureMap& input,
                                   const PyramidalLayerSpec& spec,
                                   const PyramidalParams& params) {
    PyramidalGeometry geom =
        resolve_geometry(input.sublayers(), input.height(), input.width(), spec);
    if (params.weights.size() != geom.weight_count() ||
        params.biases.size() != bias_count(geom, spec.bias_mode)) {
        throw ShapeMismatch(
            "pyramidal params (" + std::to_string(params.weights.size()) +
            " weights, " + std::to_string(params.biases.size()) +
            " biases) do not match input " + std::to_string(input.sublayers()) +
            "x" + std::to_string(input.height()) + "x" +
            std::to_string(input.width()) + " with S=" +
            std::to_string(spec.sublayers_out));
    }
    return geom;
}

} // namespace

LayerCache pyramidal_forward(const FeatureMap& input,
                             const PyramidalLayerSpec& spec,
                             const PyramidalParams& params) {
    const PyramidalGeometry geom = checked_geometry(input, spec, params);
    const int K = geom.sublayers_in;
    const int S = geom.sublayers_out;

    LayerCache cache;
    cache.input = input;
    cache.pre_activation = FeatureMap(S, geom.out_height, geom.out_width);

    // Per sub-layer: fold the input sub-layers into one weighted map, then
    // sum r x r windows of it.
    FeatureMap weighted(1, geom.in_height, geom.in_width);
    for (int s = 0; s < S; ++s) {
        for (int i = 0; i < geom.in_height; ++i) {
            for (int j = 0; j < geom.in_width; ++j) {
                double acc = 0.0;
                for (int k = 0; k < K; ++k) {
                    acc += params.weights[geom.weight_index(s, k, i, j)] *
                           input(k, i, j);
                }
                weighted(0, i, j) = acc;
            }
        }
        for (int u = 0; u < geom.out_height; ++u) {
            for (int v = 0; v < geom.out_width; ++v) {
                double acc =
                    spec.bias_mode == BiasMode::PerNeuron
                        ? params.biases[(static_cast<std::size_t>(s) *
                                         geom.out_height + u) * geom.out_width + v]
                        : params.biases[s];
                for (int i = geom.field_lo(u); i <= geom.field_hi(u); ++i) {
                    for (int j = geom.field_lo(v); j <= geom.field_hi(v); ++j) {
                        acc += weighted(0, i, j);
                    }
                }
                cache.pre_activation(s, u, v) = acc;
            }
        }
    }

    cache.output = apply_activation(cache.pre_activation, spec.activation);
    return cache;
}

FeatureMap cover_sums(const FeatureMap& delta_out, const PyramidalGeometry& geom) {
    if (delta_out.sublayers() != geom.sublayers_out ||
        delta_out.height() != geom.out_height ||
        delta_out.width() != geom.out_width) {
        throw ShapeMismatch("delta map does not match layer output shape");
    }
    FeatureMap sums(geom.sublayers_out, geom.in_height, geom.in_width);
    for (int s = 0; s < geom.sublayers_out; ++s) {
        for (int i = 0; i < geom.in_height; ++i) {
            const int u_lo = geom.cover_lo(i);
            const int u_hi = geom.cover_hi(i, geom.out_height);
            for (int j = 0; j < geom.in_width; ++j) {
                const int v_lo = geom.cover_lo(j);
                const int v_hi = geom.cover_hi(j, geom.out_width);
                double acc = 0.0;
                for (int u = u_lo; u <= u_hi; ++u) {
                    for (int v = v_lo; v <= v_hi; ++v) {
                        acc += delta_out(s, u, v);
                    }
                }
                sums(s, i, j) = acc;
            }
        }
    }
    return sums;
}

FeatureMap backprop_sensitivity(const FeatureMap& delta_out,
                                const FeatureMap& prev_pre, Activation prev_kind,
                                const PyramidalLayerSpec& spec,
                                const PyramidalParams& params) {
    const PyramidalGeometry geom = checked_geometry(prev_pre, spec, params);
    const FeatureMap sums = cover_sums(delta_out, geom);

    FeatureMap delta_in(geom.sublayers_in, geom.in_height, geom.in_width);
    for (int k = 0; k < geom.sublayers_in; ++k) {
        for (int i = 0; i < geom.in_height; ++i) {
            for (int j = 0; j < geom.in_width; ++j) {
                double acc = 0.0;
                for (int s = 0; s < geom.sublayers_out; ++s) {
                    acc += params.weights[geom.weight_index(s, k, i, j)] *
                           sums(s, i, j);
                }
                delta_in(k, i, j) =
                    activate_derivative(prev_pre(k, i, j), prev_kind) * acc;
            }
        }
    }
    return delta_in;
}

PyramidalParams weight_gradients(const FeatureMap& delta_out,
                                 const FeatureMap& input,
                                 const PyramidalLayerSpec& spec,
                                 const PyramidalParams& params) {
    const PyramidalGeometry geom = checked_geometry(input, spec, params);
    const FeatureMap sums = cover_sums(delta_out, geom);

    PyramidalParams grads = make_pyramidal_params(geom, spec.bias_mode);
    for (int s = 0; s < geom.sublayers_out; ++s) {
        for (int k = 0; k < geom.sublayers_in; ++k) {
            for (int i = 0; i < geom.in_height; ++i) {
                for (int j = 0; j < geom.in_width; ++j) {
                    grads.weights[geom.weight_index(s, k, i, j)] =
                        input(k, i, j) * sums(s, i, j);
                }
            }
        }
    }
    if (spec.bias_mode == BiasMode::PerNeuron) {
        const std::size_t n = geom.output_count();
        for (std::size_t i = 0; i < n; ++i) {
            grads.biases[i] = delta_out.data()[i];
        }
    } else {
        for (int s = 0; s < geom.sublayers_out; ++s) {
            double acc = 0.0;
            for (int u = 0; u < geom.out_height; ++u) {
                for (int v = 0; v < geom.out_width; ++v) {
                    acc += delta_out(s, u, v);
                }
            }
            grads.biases[s] = acc;
        }
    }
    return grads;
}

} // namespace hpnn
