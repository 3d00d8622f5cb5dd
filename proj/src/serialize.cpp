#include "hpnn/serialize.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "hpnn/error.hpp"

namespace hpnn {

namespace {

constexpr char kMagic[4] = {'H', 'P', 'N', 'N'};
constexpr std::uint16_t kVersion = 1;

void write_u16(std::ostream& out, std::uint16_t v) {
    const unsigned char bytes[2] = {static_cast<unsigned char>(v & 0xFF),
                                    static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(bytes), 2);
}

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char bytes[4];
    for (int i = 0; i < 4; ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

std::uint16_t read_u16(std::istream& in) {
    unsigned char bytes[2];
    if (!in.read(reinterpret_cast<char*>(bytes), 2)) {
        throw BadModelFile("model file truncated in header");
    }
    return static_cast<std::uint16_t>(bytes[0] | (bytes[1] << 8));
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char bytes[4];
    if (!in.read(reinterpret_cast<char*>(bytes), 4)) {
        throw BadModelFile("model file truncated in header");
    }
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes[i]) << (8 * i);
    return v;
}

double read_f64(std::istream& in) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
        throw BadModelFile("model file truncated in parameter data");
    }
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof v);
    return v;
}

std::uint32_t activation_code(Activation kind) {
    return static_cast<std::uint32_t>(kind);
}

Activation activation_from_code(std::uint32_t code) {
    if (code > static_cast<std::uint32_t>(Activation::Identity)) {
        throw BadModelFile("unknown activation code " + std::to_string(code));
    }
    return static_cast<Activation>(code);
}

} // namespace

void save_network(const Network& net, std::ostream& out) {
    out.write(kMagic, 4);
    write_u16(out, kVersion);
    write_u32(out, static_cast<std::uint32_t>(net.spec.input_height));
    write_u32(out, static_cast<std::uint32_t>(net.spec.input_width));
    write_u32(out, static_cast<std::uint32_t>(net.spec.pyramidal.size()));
    for (const PyramidalLayerSpec& layer : net.spec.pyramidal) {
        write_u32(out, static_cast<std::uint32_t>(layer.sublayers_out));
        write_u32(out, static_cast<std::uint32_t>(layer.field_size));
        write_u32(out, static_cast<std::uint32_t>(layer.overlap));
        write_u32(out, activation_code(layer.activation));
        write_u32(out, layer.bias_mode == BiasMode::PerNeuron ? 0u : 1u);
    }
    write_u32(out, static_cast<std::uint32_t>(net.spec.dense.size()));
    for (const DenseLayerSpec& layer : net.spec.dense) {
        write_u32(out, static_cast<std::uint32_t>(layer.units));
        write_u32(out, activation_code(layer.activation));
    }
    write_u32(out, static_cast<std::uint32_t>(net.spec.n_classes));

    for (const auto* tensor : parameter_tensors(net.params)) {
        for (double v : *tensor) write_f64(out, v);
    }
    if (!out) {
        throw IoError("failed to write model stream");
    }
}

void save_network(const Network& net, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open model file for writing: " + path);
    }
    save_network(net, out);
}

Network load_network(std::istream& in) {
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw BadModelFile("not an HPNN model file (bad magic)");
    }
    const std::uint16_t version = read_u16(in);
    if (version != kVersion) {
        throw BadModelFile("unsupported model format version " +
                           std::to_string(version));
    }

    NetworkSpec spec;
    spec.input_height = static_cast<int>(read_u32(in));
    spec.input_width = static_cast<int>(read_u32(in));
    const std::uint32_t n_pyr = read_u32(in);
    for (std::uint32_t l = 0; l < n_pyr; ++l) {
        PyramidalLayerSpec layer;
        layer.sublayers_out = static_cast<int>(read_u32(in));
        layer.field_size = static_cast<int>(read_u32(in));
        layer.overlap = static_cast<int>(read_u32(in));
        layer.activation = activation_from_code(read_u32(in));
        const std::uint32_t mode = read_u32(in);
        if (mode > 1) {
            throw BadModelFile("unknown bias mode " + std::to_string(mode));
        }
        layer.bias_mode = mode == 0 ? BiasMode::PerNeuron : BiasMode::PerSubLayer;
        spec.pyramidal.push_back(layer);
    }
    const std::uint32_t n_dense = read_u32(in);
    for (std::uint32_t l = 0; l < n_dense; ++l) {
        DenseLayerSpec layer;
        layer.units = static_cast<int>(read_u32(in));
        layer.activation = activation_from_code(read_u32(in));
        spec.dense.push_back(layer);
    }
    spec.n_classes = static_cast<int>(read_u32(in));

    Network net;
    net.spec = spec;
    net.params = make_zero_gradients(spec); // validates geometry, allocates
    for (auto* tensor : parameter_tensors(net.params)) {
        for (double& v : *tensor) v = read_f64(in);
    }
    // Anything after the tensors is garbage.
    if (in.peek() != std::char_traits<char>::eof()) {
        throw BadModelFile("trailing bytes after parameter data");
    }
    return net;
}

Network load_network(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open model file: " + path);
    }
    return load_network(in);
}

} // namespace hpnn
