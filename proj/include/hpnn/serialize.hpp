// serialize.hpp -- self-describing binary model container.
//
// Layout (all integers little-endian):
//   magic "HPNN" (4 bytes)
//   u16 format version (currently 1)
//   u32 input_height, input_width
//   u32 pyramidal layer count
//     per layer: u32 sublayers, field_size, overlap, activation, bias_mode
//   u32 dense layer count
//     per layer: u32 units, activation
//   u32 n_classes
//   parameter tensors as little-endian IEEE-754 doubles, in declaration
//   order (per pyramidal layer weights then biases, then per dense layer
//   weights then biases)
//
// load(save(net)) is bitwise-identical.

#pragma once

#include <iosfwd>
#include <string>

#include "hpnn/network.hpp"

namespace hpnn {

void save_network(const Network& net, std::ostream& out);
void save_network(const Network& net, const std::string& path);

Network load_network(std::istream& in);
Network load_network(const std::string& path);

} // namespace hpnn
