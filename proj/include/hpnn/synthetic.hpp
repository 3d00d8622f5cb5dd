// synthetic.hpp -- seed-deterministic synthetic dataset generator.
//
// Each class is an oriented bar rendered at a shared, per-subject jittered
// location; subjects carry their own background level, bar intensity,
// contrast polarity (a minority draw dark-on-bright bars), thickness,
// length and position offset, so subject identity confounds appearance
// within classes but never across them. Orientation is the only
// class-discriminative factor, which makes unseen-subject generalization
// require brightness, contrast and polarity invariance.

#pragma once

#include <cstdint>
#include <string>

#include "hpnn/dataset.hpp"
#include "hpnn/image.hpp"

namespace hpnn {

struct SyntheticConfig {
    int classes = 4;      // >= 2
    int subjects = 20;    // >= 10
    int per_subject = 5;  // images per subject per class
    int size = 32;        // square image extent
    std::uint64_t seed = 0;
};

// Renders one sample. Exposed so tests can check determinism and the
// learnable-signal property without touching the filesystem.
GrayImage render_synthetic_image(const SyntheticConfig& cfg, int subject,
                                 int class_index, int instance);

// Writes classes*subjects*per_subject PGM files plus index.csv into
// out_dir (created if missing) and returns the index (paths resolved).
// Byte-identical for identical configs.
DatasetIndex generate_synthetic(const SyntheticConfig& cfg,
                                const std::string& out_dir);

} // namespace hpnn
