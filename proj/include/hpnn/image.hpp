// image.hpp -- grayscale images and the preprocessing chain:
// binary PGM decode -> bilinear resize -> normalize to [-1, 1], plus the
// mean filter used to simulate low-resolution inputs.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hpnn/feature_map.hpp"

namespace hpnn {

// Pixels are doubles in [0, 255], row-major.
struct GrayImage {
    int height = 0;
    int width = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(int h, int w, double fill = 0.0)
        : height(h), width(w),
          pixels(static_cast<std::size_t>(h) * w, fill) {}

    double& at(int row, int col) {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }
    double at(int row, int col) const {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }
};

// Binary PGM ("P5") with maxval <= 255. Header comments (#...) are
// accepted. Throws BadMagic (including for ASCII "P2" files),
// UnsupportedMaxval, TruncatedPayload.
GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes);
GrayImage load_pgm(const std::string& path);

// Canonical "P5\n<w> <h>\n255\n" + raster; pixels are rounded to nearest
// and clamped to [0, 255].
std::vector<std::uint8_t> encode_pgm(const GrayImage& img);
void save_pgm(const GrayImage& img, const std::string& path);

// Edge-clamped bilinear sampling with pixel-center alignment
// (source coordinate = (dst + 0.5) * scale - 0.5). Preserves constant
// images exactly and never leaves the input value range.
GrayImage resize_bilinear(const GrayImage& img, int out_height, int out_width);

// [0, 255] -> [-1, 1]: value = pixel / 127.5 - 1.
FeatureMap normalize(const GrayImage& img);
GrayImage denormalize(const FeatureMap& map);

// Box blur: each output pixel is the arithmetic mean of the size x size
// window centered on it, replicate border, dimensions unchanged. size must
// be odd (EvenFilterSize) and at most 2 * min(H, W). The mean is the
// row-major window sum divided by the area, clamped into the input's
// [min, max] so constants reproduce exactly.
GrayImage mean_filter(const GrayImage& img, int size);

// The blur-sweep protocol steps through sizes 3..15 by 3, which includes
// even windows; those have no center pixel, so this variant anchors the
// window at offsets [-size/2, size - 1 - size/2] (the usual convention,
// identical to mean_filter for odd sizes).
GrayImage box_blur(const GrayImage& img, int size);

} // namespace hpnn
