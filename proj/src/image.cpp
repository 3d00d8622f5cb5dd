#include "hpnn/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <string>

#include "hpnn/error.hpp"

namespace hpnn {

namespace {

// Reads the next header token, skipping whitespace and '#' comments.
std::string next_token(const std::vector<std::uint8_t>& bytes, std::size_t& pos) {
    while (pos < bytes.size()) {
        const char c = static_cast<char>(bytes[pos]);
        if (c == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++pos;
        } else {
            break;
        }
    }
    std::string token;
    while (pos < bytes.size()) {
        const char c = static_cast<char>(bytes[pos]);
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '#') break;
        token.push_back(c);
        ++pos;
    }
    return token;
}

int parse_positive(const std::string& token, const char* what) {
    if (token.empty() ||
        !std::all_of(token.begin(), token.end(),
                     [](char c) { return c >= '0' && c <= '9'; })) {
        throw TruncatedPayload(std::string("PGM header: bad ") + what +
                               " field '" + token + "'");
    }
    const long v = std::stol(token);
    if (v < 1 || v > 1 << 20) {
        throw TruncatedPayload(std::string("PGM header: ") + what +
                               " out of range: " + token);
    }
    return static_cast<int>(v);
}

} // namespace

GrayImage decode_pgm(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
        throw BadMagic("not a binary PGM (expected magic 'P5')");
    }
    std::size_t pos = 2;
    const int width = parse_positive(next_token(bytes, pos), "width");
    const int height = parse_positive(next_token(bytes, pos), "height");
    const int maxval = parse_positive(next_token(bytes, pos), "maxval");
    if (maxval > 255) {
        throw UnsupportedMaxval("PGM maxval " + std::to_string(maxval) +
                                " exceeds 255");
    }
    // Exactly one whitespace byte separates the header from the raster.
    if (pos >= bytes.size()) {
        throw TruncatedPayload("PGM ends before raster data");
    }
    ++pos;

    const std::size_t need = static_cast<std::size_t>(width) * height;
    if (bytes.size() - pos < need) {
        throw TruncatedPayload("PGM raster has " +
                               std::to_string(bytes.size() - pos) +
                               " bytes, needs " + std::to_string(need));
    }

    GrayImage img(height, width);
    for (std::size_t i = 0; i < need; ++i) {
        img.pixels[i] = static_cast<double>(bytes[pos + i]);
    }
    return img;
}

GrayImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open image: " + path);
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return decode_pgm(bytes);
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& img) {
    std::string header = "P5\n" + std::to_string(img.width) + " " +
                         std::to_string(img.height) + "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    bytes.reserve(bytes.size() + img.pixels.size());
    for (double p : img.pixels) {
        const double clamped = std::min(255.0, std::max(0.0, p));
        bytes.push_back(static_cast<std::uint8_t>(std::llround(clamped)));
    }
    return bytes;
}

void save_pgm(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open image for writing: " + path);
    }
    const std::vector<std::uint8_t> bytes = encode_pgm(img);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("failed writing image: " + path);
    }
}

GrayImage resize_bilinear(const GrayImage& img, int out_height, int out_width) {
    if (out_height < 1 || out_width < 1) {
        throw Error("resize target must be positive");
    }
    if (out_height == img.height && out_width == img.width) {
        return img;
    }
    GrayImage out(out_height, out_width);
    const double scale_y = static_cast<double>(img.height) / out_height;
    const double scale_x = static_cast<double>(img.width) / out_width;
    for (int y = 0; y < out_height; ++y) {
        double sy = (y + 0.5) * scale_y - 0.5;
        sy = std::min(std::max(sy, 0.0), static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(sy);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double fy = sy - y0;
        for (int x = 0; x < out_width; ++x) {
            double sx = (x + 0.5) * scale_x - 0.5;
            sx = std::min(std::max(sx, 0.0), static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(sx);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double fx = sx - x0;
            const double top =
                (1.0 - fx) * img.at(y0, x0) + fx * img.at(y0, x1);
            const double bottom =
                (1.0 - fx) * img.at(y1, x0) + fx * img.at(y1, x1);
            out.at(y, x) = (1.0 - fy) * top + fy * bottom;
        }
    }
    return out;
}

FeatureMap normalize(const GrayImage& img) {
    FeatureMap map(1, img.height, img.width);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        map.data()[i] = img.pixels[i] / 127.5 - 1.0;
    }
    return map;
}

GrayImage denormalize(const FeatureMap& map) {
    GrayImage img(map.height(), map.width());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        img.pixels[i] = (map.data()[i] + 1.0) * 127.5;
    }
    return img;
}

GrayImage mean_filter(const GrayImage& img, int size) {
    if (size < 1 || size % 2 == 0) {
        throw EvenFilterSize("mean filter size must be a positive odd number, got " +
                             std::to_string(size));
    }
    return box_blur(img, size);
}

GrayImage box_blur(const GrayImage& img, int size) {
    if (size < 1) {
        throw EvenFilterSize("blur size must be positive, got " +
                             std::to_string(size));
    }
    if (size > 2 * std::min(img.height, img.width)) {
        throw Error("blur size " + std::to_string(size) + " too large for " +
                    std::to_string(img.height) + "x" +
                    std::to_string(img.width) + " image");
    }
    if (size == 1) {
        return img;
    }
    // Each output pixel is the row-major window sum divided by the window
    // area, then clamped into the input's [min, max]. The clamp pins down
    // the operation's floating-point contract: constant images reproduce
    // exactly and the output range never exceeds the input's.
    const auto [min_it, max_it] =
        std::minmax_element(img.pixels.begin(), img.pixels.end());
    const double lo = *min_it;
    const double hi = *max_it;
    GrayImage out(img.height, img.width);
    const int lo_off = -(size / 2);
    const int hi_off = size - 1 - size / 2;
    const double area = static_cast<double>(size) * size;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int dy = lo_off; dy <= hi_off; ++dy) {
                const int sy = std::min(std::max(y + dy, 0), img.height - 1);
                for (int dx = lo_off; dx <= hi_off; ++dx) {
                    const int sx = std::min(std::max(x + dx, 0), img.width - 1);
                    acc += img.at(sy, sx);
                }
            }
            out.at(y, x) = std::min(std::max(acc / area, lo), hi);
        }
    }
    return out;
}

} // namespace hpnn
