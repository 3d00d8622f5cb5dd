#include "hpnn/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hpnn/error.hpp"
#include "hpnn/rng.hpp"

namespace hpnn {

namespace {

constexpr double kPi = 3.14159265358979323846;

// One generator per (subject) and per (subject, class, instance), derived
// by mixing the indices into the master seed so every entity is
// independently reproducible.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                       std::uint64_t c) {
    SplitMix64 rng(seed ^ (a * 0x100000001B3ULL) ^ (b * 0x9E3779B97F4A7C15ULL) ^
                   (c * 0xC2B2AE3D27D4EB4FULL));
    return rng.next();
}

struct SubjectTraits {
    double background;
    double intensity;
    double polarity; // +1 bright bar, -1 dark bar
    double thickness;
    double half_length;
    double offset_x;
    double offset_y;
};

SubjectTraits subject_traits(const SyntheticConfig& cfg, int subject) {
    SplitMix64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(subject) + 1, 0, 0));
    SubjectTraits t;
    t.background = rng.uniform(85.0, 175.0);
    t.intensity = rng.uniform(65.0, 105.0);
    // A minority of subjects express the pattern with inverted contrast.
    // One weight per input position cannot separate orientation from
    // polarity, so this is where sub-layer diversity pays off. The
    // fraction stays small enough that raw-pixel class centroids keep a
    // clear bright-bar signal.
    t.polarity = rng.next_double() < 0.12 ? -1.0 : 1.0;
    t.thickness = rng.uniform(0.9, 1.6);
    t.half_length = rng.uniform(0.20, 0.32) * cfg.size;
    const double max_off = cfg.size / 12.0;
    t.offset_x = rng.uniform(-max_off, max_off);
    t.offset_y = rng.uniform(-max_off, max_off);
    return t;
}

} // namespace

GrayImage render_synthetic_image(const SyntheticConfig& cfg, int subject,
                                 int class_index, int instance) {
    const SubjectTraits traits = subject_traits(cfg, subject);
    SplitMix64 rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(subject) + 1,
                            static_cast<std::uint64_t>(class_index) + 1,
                            static_cast<std::uint64_t>(instance) + 1));

    const double cx = (cfg.size - 1) / 2.0 + traits.offset_x + rng.uniform(-1.5, 1.5);
    const double cy = (cfg.size - 1) / 2.0 + traits.offset_y + rng.uniform(-1.5, 1.5);
    const double gain = rng.uniform(0.9, 1.1);
    // class orientation plus a little per-image wobble (~9 degrees)
    const double theta =
        class_index * kPi / cfg.classes + rng.uniform(-0.16, 0.16);
    const double dir_x = std::cos(theta);
    const double dir_y = std::sin(theta);

    GrayImage img(cfg.size, cfg.size);
    for (int y = 0; y < cfg.size; ++y) {
        for (int x = 0; x < cfg.size; ++x) {
            const double px = x - cx;
            const double py = y - cy;
            const double along = px * dir_x + py * dir_y;
            const double perp = -px * dir_y + py * dir_x;
            double value = traits.background;
            if (std::fabs(along) <= traits.half_length) {
                const double profile = 1.0 - (perp / traits.thickness) *
                                                 (perp / traits.thickness);
                if (profile > 0.0) {
                    value += traits.polarity * gain * traits.intensity * profile;
                }
            }
            value += rng.uniform(-4.0, 4.0);
            img.at(y, x) = std::min(255.0, std::max(0.0, value));
        }
    }
    return img;
}

DatasetIndex generate_synthetic(const SyntheticConfig& cfg,
                                const std::string& out_dir) {
    if (cfg.classes < 2) {
        throw Error("synthetic generator needs at least 2 classes");
    }
    if (cfg.subjects < 10) {
        throw Error("synthetic generator needs at least 10 subjects "
                    "(the fold protocol requires them)");
    }
    if (cfg.per_subject < 1 || cfg.size < 8) {
        throw Error("synthetic generator: per_subject >= 1 and size >= 8 required");
    }

    std::filesystem::create_directories(out_dir);

    DatasetIndex index;
    for (int c = 0; c < cfg.classes; ++c) {
        index.class_names.push_back("c" + std::to_string(c));
    }

    char buf[64];
    for (int subject = 0; subject < cfg.subjects; ++subject) {
        std::snprintf(buf, sizeof buf, "s%03d", subject);
        const std::string subject_id = buf;
        for (int c = 0; c < cfg.classes; ++c) {
            for (int i = 0; i < cfg.per_subject; ++i) {
                std::snprintf(buf, sizeof buf, "s%03d_c%d_%02d.pgm", subject, c, i);
                const GrayImage img = render_synthetic_image(cfg, subject, c, i);
                const std::string path =
                    (std::filesystem::path(out_dir) / buf).string();
                save_pgm(img, path);

                SampleRecord record;
                record.image_path = path;
                record.subject_id = subject_id;
                record.label = c;
                record.label_name = index.class_names[c];
                index.records.push_back(std::move(record));
            }
        }
    }

    // Rows carry paths relative to the index so the corpus is relocatable.
    std::ofstream out(std::filesystem::path(out_dir) / "index.csv");
    if (!out) {
        throw IoError("cannot write index.csv in " + out_dir);
    }
    out << "#classes:";
    for (int c = 0; c < cfg.classes; ++c) {
        if (c) out << ',';
        out << index.class_names[c];
    }
    out << '\n';
    for (const SampleRecord& r : index.records) {
        out << std::filesystem::path(r.image_path).filename().string() << ','
            << r.subject_id << ',' << r.label_name << '\n';
    }
    if (!out) {
        throw IoError("failed writing index.csv in " + out_dir);
    }
    return index;
}

} // namespace hpnn
