#pragma once

#include <string>
#include <vector>

#include "prnuda/grid.hpp"
#include "prnuda/rng.hpp"

namespace prnuda {

// Photometric domain style; applied after rendering so labels never change.
struct DomainStyle {
    double hue_deg = 0.0;
    double brightness = 1.0;
    double gamma = 1.0;
    double noise_sigma = 0.01;

    bool operator==(const DomainStyle&) const = default;
};

struct SynthConfig {
    int image_size = 64;
    int num_classes = 5;  // background + 4 shape classes
    int shapes_per_image = 6;
    DomainStyle source_style{0.0, 1.0, 1.0, 0.01};
    // "day -> dusk": hue +60°, brightness ×0.6, gamma 1.4, noise 0.03
    DomainStyle target_style{60.0, 0.6, 1.4, 0.03};
    std::uint64_t rng_seed = 1;
};

struct Sample {
    Grid2D image;
    LabelMap label;
};

enum class Domain { Source, Target };

// Scene rendering is a pure function of (cfg, scene_key): colored shapes
// (rectangle/ellipse/triangle/diamond, one class each) on a textured
// background, with pixel-exact label masks.
Sample gen_scene(const SynthConfig& cfg, std::uint64_t scene_key);

Grid2D apply_style(const Grid2D& img, const DomainStyle& style, Rng& noise_rng);

// n styled samples; stream_salt separates scene streams (train/val splits and
// the two domains use disjoint scenes drawn from the same distribution).
std::vector<Sample> gen_synthetic(const SynthConfig& cfg, int n, Domain domain,
                                  std::uint64_t stream_salt);

struct ManifestEntry {
    std::string image_path;
    std::string label_path;  // empty = unlabeled
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;  // sorted by stem
    std::string split;
    int num_classes = 0;
    int ignore_index = kIgnoreLabel;
    std::vector<std::string> rejected;  // per-file reasons
};

// Scans root/{images,labels}; labels are optional per stem. Entries failing
// shape or label-range validation land in .rejected, the rest load.
DatasetManifest load_folder(const std::string& root, int num_classes, int ignore_index);

std::string manifest_to_json(const DatasetManifest& m);

Sample load_sample(const ManifestEntry& e);
std::vector<Sample> load_dataset(const DatasetManifest& m);

// Writes images/ and labels/ (indexed 8-bit PNG) under root.
void write_dataset(const std::string& root, const std::vector<Sample>& samples,
                   int num_classes);

}  // namespace prnuda
