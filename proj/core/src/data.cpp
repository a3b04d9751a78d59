#include "prnuda/data.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "prnuda/image_io.hpp"

namespace fs = std::filesystem;

namespace prnuda {
namespace {

struct Rgb {
    double r, g, b;
};

Rgb hsv_to_rgb(double h, double s, double v) {
    h = std::fmod(std::fmod(h, 360.0) + 360.0, 360.0);
    const double c = v * s;
    const double x = c * (1.0 - std::abs(std::fmod(h / 60.0, 2.0) - 1.0));
    const double m = v - c;
    double r = 0, g = 0, b = 0;
    if (h < 60) {
        r = c; g = x;
    } else if (h < 120) {
        r = x; g = c;
    } else if (h < 180) {
        g = c; b = x;
    } else if (h < 240) {
        g = x; b = c;
    } else if (h < 300) {
        r = x; b = c;
    } else {
        r = c; b = x;
    }
    return {r + m, g + m, b + m};
}

void rgb_to_hsv(double r, double g, double b, double& h, double& s, double& v) {
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double d = mx - mn;
    v = mx;
    s = (mx == 0.0) ? 0.0 : d / mx;
    if (d == 0.0) {
        h = 0.0;
    } else if (mx == r) {
        h = 60.0 * std::fmod((g - b) / d, 6.0);
    } else if (mx == g) {
        h = 60.0 * ((b - r) / d + 2.0);
    } else {
        h = 60.0 * ((r - g) / d + 4.0);
    }
    if (h < 0) h += 360.0;
}

// Classes are coded by hue anchors 180° apart (a 60° rotation keeps each
// anchor nearest to itself) crossed with value levels on either side of the
// background (contrast sign survives any monotone brightness/gamma map).
// The style shift then degrades a source-only model without mapping one
// class onto another's exact appearance.
struct Hsv {
    double h, s, v;
};
constexpr Hsv kClassHsv[5] = {
    {270.0, 0.12, 0.50},  // background: desaturated
    {0.0, 0.85, 0.85},    // rectangle: warm, brighter than bg
    {180.0, 0.85, 0.85},  // ellipse: cool, brighter than bg
    {0.0, 0.85, 0.32},    // triangle: warm, darker than bg
    {180.0, 0.85, 0.32},  // diamond: cool, darker than bg
};

struct Shape {
    int kind;  // 1 rect, 2 ellipse, 3 triangle, 4 diamond (class index)
    double cx, cy, rx, ry;
    double v0x, v0y, v1x, v1y, v2x, v2y;  // triangle vertices
    Rgb color;
};

bool point_in(const Shape& s, double x, double y) {
    switch (s.kind) {
        case 1:
            return std::abs(x - s.cx) <= s.rx && std::abs(y - s.cy) <= s.ry;
        case 2: {
            const double dx = (x - s.cx) / s.rx, dy = (y - s.cy) / s.ry;
            return dx * dx + dy * dy <= 1.0;
        }
        case 3: {
            auto side = [](double ax, double ay, double bx, double by, double px,
                           double py) {
                return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
            };
            const double d0 = side(s.v0x, s.v0y, s.v1x, s.v1y, x, y);
            const double d1 = side(s.v1x, s.v1y, s.v2x, s.v2y, x, y);
            const double d2 = side(s.v2x, s.v2y, s.v0x, s.v0y, x, y);
            const bool neg = (d0 < 0) || (d1 < 0) || (d2 < 0);
            const bool pos = (d0 > 0) || (d1 > 0) || (d2 > 0);
            return !(neg && pos);
        }
        case 4:
            return std::abs(x - s.cx) / s.rx + std::abs(y - s.cy) / s.ry <= 1.0;
        default:
            return false;
    }
}

std::string stem_of(const fs::path& p) { return p.stem().string(); }

}  // namespace

Sample gen_scene(const SynthConfig& cfg, std::uint64_t scene_key) {
    const int n = cfg.image_size;
    Rng rng(Rng::mix(scene_key, 0x7363656eULL));
    Sample s{Grid2D(3, n, n), LabelMap(n, n, 0)};

    // textured background with two low-frequency waves
    const double bg_hue = kClassHsv[0].h + rng.uniform(-15.0, 15.0);
    const double bg_sat = kClassHsv[0].s + rng.uniform(-0.05, 0.07);
    const double bg_val = kClassHsv[0].v + rng.uniform(-0.06, 0.06);
    const double fx1 = rng.uniform(0.5, 2.0), fy1 = rng.uniform(0.5, 2.0);
    const double fx2 = rng.uniform(2.0, 4.0), fy2 = rng.uniform(2.0, 4.0);
    const double ph1 = rng.uniform(0.0, 6.283), ph2 = rng.uniform(0.0, 6.283);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const double u = static_cast<double>(x) / n, v = static_cast<double>(y) / n;
            double tex = 0.05 * std::sin(6.283 * (fx1 * u + fy1 * v) + ph1) +
                         0.03 * std::sin(6.283 * (fx2 * u + fy2 * v) + ph2);
            Rgb c = hsv_to_rgb(bg_hue, bg_sat, std::clamp(bg_val + tex, 0.0, 1.0));
            s.image.at(0, y, x) = c.r;
            s.image.at(1, y, x) = c.g;
            s.image.at(2, y, x) = c.b;
        }

    const int num_shape_classes = cfg.num_classes - 1;
    for (int i = 0; i < cfg.shapes_per_image; ++i) {
        Shape sh;
        sh.kind = 1 + rng.uniform_int(num_shape_classes);
        sh.cx = rng.uniform(0.15, 0.85) * n;
        sh.cy = rng.uniform(0.15, 0.85) * n;
        sh.rx = rng.uniform(0.09, 0.20) * n;
        sh.ry = rng.uniform(0.09, 0.20) * n;
        if (sh.kind == 3) {
            sh.v0x = sh.cx + rng.uniform(-0.3, 0.3) * sh.rx;
            sh.v0y = sh.cy - sh.ry;
            sh.v1x = sh.cx - sh.rx;
            sh.v1y = sh.cy + sh.ry * rng.uniform(0.6, 1.0);
            sh.v2x = sh.cx + sh.rx;
            sh.v2y = sh.cy + sh.ry * rng.uniform(0.6, 1.0);
        }
        const Hsv& base = kClassHsv[std::min(sh.kind, 4)];
        sh.color = hsv_to_rgb(base.h + rng.uniform(-10.0, 10.0),
                              base.s + rng.uniform(-0.08, 0.08),
                              base.v + rng.uniform(-0.05, 0.05));

        for (int y = 0; y < n; ++y)
            for (int x = 0; x < n; ++x)
                if (point_in(sh, x + 0.5, y + 0.5)) {
                    s.image.at(0, y, x) = sh.color.r;
                    s.image.at(1, y, x) = sh.color.g;
                    s.image.at(2, y, x) = sh.color.b;
                    s.label.at(y, x) = sh.kind;
                }
    }
    return s;
}

Grid2D apply_style(const Grid2D& img, const DomainStyle& style, Rng& noise_rng) {
    Grid2D out = img;
    const std::size_t plane = img.plane();
    for (std::size_t j = 0; j < plane; ++j) {
        double r = img.data[j], g = img.data[plane + j], b = img.data[2 * plane + j];
        if (style.hue_deg != 0.0) {
            double h, sv, vv;
            rgb_to_hsv(r, g, b, h, sv, vv);
            Rgb c = hsv_to_rgb(h + style.hue_deg, sv, vv);
            r = c.r;
            g = c.g;
            b = c.b;
        }
        double ch[3] = {r, g, b};
        for (int c = 0; c < 3; ++c) {
            double v = ch[c] * style.brightness;
            v = std::pow(std::clamp(v, 0.0, 1.0), style.gamma);
            v += style.noise_sigma * noise_rng.normal();
            out.data[c * plane + j] = std::clamp(v, 0.0, 1.0);
        }
    }
    return out;
}

std::vector<Sample> gen_synthetic(const SynthConfig& cfg, int n, Domain domain,
                                  std::uint64_t stream_salt) {
    std::vector<Sample> out;
    out.reserve(n);
    const DomainStyle& style =
        (domain == Domain::Source) ? cfg.source_style : cfg.target_style;
    for (int i = 0; i < n; ++i) {
        const std::uint64_t key =
            Rng::mix(Rng::mix(cfg.rng_seed, stream_salt), static_cast<std::uint64_t>(i));
        Sample s = gen_scene(cfg, key);
        Rng noise_rng(Rng::mix(key, 0x7374796cULL));
        s.image = apply_style(s.image, style, noise_rng);
        out.push_back(std::move(s));
    }
    return out;
}

DatasetManifest load_folder(const std::string& root, int num_classes, int ignore_index) {
    DatasetManifest m;
    m.num_classes = num_classes;
    m.ignore_index = ignore_index;
    m.split = fs::path(root).filename().string();

    const fs::path images = fs::path(root) / "images";
    const fs::path labels = fs::path(root) / "labels";
    if (!fs::is_directory(images))
        throw std::runtime_error("load_folder: missing images/ under " + root);

    std::map<std::string, fs::path> label_by_stem;
    if (fs::is_directory(labels))
        for (const auto& e : fs::directory_iterator(labels))
            if (e.is_regular_file()) label_by_stem[stem_of(e.path())] = e.path();

    std::vector<fs::path> image_files;
    for (const auto& e : fs::directory_iterator(images)) {
        if (!e.is_regular_file()) continue;
        const std::string ext = e.path().extension().string();
        if (ext == ".png" || ext == ".ppm") image_files.push_back(e.path());
    }
    std::sort(image_files.begin(), image_files.end(),
              [](const fs::path& a, const fs::path& b) { return stem_of(a) < stem_of(b); });

    for (const auto& img_path : image_files) {
        ManifestEntry entry;
        entry.image_path = img_path.string();
        auto it = label_by_stem.find(stem_of(img_path));
        try {
            Grid2D img = read_image(entry.image_path);
            if (it != label_by_stem.end()) {
                LabelMap lbl = read_label(it->second.string());
                if (lbl.height != img.height || lbl.width != img.width) {
                    m.rejected.push_back(entry.image_path + ": image/label dimension mismatch");
                    continue;
                }
                bool bad_value = false;
                for (int v : lbl.data)
                    if (v >= num_classes && v != ignore_index) {
                        bad_value = true;
                        break;
                    }
                if (bad_value) {
                    m.rejected.push_back(it->second.string() + ": label value out of range");
                    continue;
                }
                entry.label_path = it->second.string();
            }
            m.entries.push_back(std::move(entry));
        } catch (const std::exception& ex) {
            m.rejected.push_back(entry.image_path + ": " + ex.what());
        }
    }
    return m;
}

std::string manifest_to_json(const DatasetManifest& m) {
    nlohmann::json j;
    j["split"] = m.split;
    j["num_classes"] = m.num_classes;
    j["ignore_index"] = m.ignore_index;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : m.entries)
        j["entries"].push_back({{"image", e.image_path}, {"label", e.label_path}});
    j["rejected"] = m.rejected;
    return j.dump(2);
}

Sample load_sample(const ManifestEntry& e) {
    Sample s;
    s.image = read_image(e.image_path);
    if (!e.label_path.empty()) {
        s.label = read_label(e.label_path);
    } else {
        s.label = LabelMap(s.image.height, s.image.width, kIgnoreLabel);
    }
    return s;
}

std::vector<Sample> load_dataset(const DatasetManifest& m) {
    std::vector<Sample> out;
    out.reserve(m.entries.size());
    for (const auto& e : m.entries) out.push_back(load_sample(e));
    return out;
}

void write_dataset(const std::string& root, const std::vector<Sample>& samples,
                   int num_classes) {
    fs::create_directories(fs::path(root) / "images");
    fs::create_directories(fs::path(root) / "labels");
    const Palette pal = default_palette(num_classes);
    char name[32];
    for (std::size_t i = 0; i < samples.size(); ++i) {
        std::snprintf(name, sizeof(name), "im_%05zu.png", i);
        write_image((fs::path(root) / "images" / name).string(), samples[i].image);
        write_label_png((fs::path(root) / "labels" / name).string(), samples[i].label, pal);
    }
}

}  // namespace prnuda
