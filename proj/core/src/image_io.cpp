#include "prnuda/image_io.hpp"

#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <stdexcept>

namespace prnuda {
namespace {

bool ends_with(const std::string& s, const std::string& suf) {
    return s.size() >= suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Reads any PNG into 8-bit rows; expand controls palette/gray expansion to RGB.
std::vector<std::vector<png_byte>> read_png_rows(const std::string& path, bool expand,
                                                 int& width, int& height,
                                                 int& channels) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw std::runtime_error("cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw std::runtime_error("png read error: " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    png_set_strip_16(png);
    png_set_packing(png);
    if (expand) {
        png_set_expand(png);
        if (png_get_color_type(png, info) & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
        if (png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY ||
            png_get_color_type(png, info) == PNG_COLOR_TYPE_GRAY_ALPHA)
            png_set_gray_to_rgb(png);
    }
    png_read_update_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    channels = static_cast<int>(png_get_channels(png, info));

    std::vector<std::vector<png_byte>> rows(height,
                                            std::vector<png_byte>(png_get_rowbytes(png, info)));
    std::vector<png_bytep> ptrs(height);
    for (int y = 0; y < height; ++y) ptrs[y] = rows[y].data();
    png_read_image(png, ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return rows;
}

void write_png(const std::string& path, int width, int height, int color_type,
               const Palette* palette, const std::vector<png_bytep>& rows) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw std::runtime_error("cannot open for write: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw std::runtime_error("png write error: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    std::vector<png_color> plte;
    if (palette) {
        plte.resize(256);
        for (std::size_t i = 0; i < 256; ++i) {
            if (i < palette->size()) {
                plte[i] = {(*palette)[i][0], (*palette)[i][1], (*palette)[i][2]};
            } else {
                plte[i] = {90, 90, 90};
            }
        }
        png_set_PLTE(png, info, plte.data(), 256);
    }
    png_write_info(png, info);
    png_write_image(png, const_cast<png_bytep*>(rows.data()));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

Grid2D read_image_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string magic;
    int w, h, maxval;
    in >> magic >> w >> h >> maxval;
    if (magic != "P6" || maxval != 255)
        throw std::runtime_error("unsupported ppm: " + path);
    in.get();  // single whitespace after header
    std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h * 3);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!in) throw std::runtime_error("truncated ppm: " + path);
    Grid2D img(3, h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                img.at(c, y, x) = buf[(static_cast<std::size_t>(y) * w + x) * 3 + c] / 255.0;
    return img;
}

void write_image_ppm(const std::string& path, const Grid2D& img) {
    std::ofstream out(path, std::ios::binary);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) {
                double v = img.channels > c ? img.at(c, y, x) : img.at(0, y, x);
                out.put(static_cast<char>(static_cast<int>(v * 255.0 + 0.5)));
            }
}

}  // namespace

Palette default_palette(int num_classes) {
    static const std::array<std::array<std::uint8_t, 3>, 10> base = {{
        {64, 96, 64},    // background
        {200, 40, 40},   // red
        {50, 90, 200},   // blue
        {220, 200, 40},  // yellow
        {190, 60, 190},  // magenta
        {40, 180, 170},
        {230, 130, 40},
        {120, 220, 80},
        {150, 150, 230},
        {230, 120, 150},
    }};
    Palette p;
    for (int i = 0; i < num_classes; ++i) p.push_back(base[i % base.size()]);
    return p;
}

Grid2D read_image(const std::string& path) {
    if (ends_with(path, ".ppm")) return read_image_ppm(path);
    int w, h, ch;
    auto rows = read_png_rows(path, /*expand=*/true, w, h, ch);
    Grid2D img(3, h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                img.at(c, y, x) = rows[y][x * ch + (ch >= 3 ? c : 0)] / 255.0;
    return img;
}

void write_image(const std::string& path, const Grid2D& img) {
    if (ends_with(path, ".ppm")) {
        write_image_ppm(path, img);
        return;
    }
    std::vector<std::vector<png_byte>> rows(img.height,
                                            std::vector<png_byte>(img.width * 3));
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) {
                double v = img.channels > c ? img.at(c, y, x) : img.at(0, y, x);
                v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
                rows[y][x * 3 + c] = static_cast<png_byte>(v * 255.0 + 0.5);
            }
    std::vector<png_bytep> ptrs(img.height);
    for (int y = 0; y < img.height; ++y) ptrs[y] = rows[y].data();
    write_png(path, img.width, img.height, PNG_COLOR_TYPE_RGB, nullptr, ptrs);
}

LabelMap read_label(const std::string& path) {
    int w, h, ch;
    auto rows = read_png_rows(path, /*expand=*/false, w, h, ch);
    if (ch != 1)
        throw std::runtime_error("label file is not single-channel indexed: " + path);
    LabelMap lbl(h, w);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) lbl.at(y, x) = rows[y][x];
    return lbl;
}

void write_label_png(const std::string& path, const LabelMap& labels,
                     const Palette& palette) {
    Palette full = palette;
    full.resize(256, {90, 90, 90});
    full[kIgnoreLabel] = {0, 0, 0};
    std::vector<std::vector<png_byte>> rows(labels.height,
                                            std::vector<png_byte>(labels.width));
    for (int y = 0; y < labels.height; ++y)
        for (int x = 0; x < labels.width; ++x)
            rows[y][x] = static_cast<png_byte>(labels.at(y, x) & 0xff);
    std::vector<png_bytep> ptrs(labels.height);
    for (int y = 0; y < labels.height; ++y) ptrs[y] = rows[y].data();
    write_png(path, labels.width, labels.height, PNG_COLOR_TYPE_PALETTE, &full, ptrs);
}

void write_mask_png(const std::string& path, const NoiseMask& mask) {
    LabelMap as_labels(mask.height, mask.width);
    for (std::size_t i = 0; i < mask.size(); ++i) as_labels.data[i] = mask.data[i] ? 1 : 0;
    Palette p = {{20, 20, 20}, {240, 60, 60}};
    write_label_png(path, as_labels, p);
}

}  // namespace prnuda
