#include "lsksvd/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lsksvd {

int mirror_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
}

double ImageBuffer::sample_mirror(int x, int y, int c) const {
    return at(mirror_index(x, width), mirror_index(y, height), c);
}

bool ImageBuffer::valid() const {
    if (width <= 0 || height <= 0 || (channels != 1 && channels != 3)) return false;
    if (data.size() != static_cast<size_t>(width) * height * channels) return false;
    for (double v : data) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) return false;
    }
    return true;
}

size_t BinaryMask::count_true() const {
    size_t n = 0;
    for (uint8_t b : bits) n += (b != 0);
    return n;
}

// ---------------------------------------------------------------------------
// PNG I/O (libpng simplified API)
// ---------------------------------------------------------------------------

namespace {

std::vector<uint8_t> read_png_bytes(const std::string& path, int& width, int& height,
                                    int& channels) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&png, path.c_str())) {
        throw std::runtime_error("cannot read PNG '" + path + "': " + png.message);
    }
    const bool gray = (png.format & PNG_FORMAT_FLAG_COLOR) == 0;
    png.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    channels = gray ? 1 : 3;
    width = static_cast<int>(png.width);
    height = static_cast<int>(png.height);
    std::vector<uint8_t> buf(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, buf.data(), 0, nullptr)) {
        throw std::runtime_error("cannot decode PNG '" + path + "': " + png.message);
    }
    return buf;
}

void write_png_bytes(const std::string& path, const std::vector<uint8_t>& interleaved,
                     int width, int height, int channels) {
    png_image png{};
    png.version = PNG_IMAGE_VERSION;
    png.width = static_cast<png_uint_32>(width);
    png.height = static_cast<png_uint_32>(height);
    png.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&png, path.c_str(), 0, interleaved.data(), 0, nullptr)) {
        throw std::runtime_error("cannot write PNG '" + path + "': " + png.message);
    }
}

uint8_t to_byte(double v) {
    v = std::clamp(v, 0.0, 1.0);
    return static_cast<uint8_t>(std::floor(v * 255.0 + 0.5)); // round half-up
}

} // namespace

ImageBuffer read_image_png(const std::string& path) {
    int w = 0, h = 0, c = 0;
    const std::vector<uint8_t> buf = read_png_bytes(path, w, h, c);
    ImageBuffer img(w, h, c);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            for (int ch = 0; ch < c; ++ch) {
                img.at(x, y, ch) = buf[(static_cast<size_t>(y) * w + x) * c + ch] / 255.0;
            }
        }
    }
    return img;
}

void write_image_png(const std::string& path, const ImageBuffer& img) {
    if (!img.valid()) throw std::invalid_argument("write_image_png: invalid image");
    std::vector<uint8_t> buf(img.pixel_count() * img.channels);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            for (int c = 0; c < img.channels; ++c) {
                buf[(static_cast<size_t>(y) * img.width + x) * img.channels + c] =
                    to_byte(img.at(x, y, c));
            }
        }
    }
    write_png_bytes(path, buf, img.width, img.height, img.channels);
}

BinaryMask read_mask_png(const std::string& path) {
    int w = 0, h = 0, c = 0;
    const std::vector<uint8_t> buf = read_png_bytes(path, w, h, c);
    if (c != 1) {
        throw std::runtime_error("mask PNG '" + path + "' must be single-channel");
    }
    BinaryMask mask(w, h);
    for (size_t i = 0; i < buf.size(); ++i) mask.bits[i] = buf[i] != 0 ? 1 : 0;
    return mask;
}

void write_mask_png(const std::string& path, const BinaryMask& mask) {
    std::vector<uint8_t> buf(mask.bits.size());
    for (size_t i = 0; i < buf.size(); ++i) buf[i] = mask.bits[i] ? 255 : 0;
    write_png_bytes(path, buf, mask.width, mask.height, 1);
}

// ---------------------------------------------------------------------------
// CIELAB
// ---------------------------------------------------------------------------

namespace {

double srgb_inverse_compand(double u) {
    return u <= 0.04045 ? u / 12.92 : std::pow((u + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
    constexpr double eps = 216.0 / 24389.0;
    constexpr double kappa = 24389.0 / 27.0;
    return t > eps ? std::cbrt(t) : (kappa * t + 16.0) / 116.0;
}

} // namespace

std::array<double, 3> srgb_to_lab(double r, double g, double b) {
    const double rl = srgb_inverse_compand(r);
    const double gl = srgb_inverse_compand(g);
    const double bl = srgb_inverse_compand(b);
    // sRGB -> XYZ, D65 white point.
    const double x = 0.4124564 * rl + 0.3575761 * gl + 0.1804375 * bl;
    const double y = 0.2126729 * rl + 0.7151522 * gl + 0.0721750 * bl;
    const double z = 0.0193339 * rl + 0.1191920 * gl + 0.9503041 * bl;
    const double fx = lab_f(x / 0.95047);
    const double fy = lab_f(y / 1.0);
    const double fz = lab_f(z / 1.08883);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

ImageBuffer lab_a_channel(const ImageBuffer& image) {
    if (image.channels != 3) {
        throw std::invalid_argument("lab_a_channel: 3-channel RGB input required");
    }
    ImageBuffer out(image.width, image.height, 1);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            const auto lab = srgb_to_lab(image.at(x, y, 0), image.at(x, y, 1), image.at(x, y, 2));
            out.at(x, y, 0) = lab[1];
            lo = std::min(lo, lab[1]);
            hi = std::max(hi, lab[1]);
        }
    }
    if (hi - lo < 1e-12) {
        std::fill(out.data.begin(), out.data.end(), 0.5);
        return out;
    }
    for (double& v : out.data) v = (v - lo) / (hi - lo);
    return out;
}

// ---------------------------------------------------------------------------
// Contour overlay
// ---------------------------------------------------------------------------

ImageBuffer render_overlay(const ImageBuffer& image, const BinaryMask& mask) {
    if (image.width != mask.width || image.height != mask.height) {
        throw std::invalid_argument("render_overlay: image/mask dimension mismatch");
    }
    ImageBuffer out(image.width, image.height, 3);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                out.at(x, y, c) = image.at(x, y, image.channels == 1 ? 0 : c);
            }
        }
    }
    auto is_true = [&](int x, int y) {
        return x >= 0 && y >= 0 && x < mask.width && y < mask.height && mask.at(x, y);
    };
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            if (!mask.at(x, y)) continue;
            const bool boundary = !is_true(x - 1, y) || !is_true(x + 1, y) ||
                                  !is_true(x, y - 1) || !is_true(x, y + 1);
            if (boundary) {
                out.at(x, y, 0) = 1.0;
                out.at(x, y, 1) = 1.0;
                out.at(x, y, 2) = 0.0;
            }
        }
    }
    return out;
}

} // namespace lsksvd
