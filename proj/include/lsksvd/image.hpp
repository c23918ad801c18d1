#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace lsksvd {

/// Planar row-major raster with values in [0,1]. Plane c occupies
/// data[c*w*h .. (c+1)*w*h), pixel (x,y) of plane c is data[c*w*h + y*w + x].
struct ImageBuffer {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> data;

    ImageBuffer() = default;
    ImageBuffer(int w, int h, int c, double fill = 0.0)
        : width(w), height(h), channels(c),
          data(static_cast<size_t>(w) * h * c, fill) {}

    double at(int x, int y, int c) const {
        return data[plane_offset(c) + static_cast<size_t>(y) * width + x];
    }
    double& at(int x, int y, int c) {
        return data[plane_offset(c) + static_cast<size_t>(y) * width + x];
    }
    /// Sample with mirror padding (edge repeated) on both axes.
    double sample_mirror(int x, int y, int c) const;

    size_t pixel_count() const { return static_cast<size_t>(width) * height; }
    bool valid() const;

private:
    size_t plane_offset(int c) const { return static_cast<size_t>(c) * width * height; }
};

struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false)
        : width(w), height(h), bits(static_cast<size_t>(w) * h, fill ? 1 : 0) {}

    bool at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v) { bits[static_cast<size_t>(y) * width + x] = v ? 1 : 0; }
    size_t count_true() const;
};

/// Mirror index into [0,n): reflection with the edge sample repeated,
/// so -1 -> 0, -2 -> 1, n -> n-1.
int mirror_index(int i, int n);

// 8-bit PNG I/O. Values are scaled by 255 on write and rounded half-up;
// reads divide by 255. Masks are single-channel, nonzero = true.
ImageBuffer read_image_png(const std::string& path);
void write_image_png(const std::string& path, const ImageBuffer& img);
BinaryMask read_mask_png(const std::string& path);
void write_mask_png(const std::string& path, const BinaryMask& mask);

/// sRGB (D65) -> CIE 1976 L*a*b*. Inputs in [0,1], sRGB companded.
std::array<double, 3> srgb_to_lab(double r, double g, double b);

/// Isolate the a* (red-green) channel of an RGB image and min-max rescale it
/// to [0,1]. A constant a* channel rescales to 0.5 everywhere.
ImageBuffer lab_a_channel(const ImageBuffer& image);

/// Copy of the image with the mask's inner boundary (mask-true pixels with at
/// least one false 4-neighbor; out-of-image counts as false) painted pure
/// yellow. Single-channel inputs are promoted to RGB.
ImageBuffer render_overlay(const ImageBuffer& image, const BinaryMask& mask);

} // namespace lsksvd
