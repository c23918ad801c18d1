#pragma once

#include <array>
#include <cstdint>

#include "lsksvd/image.hpp"

namespace lsksvd {

/// Stationary random texture: oriented sinusoidal stripes or smooth blotch
/// (value) noise, both around a base color with per-pixel white noise on top.
struct TextureSpec {
    enum class Kind { stripes, blotch };
    Kind kind = Kind::stripes;
    std::array<double, 3> base = {0.5, 0.5, 0.5};
    double amplitude = 0.22;
    double angle_deg = 45.0; // stripe orientation
    double period_px = 6.0;  // stripe period / blotch cell size
    std::array<double, 3> channel_gain = {1.0, 1.0, 1.0};
    double noise_sigma = 0.02;
};

struct BlobLayout {
    int count = 3;
    double min_radius = 40.0;
    double max_radius = 55.0;
    double margin = 8.0; // blobs stay margin + radius away from the border
};

struct SyntheticScene {
    ImageBuffer image;
    BinaryMask fg; // exact blob indicator
    BinaryMask bg; // complement
};

/// Background filled with texture 2, foreground blobs (random discs) with
/// texture 1; masks are exact. Deterministic per seed. blur_sigma > 0 applies
/// a Gaussian blur to the image only.
SyntheticScene gen_synthetic(int width, int height, const TextureSpec& fg_texture,
                             const TextureSpec& bg_texture, const BlobLayout& blobs,
                             uint64_t seed, double blur_sigma = 0.0);

} // namespace lsksvd
