#include "lsksvd/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "lsksvd/rng.hpp"

namespace lsksvd {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// Smooth value noise: random lattice values, bilinear interpolation.
struct ValueNoise {
    int cells_x = 0, cells_y = 0;
    double cell = 1.0;
    std::vector<double> lattice;

    ValueNoise(int width, int height, double cell_size, std::mt19937_64& rng) : cell(cell_size) {
        cells_x = static_cast<int>(std::ceil(width / cell)) + 2;
        cells_y = static_cast<int>(std::ceil(height / cell)) + 2;
        lattice.resize(static_cast<size_t>(cells_x) * cells_y);
        for (double& v : lattice) v = 2.0 * uniform01(rng) - 1.0;
    }

    double at(double x, double y) const {
        const double gx = x / cell;
        const double gy = y / cell;
        const int ix = std::min(static_cast<int>(gx), cells_x - 2);
        const int iy = std::min(static_cast<int>(gy), cells_y - 2);
        const double fx = gx - ix;
        const double fy = gy - iy;
        auto l = [&](int cx, int cy) { return lattice[static_cast<size_t>(cy) * cells_x + cx]; };
        const double top = l(ix, iy) * (1.0 - fx) + l(ix + 1, iy) * fx;
        const double bot = l(ix, iy + 1) * (1.0 - fx) + l(ix + 1, iy + 1) * fx;
        return top * (1.0 - fy) + bot * fy;
    }
};

class TextureSampler {
public:
    TextureSampler(const TextureSpec& spec, int width, int height, std::mt19937_64& rng)
        : spec_(spec) {
        if (spec.period_px <= 0.0) throw std::invalid_argument("texture period must be > 0");
        for (double& p : phase_) p = kTwoPi * uniform01(rng);
        if (spec.kind == TextureSpec::Kind::blotch) {
            noise_ = std::make_unique<ValueNoise>(width, height, spec.period_px, rng);
        }
        const double angle = spec.angle_deg * kTwoPi / 360.0;
        ux_ = std::cos(angle);
        uy_ = std::sin(angle);
    }

    double value(int x, int y, int c) const {
        double pattern;
        if (spec_.kind == TextureSpec::Kind::stripes) {
            const double t = (ux_ * x + uy_ * y) * kTwoPi / spec_.period_px;
            pattern = std::sin(t + phase_[static_cast<size_t>(c)]);
        } else {
            pattern = noise_->at(x, y);
        }
        return spec_.base[static_cast<size_t>(c)] +
               spec_.amplitude * spec_.channel_gain[static_cast<size_t>(c)] * pattern;
    }

    double noise_sigma() const { return spec_.noise_sigma; }

private:
    TextureSpec spec_;
    std::array<double, 3> phase_{};
    std::unique_ptr<ValueNoise> noise_;
    double ux_ = 1.0, uy_ = 0.0;
};

void gaussian_blur(ImageBuffer& img, double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> kernel(static_cast<size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[static_cast<size_t>(i + radius)] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        sum += kernel[static_cast<size_t>(i + radius)];
    }
    for (double& k : kernel) k /= sum;

    ImageBuffer tmp = img;
    for (int c = 0; c < img.channels; ++c) {
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    acc += kernel[static_cast<size_t>(i + radius)] * img.sample_mirror(x + i, y, c);
                }
                tmp.at(x, y, c) = acc;
            }
        }
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i) {
                    acc += kernel[static_cast<size_t>(i + radius)] * tmp.sample_mirror(x, y + i, c);
                }
                img.at(x, y, c) = acc;
            }
        }
    }
}

} // namespace

SyntheticScene gen_synthetic(int width, int height, const TextureSpec& fg_texture,
                             const TextureSpec& bg_texture, const BlobLayout& blobs,
                             uint64_t seed, double blur_sigma) {
    if (width < 1 || height < 1) throw std::invalid_argument("gen_synthetic: empty image");
    if (blobs.count < 0) throw std::invalid_argument("gen_synthetic: negative blob count");

    std::mt19937_64 rng(seed);
    const TextureSampler fg_sampler(fg_texture, width, height, rng);
    const TextureSampler bg_sampler(bg_texture, width, height, rng);

    // Blob centers keep margin + radius clear of the border.
    struct Disc {
        double cx, cy, r;
    };
    std::vector<Disc> discs;
    for (int i = 0; i < blobs.count; ++i) {
        const double r = blobs.min_radius + (blobs.max_radius - blobs.min_radius) * uniform01(rng);
        const double pad = blobs.margin + r;
        if (2.0 * pad >= width || 2.0 * pad >= height) {
            throw std::invalid_argument("gen_synthetic: blob layout does not fit the image");
        }
        const double cx = pad + (width - 2.0 * pad) * uniform01(rng);
        const double cy = pad + (height - 2.0 * pad) * uniform01(rng);
        discs.push_back({cx, cy, r});
    }

    SyntheticScene scene;
    scene.fg = BinaryMask(width, height);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            for (const Disc& d : discs) {
                const double dx = x - d.cx;
                const double dy = y - d.cy;
                if (dx * dx + dy * dy <= d.r * d.r) {
                    scene.fg.set(x, y, true);
                    break;
                }
            }
        }
    }
    scene.bg = BinaryMask(width, height);
    for (size_t i = 0; i < scene.bg.bits.size(); ++i) scene.bg.bits[i] = scene.fg.bits[i] ? 0 : 1;

    scene.image = ImageBuffer(width, height, 3);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const TextureSampler& tex = scene.fg.at(x, y) ? fg_sampler : bg_sampler;
            for (int c = 0; c < 3; ++c) {
                double v = tex.value(x, y, c) + tex.noise_sigma() * normal01(rng);
                scene.image.at(x, y, c) = std::clamp(v, 0.0, 1.0);
            }
        }
    }
    if (blur_sigma > 0.0) {
        gaussian_blur(scene.image, blur_sigma);
        for (double& v : scene.image.data) v = std::clamp(v, 0.0, 1.0);
    }
    return scene;
}

} // namespace lsksvd
