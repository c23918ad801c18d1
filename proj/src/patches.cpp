#include "lsksvd/patches.hpp"

#include <cmath>
#include <stdexcept>

#include "lsksvd/rng.hpp"

namespace lsksvd {

PatchVector extract_patch(const ImageBuffer& image, int cx, int cy, int patch_size) {
    if (!image.valid()) throw std::invalid_argument("extract_patch: invalid image");
    if (patch_size < 1) throw std::invalid_argument("extract_patch: patch_size must be >= 1");
    if (cx < 0 || cy < 0 || cx >= image.width || cy >= image.height) {
        throw std::out_of_range("extract_patch: center outside image bounds");
    }
    const int s = patch_size;
    // Odd s: symmetric window. Even s: center is the top-left of the central
    // 2x2, so the window spans [-(s/2-1), s/2].
    const int lo = s % 2 == 1 ? -(s - 1) / 2 : -(s / 2 - 1);

    PatchVector p;
    p.center_x = cx;
    p.center_y = cy;
    p.patch_size = s;
    p.channels = image.channels;
    p.values.resize(p.dim());
    int i = 0;
    for (int c = 0; c < image.channels; ++c) {
        for (int dy = 0; dy < s; ++dy) {
            for (int dx = 0; dx < s; ++dx) {
                p.values[i++] = image.sample_mirror(cx + lo + dx, cy + lo + dy, c);
            }
        }
    }
    return p;
}

namespace {

std::vector<std::pair<int, int>> grid_centers(const BinaryMask& mask, int stride) {
    std::vector<std::pair<int, int>> centers;
    for (int y = 0; y < mask.height; y += stride) {
        for (int x = 0; x < mask.width; x += stride) {
            if (mask.at(x, y)) centers.emplace_back(x, y);
        }
    }
    return centers;
}

} // namespace

Dataset build_dataset(const ImageBuffer& image, const BinaryMask& fg_mask,
                      const BinaryMask& bg_mask, int patch_size, int stride,
                      bool balance, double split_ratio, uint64_t seed) {
    if (fg_mask.width != image.width || fg_mask.height != image.height ||
        bg_mask.width != image.width || bg_mask.height != image.height) {
        throw std::invalid_argument("build_dataset: mask dimensions must match image");
    }
    if (stride < 1) throw std::invalid_argument("build_dataset: stride must be >= 1");
    if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
        throw std::invalid_argument("build_dataset: split_ratio must be in (0,1)");
    }
    for (size_t i = 0; i < fg_mask.bits.size(); ++i) {
        if (fg_mask.bits[i] && bg_mask.bits[i]) {
            throw std::invalid_argument("build_dataset: fg and bg masks overlap");
        }
    }

    auto fg_centers = grid_centers(fg_mask, stride);
    auto bg_centers = grid_centers(bg_mask, stride);
    if (fg_centers.empty() || bg_centers.empty()) {
        throw std::runtime_error("build_dataset: a class is empty after extraction");
    }

    std::mt19937_64 rng(seed);
    if (balance) {
        // Random under-sampling of the majority class to a 1:1 ratio.
        auto& major = fg_centers.size() >= bg_centers.size() ? fg_centers : bg_centers;
        const size_t target = std::min(fg_centers.size(), bg_centers.size());
        shuffle_vec(major, rng);
        major.resize(target);
    }

    Dataset ds;
    ds.seed = seed;
    ds.patch_size = patch_size;
    ds.channels = image.channels;

    // Per-class shuffle and split keeps the train fraction exact within each
    // class; the pooled lists are shuffled afterwards.
    auto split_class = [&](std::vector<std::pair<int, int>>& centers, int label) {
        shuffle_vec(centers, rng);
        const size_t n_train =
            static_cast<size_t>(std::llround(split_ratio * static_cast<double>(centers.size())));
        for (size_t i = 0; i < centers.size(); ++i) {
            LabeledPatch lp;
            lp.patch = extract_patch(image, centers[i].first, centers[i].second, patch_size);
            lp.label = label;
            (i < n_train ? ds.train : ds.test).push_back(std::move(lp));
        }
    };
    split_class(fg_centers, 1);
    split_class(bg_centers, 2);
    shuffle_vec(ds.train, rng);
    shuffle_vec(ds.test, rng);
    return ds;
}

Eigen::MatrixXd patches_to_matrix(const std::vector<LabeledPatch>& patches, int label) {
    std::vector<const PatchVector*> sel;
    for (const auto& lp : patches) {
        if (label == 0 || lp.label == label) sel.push_back(&lp.patch);
    }
    if (sel.empty()) return Eigen::MatrixXd(0, 0);
    Eigen::MatrixXd m(sel[0]->values.size(), sel.size());
    for (size_t i = 0; i < sel.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = sel[i]->values;
    return m;
}

} // namespace lsksvd
