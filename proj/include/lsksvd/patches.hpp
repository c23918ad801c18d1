#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "lsksvd/image.hpp"

namespace lsksvd {

/// A vectorized s-by-s window of an image. Vectorization order is fixed:
/// channel-major, then row-major within each channel, so entry
/// c*s*s + row*s + col. For even s the "center" is the top-left pixel of the
/// central 2x2, i.e. the window spans [-(s/2-1), s/2] around the center.
struct PatchVector {
    Eigen::VectorXd values;
    int center_x = 0;
    int center_y = 0;
    int patch_size = 0;
    int channels = 0;

    int dim() const { return patch_size * patch_size * channels; }
};

/// Extract the patch centered at (x,y); out-of-bounds samples use mirror
/// padding. Throws if the center lies outside the image.
PatchVector extract_patch(const ImageBuffer& image, int cx, int cy, int patch_size);

struct LabeledPatch {
    PatchVector patch;
    int label = 0; // 1 = foreground, 2 = background
};

struct Dataset {
    std::vector<LabeledPatch> train;
    std::vector<LabeledPatch> test;
    uint64_t seed = 0;
    int patch_size = 0;
    int channels = 0;
};

/// Build a labeled patch dataset from annotation masks. Candidate centers lie
/// on the stride grid anchored at (0,0); a candidate joins class 1 (2) when
/// the foreground (background) mask is set at its center. With balance on,
/// the majority class is randomly under-sampled to the minority count. Each
/// class is shuffled and split by split_ratio independently, so per-class
/// train fractions match the ratio exactly; the pooled train/test lists are
/// then shuffled once more. Deterministic for a fixed seed.
Dataset build_dataset(const ImageBuffer& image, const BinaryMask& fg_mask,
                      const BinaryMask& bg_mask, int patch_size, int stride,
                      bool balance, double split_ratio, uint64_t seed);

/// Stack patch vectors as columns of a k x N matrix.
Eigen::MatrixXd patches_to_matrix(const std::vector<LabeledPatch>& patches, int label);

} // namespace lsksvd
