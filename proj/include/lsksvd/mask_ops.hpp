#pragma once

#include "lsksvd/image.hpp"

namespace lsksvd {

/// Remove 4-connected foreground components smaller than min_segment_area
/// pixels. Never adds foreground.
BinaryMask post_process(const BinaryMask& mask, int min_segment_area);

/// Intersection over union; 1 when both masks are empty.
double compute_iou(const BinaryMask& a, const BinaryMask& b);

} // namespace lsksvd
