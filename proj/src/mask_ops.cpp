#include "lsksvd/mask_ops.hpp"

#include <stdexcept>
#include <vector>

namespace lsksvd {

BinaryMask post_process(const BinaryMask& mask, int min_segment_area) {
    if (min_segment_area < 0) throw std::invalid_argument("post_process: negative threshold");
    if (min_segment_area == 0) return mask;

    const int w = mask.width;
    const int h = mask.height;
    BinaryMask out(w, h);
    std::vector<char> visited(mask.bits.size(), 0);
    std::vector<int> stack, component;

    for (int start = 0; start < w * h; ++start) {
        if (!mask.bits[static_cast<size_t>(start)] || visited[static_cast<size_t>(start)]) continue;
        // Flood-fill one 4-connected component.
        component.clear();
        stack.assign(1, start);
        visited[static_cast<size_t>(start)] = 1;
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            component.push_back(p);
            const int x = p % w;
            const int y = p / w;
            const int neighbors[4] = {x > 0 ? p - 1 : -1, x < w - 1 ? p + 1 : -1,
                                      y > 0 ? p - w : -1, y < h - 1 ? p + w : -1};
            for (int q : neighbors) {
                if (q >= 0 && mask.bits[static_cast<size_t>(q)] && !visited[static_cast<size_t>(q)]) {
                    visited[static_cast<size_t>(q)] = 1;
                    stack.push_back(q);
                }
            }
        }
        if (static_cast<int>(component.size()) >= min_segment_area) {
            for (int p : component) out.bits[static_cast<size_t>(p)] = 1;
        }
    }
    return out;
}

double compute_iou(const BinaryMask& a, const BinaryMask& b) {
    if (a.width != b.width || a.height != b.height) {
        throw std::invalid_argument("compute_iou: dimension mismatch");
    }
    size_t inter = 0, uni = 0;
    for (size_t i = 0; i < a.bits.size(); ++i) {
        const bool av = a.bits[i] != 0;
        const bool bv = b.bits[i] != 0;
        inter += (av && bv);
        uni += (av || bv);
    }
    if (uni == 0) return 1.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

} // namespace lsksvd
