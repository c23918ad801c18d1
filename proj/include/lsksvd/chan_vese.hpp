#pragma once

#include "lsksvd/image.hpp"
#include "lsksvd/level_set.hpp"

namespace lsksvd {

/// Intensity-based Chan-Vese baselines sharing the level-set machinery.
enum class CvMode {
    scalar, // single-channel input
    vector, // channel-summed fidelity
    a_star, // scalar on the CIELAB a* channel of an RGB input
};

/// Region mean intensities per channel over {phi > 0} / {phi <= 0}; an empty
/// region falls back to the global mean.
struct CvMeans {
    std::vector<double> c1;
    std::vector<double> c2;
};
CvMeans cv_region_means(const ImageBuffer& image, const Field& phi);

/// f = mu*kappa - nu - l1*||I - c1||^2 + l2*||I - c2||^2 with the means taken
/// from the current phi. a_star mode first isolates the a* channel.
Field baseline_cv_force(const ImageBuffer& image, const Field& phi, double l1, double l2,
                        double mu, double nu, CvMode mode);

/// Narrow-band evolution of the Chan-Vese functional (same band, CFL,
/// reinitialization and convergence scheme as the dictionary flow).
EvolveResult evolve_chan_vese(const ImageBuffer& image, CvMode mode, double l1, double l2,
                              const SegParams& params);

} // namespace lsksvd
