#include "lsksvd/chan_vese.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lsksvd {

namespace {

const ImageBuffer& mode_image(const ImageBuffer& image, CvMode mode, ImageBuffer& storage) {
    switch (mode) {
        case CvMode::scalar:
            if (image.channels != 1) {
                throw std::invalid_argument("chan-vese scalar mode needs a 1-channel image");
            }
            return image;
        case CvMode::vector:
            return image;
        case CvMode::a_star:
            storage = lab_a_channel(image);
            return storage;
    }
    throw std::logic_error("unreachable");
}

// Squared distance of pixel (x,y) to a per-channel mean, channel-summed.
double sq_dist(const ImageBuffer& img, int x, int y, const std::vector<double>& mean) {
    double s = 0.0;
    for (int c = 0; c < img.channels; ++c) {
        const double d = img.at(x, y, c) - mean[static_cast<size_t>(c)];
        s += d * d;
    }
    return s;
}

} // namespace

CvMeans cv_region_means(const ImageBuffer& image, const Field& phi) {
    if (image.width != phi.width || image.height != phi.height) {
        throw std::invalid_argument("cv_region_means: image/phi dimension mismatch");
    }
    CvMeans means;
    means.c1.assign(static_cast<size_t>(image.channels), 0.0);
    means.c2.assign(static_cast<size_t>(image.channels), 0.0);
    std::vector<double> global(static_cast<size_t>(image.channels), 0.0);
    size_t n1 = 0, n2 = 0;
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            const bool fg = phi.at(x, y) > 0.0;
            (fg ? n1 : n2) += 1;
            for (int c = 0; c < image.channels; ++c) {
                const double v = image.at(x, y, c);
                (fg ? means.c1 : means.c2)[static_cast<size_t>(c)] += v;
                global[static_cast<size_t>(c)] += v;
            }
        }
    }
    const double total = static_cast<double>(image.pixel_count());
    for (int c = 0; c < image.channels; ++c) {
        const auto ci = static_cast<size_t>(c);
        global[ci] /= total;
        means.c1[ci] = n1 > 0 ? means.c1[ci] / static_cast<double>(n1) : global[ci];
        means.c2[ci] = n2 > 0 ? means.c2[ci] / static_cast<double>(n2) : global[ci];
    }
    return means;
}

Field baseline_cv_force(const ImageBuffer& image, const Field& phi, double l1, double l2,
                        double mu, double nu, CvMode mode) {
    ImageBuffer storage;
    const ImageBuffer& img = mode_image(image, mode, storage);
    const CvMeans means = cv_region_means(img, phi);

    Field f(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            f.at(x, y) = mu * curvature(phi, x, y) - nu - l1 * sq_dist(img, x, y, means.c1) +
                         l2 * sq_dist(img, x, y, means.c2);
        }
    }
    return f;
}

EvolveResult evolve_chan_vese(const ImageBuffer& image, CvMode mode, double l1, double l2,
                              const SegParams& params) {
    ImageBuffer storage;
    const ImageBuffer& img = mode_image(image, mode, storage);
    const double tau = params.band_half_width();

    EvolveResult result;
    Field phi = init_phi_checkerboard(img.width, img.height, params.radius, params.spacing);
    ConvergenceMonitor monitor;

    std::vector<int> band;
    std::vector<double> band_force;
    for (int step = 1; step <= params.max_steps; ++step) {
        band.clear();
        for (size_t i = 0; i < phi.v.size(); ++i) {
            if (std::abs(phi.v[i]) < tau) band.push_back(static_cast<int>(i));
        }
        if (band.empty()) break;

        const CvMeans means = cv_region_means(img, phi);
        band_force.resize(band.size());
        for (size_t i = 0; i < band.size(); ++i) {
            const int x = band[i] % img.width;
            const int y = band[i] / img.width;
            // Same grid-scale curvature clamp as the dictionary flow.
            const double kappa = std::clamp(curvature(phi, x, y), -1.0, 1.0);
            band_force[i] = params.mu * kappa - params.nu -
                            l1 * sq_dist(img, x, y, means.c1) + l2 * sq_dist(img, x, y, means.c2);
        }

        StepStats stats;
        stats.step = step;
        stats.band_size = static_cast<int>(band.size());
        const double dt = cfl_dt(band_force);
        stats.dt = dt;
        for (double f : band_force) stats.max_force = std::max(stats.max_force, std::abs(f));

        for (size_t i = 0; i < band.size(); ++i) {
            phi.v[static_cast<size_t>(band[i])] += dt * band_force[i];
        }
        if (params.reinit_every > 0 && step % params.reinit_every == 0) {
            phi = sussman_reinit(phi, params.reinit_sweeps);
        }

        double area = 0.0;
        for (double p : phi.v) area += heaviside(p, params.eps_h);
        stats.area = area;
        result.converged = convergence_step(monitor, area, params.d, params.patience);
        stats.ratio = monitor.last_ratio;
        result.trace.push_back(stats);
        if (result.converged) break;
    }

    BinaryMask mask(phi.width, phi.height);
    for (size_t i = 0; i < phi.v.size(); ++i) mask.bits[i] = phi.v[i] > 0.0 ? 1 : 0;
    result.mask = std::move(mask);
    result.phi = std::move(phi);
    return result;
}

} // namespace lsksvd
