#include "lsksvd/level_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <stdexcept>

#include "lsksvd/pursuit.hpp"

namespace lsksvd {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double heaviside(double z, double eps) {
    return 0.5 * (1.0 + (2.0 / kPi) * std::atan(z / eps));
}

double delta(double z, double eps) {
    return (1.0 / kPi) * eps / (eps * eps + z * z);
}

Field init_phi_checkerboard(int width, int height, double radius, double spacing) {
    if (radius <= 0.0) throw std::invalid_argument("init_phi_checkerboard: radius must be > 0");
    if (!(radius < spacing / 2.0)) {
        throw std::invalid_argument("init_phi_checkerboard: radius must be < spacing/2");
    }
    // Circle centers on a square lattice offset half a cell from the origin.
    std::vector<double> cx, cy;
    for (double c = spacing / 2.0; c < width; c += spacing) cx.push_back(c);
    for (double c = spacing / 2.0; c < height; c += spacing) cy.push_back(c);
    if (cx.empty() || cy.empty()) {
        throw std::invalid_argument("init_phi_checkerboard: spacing exceeds image size");
    }

    Field phi(width, height);
    for (int y = 0; y < height; ++y) {
        // The lattice is separable: the nearest center minimizes each axis
        // distance independently.
        double best_dy = std::numeric_limits<double>::infinity();
        for (double c : cy) best_dy = std::min(best_dy, std::abs(y - c));
        for (int x = 0; x < width; ++x) {
            double best_dx = std::numeric_limits<double>::infinity();
            for (double c : cx) best_dx = std::min(best_dx, std::abs(x - c));
            phi.at(x, y) = radius - std::hypot(best_dx, best_dy);
        }
    }
    return phi;
}

double curvature(const Field& phi, int x, int y) {
    auto p = [&](int xi, int yi) {
        return phi.at(mirror_index(xi, phi.width), mirror_index(yi, phi.height));
    };
    const double center = p(x, y);
    const double px = (p(x + 1, y) - p(x - 1, y)) / 2.0;
    const double py = (p(x, y + 1) - p(x, y - 1)) / 2.0;
    const double pxx = p(x + 1, y) - 2.0 * center + p(x - 1, y);
    const double pyy = p(x, y + 1) - 2.0 * center + p(x, y - 1);
    const double pxy = (p(x + 1, y + 1) - p(x + 1, y - 1) - p(x - 1, y + 1) + p(x - 1, y - 1)) / 4.0;
    const double grad2 = px * px + py * py;
    if (grad2 < 1e-12) return 0.0;
    return (pxx * py * py - 2.0 * pxy * px * py + pyy * px * px) / std::pow(grad2, 1.5);
}

Field force_field(const Field& kappa, const Field& fid1, const Field& fid2,
                  double mu, double nu) {
    Field f(kappa.width, kappa.height);
    for (size_t i = 0; i < f.v.size(); ++i) {
        f.v[i] = mu * kappa.v[i] - nu - fid1.v[i] + fid2.v[i];
    }
    return f;
}

double cfl_dt(std::span<const double> band_force) {
    if (band_force.empty()) throw std::invalid_argument("cfl_dt: empty band");
    double max_abs = 0.0;
    for (double f : band_force) max_abs = std::max(max_abs, std::abs(f));
    if (max_abs < 1e-12) return 1.0;
    return 0.45 / max_abs;
}

Field sussman_reinit(const Field& phi, int sweeps) {
    if (sweeps < 1) throw std::invalid_argument("sussman_reinit: sweeps must be >= 1");
    const int w = phi.width;
    const int h = phi.height;
    const double h_grid = 1.0;
    const double dtau = 0.5 * h_grid;

    // Smoothed sign of the *input* field, fixed across sweeps.
    Field sign(w, h);
    for (size_t i = 0; i < sign.v.size(); ++i) {
        const double p0 = phi.v[i];
        sign.v[i] = p0 / std::sqrt(p0 * p0 + h_grid * h_grid);
    }

    Field cur = phi;
    Field next(w, h);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (int y = 0; y < h; ++y) {
            const int ym = mirror_index(y - 1, h);
            const int yp = mirror_index(y + 1, h);
            for (int x = 0; x < w; ++x) {
                const int xm = mirror_index(x - 1, w);
                const int xp = mirror_index(x + 1, w);
                const double p = cur.at(x, y);
                const double a = p - cur.at(xm, y); // backward x
                const double b = cur.at(xp, y) - p; // forward x
                const double c = p - cur.at(x, ym); // backward y
                const double d = cur.at(x, yp) - p; // forward y

                const double p0 = phi.v[static_cast<size_t>(y) * w + x];
                double grad = 0.0;
                if (p0 > 0.0) {
                    const double ap = std::max(a, 0.0), bn = std::min(b, 0.0);
                    const double cp = std::max(c, 0.0), dn = std::min(d, 0.0);
                    grad = std::sqrt(std::max(ap * ap, bn * bn) + std::max(cp * cp, dn * dn));
                } else if (p0 < 0.0) {
                    const double an = std::min(a, 0.0), bp = std::max(b, 0.0);
                    const double cn = std::min(c, 0.0), dp = std::max(d, 0.0);
                    grad = std::sqrt(std::max(an * an, bp * bp) + std::max(cn * cn, dp * dp));
                }
                next.at(x, y) = p + dtau * sign.at(x, y) * (1.0 - grad);
            }
        }
        std::swap(cur.v, next.v);
    }
    return cur;
}

bool convergence_step(ConvergenceMonitor& monitor, double area, double d, int patience) {
    if (area < 0.0) throw std::invalid_argument("convergence_step: negative area");
    if (monitor.areas.empty()) {
        monitor.areas.push_back(area);
        monitor.counter = 0;
        monitor.last_ratio = 0.0;
        return false;
    }
    const double delta_t = area - monitor.areas.back();
    monitor.areas.push_back(area);
    monitor.last_ratio = std::abs(delta_t) / std::max(area, 1.0);
    if (monitor.last_ratio < d) {
        ++monitor.counter;
    } else {
        monitor.counter = 0;
    }
    return monitor.counter >= patience;
}

namespace {

BinaryMask mask_from_phi(const Field& phi) {
    BinaryMask mask(phi.width, phi.height);
    for (size_t i = 0; i < phi.v.size(); ++i) mask.bits[i] = phi.v[i] > 0.0 ? 1 : 0;
    return mask;
}

// Gather the listed columns of E into a dense block.
Eigen::MatrixXd gather_columns(const Eigen::MatrixXd& m, const std::vector<int>& cols) {
    Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(cols.size()));
    for (size_t i = 0; i < cols.size(); ++i) {
        out.col(static_cast<Eigen::Index>(i)) = m.col(cols[i]);
    }
    return out;
}

} // namespace

EvolveResult evolve_fields(const ErrorMatrix& e1, const ErrorMatrix& e2, int width,
                           int height, const SegParams& params) {
    const Eigen::Index n_pixels = static_cast<Eigen::Index>(width) * height;
    if (e1.E.cols() != n_pixels || e2.E.cols() != n_pixels) {
        throw std::invalid_argument("evolve_fields: error matrices do not cover the image");
    }
    const int k1 = static_cast<int>(e1.E.rows());
    const int k2 = static_cast<int>(e2.E.rows());
    const double tau = params.band_half_width();

    EvolveResult result;
    Field phi = init_phi_checkerboard(width, height, params.radius, params.spacing);
    ConvergenceMonitor monitor;

    std::vector<int> band, fg_cols, bg_cols;
    std::vector<double> band_force;
    for (int step = 1; step <= params.max_steps; ++step) {
        band.clear();
        for (Eigen::Index i = 0; i < n_pixels; ++i) {
            if (std::abs(phi.v[static_cast<size_t>(i)]) < tau) band.push_back(static_cast<int>(i));
        }
        if (band.empty()) break; // nothing left to evolve

        fg_cols.clear();
        bg_cols.clear();
        for (Eigen::Index i = 0; i < n_pixels; ++i) {
            (phi.v[static_cast<size_t>(i)] > 0.0 ? fg_cols : bg_cols).push_back(static_cast<int>(i));
        }

        StepStats stats;
        stats.step = step;
        stats.band_size = static_cast<int>(band.size());

        // Region statistics are recomputed from scratch from the current
        // partition; an emptied region falls back to the identity metric.
        // The two per-class pipelines are independent, so they run as two
        // tasks; each task's arithmetic is self-contained, which keeps the
        // result bitwise deterministic.
        auto fid2_task = std::async(std::launch::async, [&] {
            CorrelationMatrix c2 =
                bg_cols.empty() ? CorrelationMatrix::identity(k2, params.ridge)
                                : correlation_matrix(gather_columns(e2.E, bg_cols), params.ridge);
            return mahalanobis_diag(gather_columns(e2.E, band), c2);
        });
        CorrelationMatrix c1 = fg_cols.empty()
                                   ? CorrelationMatrix::identity(k1, params.ridge)
                                   : correlation_matrix(gather_columns(e1.E, fg_cols), params.ridge);
        stats.c1_fallback = fg_cols.empty();
        stats.c2_fallback = bg_cols.empty();
        const Eigen::VectorXd fid1 = mahalanobis_diag(gather_columns(e1.E, band), c1);
        const Eigen::VectorXd fid2 = fid2_task.get();

        band_force.resize(band.size());
        for (size_t i = 0; i < band.size(); ++i) {
            const int x = band[i] % width;
            const int y = band[i] / width;
            // Between reinitializations phi drifts off the SDF property and
            // the raw stencil curvature can blow up near flattened gradients;
            // features below the grid scale carry no information, so kappa is
            // clamped at 1/h.
            const double kappa = std::clamp(curvature(phi, x, y), -1.0, 1.0);
            band_force[i] = params.mu * kappa - params.nu -
                            fid1[static_cast<Eigen::Index>(i)] + fid2[static_cast<Eigen::Index>(i)];
        }

        const double dt = cfl_dt(band_force);
        stats.dt = dt;
        stats.max_force = 0.0;
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

    result.mask = mask_from_phi(phi);
    result.phi = std::move(phi);
    return result;
}

EvolveResult evolve(const ImageBuffer& image, const Dictionary& d1, const Dictionary& d2,
                    const SegParams& params, int rho, uint64_t seed) {
    (void)seed; // determinism contract only; the flow draws no random numbers
    if (params.max_steps == 0) {
        EvolveResult result;
        result.phi = init_phi_checkerboard(image.width, image.height, params.radius,
                                           params.spacing);
        result.mask = mask_from_phi(result.phi);
        return result;
    }
    const FidelityFields fields = fidelity_fields(image, d1, d2, rho);
    return evolve_fields(fields.e1, fields.e2, image.width, image.height, params);
}

std::string format_trace(const std::vector<StepStats>& trace, bool converged) {
    std::string out = "step\tarea\tratio\tdt\tmax_force\tband_size\n";
    char line[256];
    for (const StepStats& s : trace) {
        std::snprintf(line, sizeof(line), "%d\t%.6f\t%.8f\t%.8g\t%.8g\t%d\n", s.step, s.area,
                      s.ratio, s.dt, s.max_force, s.band_size);
        out += line;
    }
    out += converged ? "# converged\n" : "# not converged\n";
    return out;
}

} // namespace lsksvd
