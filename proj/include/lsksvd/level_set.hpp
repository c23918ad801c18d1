#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lsksvd/dictionary.hpp"
#include "lsksvd/error_stats.hpp"
#include "lsksvd/image.hpp"

namespace lsksvd {

/// Scalar field on the pixel grid (h = 1). Used for phi, curvature, force
/// and fidelity maps.
struct Field {
    int width = 0;
    int height = 0;
    std::vector<double> v;

    Field() = default;
    Field(int w, int h, double fill = 0.0)
        : width(w), height(h), v(static_cast<size_t>(w) * h, fill) {}

    double at(int x, int y) const { return v[static_cast<size_t>(y) * width + x]; }
    double& at(int x, int y) { return v[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return v.size(); }
};

/// Regularized Heaviside H_eps(z) = 1/2 (1 + 2/pi atan(z/eps)) and its
/// derivative delta_eps(z) = eps / (pi (eps^2 + z^2)).
double heaviside(double z, double eps);
double delta(double z, double eps);

/// Signed distance to a union of circles of the given radius centered on a
/// square lattice (spacing apart, offset spacing/2): phi = radius - distance
/// to the nearest center. Positive inside each circle. Requires
/// radius < spacing/2 so the circles stay disjoint.
Field init_phi_checkerboard(int width, int height, double radius, double spacing);

/// Curvature div(grad phi / |grad phi|) from central differences on the 3x3
/// stencil (mirror padding at the border); 0 where the gradient vanishes.
double curvature(const Field& phi, int x, int y);

/// mu*kappa - nu - fid1 + fid2, elementwise.
Field force_field(const Field& kappa, const Field& fid1, const Field& fid2,
                  double mu, double nu);

/// CFL time step dt = 0.45 / max|f| over the band; capped at 1 when the force
/// is (numerically) zero. Throws on an empty band.
double cfl_dt(std::span<const double> band_force);

/// Sussman reinitialization: iterate phi += dtau * S(phi0) (1 - |grad phi|)
/// with the smoothed sign S(phi0) = phi0 / sqrt(phi0^2 + h^2) of the input
/// field and Godunov upwind gradients, dtau = 0.5 h.
Field sussman_reinit(const Field& phi, int sweeps);

struct ConvergenceMonitor {
    std::vector<double> areas;
    int counter = 0;
    double last_ratio = 0.0; // |Delta_t| / max(S_t, 1); 0 before the 2nd area
};

/// Record the foreground area S_t and count consecutive steps whose relative
/// area change stays below d; converged after `patience` consecutive counts.
bool convergence_step(ConvergenceMonitor& monitor, double area, double d, int patience);

struct SegParams {
    double mu = 25.0;   // curvature weight
    double nu = 35.0;   // area weight
    double tau = 0.0;   // band half-width; 0 means "use radius"
    double eps_h = 1.0; // Heaviside regularization width
    double d = 0.005;   // convergence ratio
    int patience = 5;
    int max_steps = 200;
    double radius = 10.0;  // checkerboard circle radius
    double spacing = 30.0; // checkerboard lattice spacing
    int reinit_every = 5;
    int reinit_sweeps = 10;
    double ridge = 1e-3; // correlation matrix ridge

    double band_half_width() const { return tau > 0.0 ? tau : radius; }
};

struct StepStats {
    int step = 0;
    double area = 0.0;
    double ratio = 0.0; // |Delta_t| / max(S_t, 1)
    double dt = 0.0;
    double max_force = 0.0;
    int band_size = 0;
    bool c1_fallback = false; // region emptied, C := I + ridge*I this step
    bool c2_fallback = false;
};

struct EvolveResult {
    BinaryMask mask; // phi > 0
    Field phi;
    std::vector<StepStats> trace;
    bool converged = false;
};

/// Full narrow-band evolution given precomputed per-pixel error matrices
/// (column order n = y*width + x). Per step: band = {|phi| < tau}; curvature
/// on the band; C1 from E1 columns where phi > 0 and C2 from E2 columns where
/// phi <= 0; Mahalanobis fidelities on the band; force; CFL dt; band update;
/// Sussman reinit every reinit_every steps; area convergence check.
EvolveResult evolve_fields(const ErrorMatrix& e1, const ErrorMatrix& e2, int width,
                           int height, const SegParams& params);

/// fidelity_fields + evolve_fields. The seed is part of the determinism
/// contract; the evolution itself draws no random numbers.
EvolveResult evolve(const ImageBuffer& image, const Dictionary& d1, const Dictionary& d2,
                    const SegParams& params, int rho, uint64_t seed);

/// Render the per-step trace as text rows (step, S_t, ratio, dt, max|f|,
/// band size), one line per step plus a header.
std::string format_trace(const std::vector<StepStats>& trace, bool converged);

} // namespace lsksvd
