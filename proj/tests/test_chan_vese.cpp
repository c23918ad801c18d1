#include <doctest.h>

#include <cmath>
#include <random>

#include "lsksvd/chan_vese.hpp"
#include "lsksvd/mask_ops.hpp"
#include "oracles.hpp"

using namespace lsksvd;

namespace {

// Left half 0.2, right half 0.8.
ImageBuffer two_constant(int w, int h) {
    ImageBuffer img(w, h, 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) img.at(x, y, 0) = x < w / 2 ? 0.2 : 0.8;
    }
    return img;
}

} // namespace

TEST_CASE("region means are exact arithmetic means") {
    std::mt19937 rng(300);
    ImageBuffer img(10, 8, 3);
    for (double& v : img.data) v = (rng() % 1000) / 999.0;
    Field phi(10, 8);
    for (double& v : phi.v) v = (rng() % 5) - 2.0;

    const CvMeans means = cv_region_means(img, phi);
    for (int c = 0; c < 3; ++c) {
        double sum = 0.0;
        int count = 0;
        for (int y = 0; y < 8; ++y) {
            for (int x = 0; x < 10; ++x) {
                if (phi.at(x, y) > 0.0) {
                    sum += img.at(x, y, c);
                    ++count;
                }
            }
        }
        REQUIRE(count > 0);
        CHECK(means.c1[static_cast<size_t>(c)] == doctest::Approx(sum / count).epsilon(1e-14));
    }
}

TEST_CASE("an empty region falls back to the global mean") {
    ImageBuffer img(4, 4, 1);
    for (int i = 0; i < 16; ++i) img.data[static_cast<size_t>(i)] = i / 15.0;
    Field phi(4, 4, -1.0); // no foreground
    const CvMeans means = cv_region_means(img, phi);
    double global = 0.0;
    for (double v : img.data) global += v;
    global /= 16.0;
    CHECK(means.c1[0] == doctest::Approx(global).epsilon(1e-14));
}

TEST_CASE("fidelity part of the force is antisymmetric under phi negation + weight swap") {
    std::mt19937 rng(301);
    ImageBuffer img(12, 9, 3);
    for (double& v : img.data) v = (rng() % 1000) / 999.0;
    Field phi(12, 9);
    for (double& v : phi.v) v = (rng() % 2 == 0) ? 1.5 : -1.5; // nonzero everywhere

    Field neg = phi;
    for (double& v : neg.v) v = -v;

    // mu = nu = 0 isolates the fidelity terms.
    const Field f = baseline_cv_force(img, phi, 2.0, 0.5, 0.0, 0.0, CvMode::vector);
    const Field g = baseline_cv_force(img, neg, 0.5, 2.0, 0.0, 0.0, CvMode::vector);
    for (size_t i = 0; i < f.v.size(); ++i) {
        CHECK(f.v[i] == doctest::Approx(-g.v[i]).epsilon(1e-12));
    }
}

TEST_CASE("scalar mode requires one channel, a_star requires three") {
    ImageBuffer rgb(4, 4, 3, 0.5);
    Field phi(4, 4, 1.0);
    CHECK_THROWS(baseline_cv_force(rgb, phi, 1, 1, 0, 0, CvMode::scalar));
    ImageBuffer gray(4, 4, 1, 0.5);
    CHECK_THROWS(baseline_cv_force(gray, phi, 1, 1, 0, 0, CvMode::a_star));
}

TEST_CASE("vector Chan-Vese segments a two-constant image perfectly") {
    const ImageBuffer img = two_constant(64, 64);
    SegParams params;
    params.mu = 0.2;
    params.nu = 0.0;
    params.radius = 6.0;
    params.spacing = 16.0;
    params.max_steps = 400;
    const EvolveResult r = evolve_chan_vese(img, CvMode::vector, 1.0, 1.0, params);

    BinaryMask bright(64, 64);
    for (int y = 0; y < 64; ++y) {
        for (int x = 32; x < 64; ++x) bright.set(x, y, true);
    }
    BinaryMask dark(64, 64);
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 32; ++x) dark.set(x, y, true);
    }
    const double iou = std::max(compute_iou(r.mask, bright), compute_iou(r.mask, dark));
    CHECK(iou == 1.0);
    CHECK(r.converged);
}
