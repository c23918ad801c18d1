#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "lsksvd/classify.hpp"
#include "lsksvd/pursuit.hpp"
#include "oracles.hpp"

using namespace lsksvd;

TEST_CASE("classify_patch prefers the dictionary that spans the signal") {
    const Dictionary d1 = oracle::random_dictionary(10, 8, 400);
    const Dictionary d2 = oracle::random_dictionary(10, 8, 401);
    const CorrelationMatrix eye = CorrelationMatrix::identity(10, 0.0);

    std::mt19937 rng(402);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd patch = 1.3 * d1.atoms.col(2) - 0.7 * d1.atoms.col(5);
    const Classification c = classify_patch(patch, d1, d2, eye, eye, 3);
    CHECK(c.label == 1);
    CHECK(c.score > 0.0);
}

TEST_CASE("classify_patch ties go to class 2") {
    // Atoms span e0..e2 in both dictionaries; the signal lives on e3, so both
    // pursuits leave the identical residual.
    Dictionary d1, d2;
    d1.atoms = Eigen::MatrixXd::Identity(4, 3);
    d2.atoms = Eigen::MatrixXd::Identity(4, 3);
    d2.atoms(0, 0) = -1.0;
    const CorrelationMatrix eye = CorrelationMatrix::identity(4, 0.0);
    Eigen::VectorXd patch = Eigen::VectorXd::Unit(4, 3) * 2.0;
    const Classification c = classify_patch(patch, d1, d2, eye, eye, 2);
    CHECK(c.score == 0.0);
    CHECK(c.label == 2);
}

TEST_CASE("classify_patch matches a naive reimplementation on synthetic patches") {
    const Dictionary d1 = oracle::random_dictionary(12, 16, 410);
    const Dictionary d2 = oracle::random_dictionary(12, 16, 411);
    std::mt19937 rng(412);
    std::normal_distribution<double> gauss;

    // Per-class reference statistics from sample batches.
    auto make_batch = [&](const Dictionary& d, int n) {
        Eigen::MatrixXd batch(12, n);
        for (int c = 0; c < n; ++c) {
            Eigen::VectorXd s = Eigen::VectorXd::Zero(12);
            for (int t = 0; t < 3; ++t) s += gauss(rng) * d.atoms.col(rng() % 16);
            for (int i = 0; i < 12; ++i) s[i] += 0.05 * gauss(rng);
            batch.col(c) = s;
        }
        return batch;
    };
    const Eigen::MatrixXd b1 = make_batch(d1, 80);
    const Eigen::MatrixXd b2 = make_batch(d2, 80);
    const CorrelationMatrix c1 =
        correlation_matrix(b1 - d1.atoms * batch_omp(d1, b1, 3), 1e-3);
    const CorrelationMatrix c2 =
        correlation_matrix(b2 - d2.atoms * batch_omp(d2, b2, 3), 1e-3);

    int label1 = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const Dictionary& source = trial % 2 == 0 ? d1 : d2;
        Eigen::VectorXd patch = Eigen::VectorXd::Zero(12);
        for (int t = 0; t < 3; ++t) patch += gauss(rng) * source.atoms.col(rng() % 16);
        for (int i = 0; i < 12; ++i) patch[i] += 0.05 * gauss(rng);

        const Classification got = classify_patch(patch, d1, d2, c1, c2, 3);

        // Naive: independent pursuit + explicit quadratic forms.
        const auto a1 = oracle::naive_omp(d1.atoms, patch, 3);
        const auto a2 = oracle::naive_omp(d2.atoms, patch, 3);
        const Eigen::VectorXd e1 = patch - d1.atoms * a1.coefficients;
        const Eigen::VectorXd e2 = patch - d2.atoms * a2.coefficients;
        const double q1 = e1.dot(c1.C.inverse() * e1);
        const double q2 = e2.dot(c2.C.inverse() * e2);
        const double ref_score = q2 - q1;
        const int ref_label = ref_score > 0.0 ? 1 : 2;

        CHECK(got.label == ref_label);
        CHECK(got.score == doctest::Approx(ref_score).epsilon(1e-9));
        label1 += got.label == 1;
    }
    CHECK(label1 > 100); // both classes actually appear
    CHECK(label1 < 300);
}

TEST_CASE("classify_patch l2 mode ignores the correlation metric") {
    const Dictionary d1 = oracle::random_dictionary(8, 6, 420);
    const Dictionary d2 = oracle::random_dictionary(8, 6, 421);
    // Deliberately nonsensical metrics: l2 must not look at them.
    CorrelationMatrix junk = CorrelationMatrix::identity(8, 123.0);
    std::mt19937 rng(422);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd patch(8);
    for (int i = 0; i < 8; ++i) patch[i] = gauss(rng);

    const Classification c = classify_patch(patch, d1, d2, junk, junk, 2, ScoreNorm::l2);
    const Eigen::VectorXd e1 = patch - d1.atoms * omp(d1, patch, 2).coefficients;
    const Eigen::VectorXd e2 = patch - d2.atoms * omp(d2, patch, 2).coefficients;
    CHECK(c.score == doctest::Approx(e2.squaredNorm() - e1.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("roc_curve on perfectly separated scores") {
    const std::vector<double> scores = {5.0, 4.0, 3.0, -1.0, -2.0, -3.0};
    const std::vector<int> labels = {1, 1, 1, 2, 2, 2};
    const RocCurve roc = roc_curve(scores, labels);
    CHECK(roc.auc == doctest::Approx(1.0));
    bool hits_corner = false;
    for (const auto& p : roc.points) {
        if (p.fpr == 0.0 && p.tpr == 1.0) hits_corner = true;
    }
    CHECK(hits_corner);
    CHECK(roc.points.front().fpr == 0.0);
    CHECK(roc.points.front().tpr == 0.0);
    CHECK(roc.points.back().fpr == 1.0);
    CHECK(roc.points.back().tpr == 1.0);
}

TEST_CASE("roc_curve of label-independent scores has AUC about one half") {
    std::mt19937 rng(430);
    std::normal_distribution<double> gauss;
    std::vector<double> scores(10000);
    std::vector<int> labels(10000);
    for (int i = 0; i < 10000; ++i) {
        scores[static_cast<size_t>(i)] = gauss(rng);
        labels[static_cast<size_t>(i)] = rng() % 2 == 0 ? 1 : 2;
    }
    const RocCurve roc = roc_curve(scores, labels);
    CHECK(std::abs(roc.auc - 0.5) < 0.02);
}

TEST_CASE("roc_curve hand-computed four-point case") {
    const std::vector<double> scores = {0.1, 0.4, 0.35, 0.8};
    const std::vector<int> labels = {2, 2, 1, 1};
    const RocCurve roc = roc_curve(scores, labels);
    CHECK(roc.auc == doctest::Approx(0.75));
    CHECK(roc.points.size() == 4 + 2); // distinct scores + 2 sentinels
}

TEST_CASE("roc_curve rejects degenerate inputs") {
    CHECK_THROWS(roc_curve({1.0, 2.0}, {1, 1}));
    CHECK_THROWS(roc_curve({1.0}, {1, 2}));
}

TEST_CASE("roc properties: monotone invariance, complement symmetry, Mann-Whitney") {
    std::mt19937 rng(431);
    std::normal_distribution<double> gauss;
    std::vector<double> scores(200);
    std::vector<int> labels(200);
    for (int i = 0; i < 200; ++i) {
        labels[static_cast<size_t>(i)] = i % 2 == 0 ? 1 : 2;
        scores[static_cast<size_t>(i)] = gauss(rng) + (labels[static_cast<size_t>(i)] == 1 ? 0.8 : 0.0);
    }

    const RocCurve base = roc_curve(scores, labels);

    // Strictly increasing transform leaves the curve untouched.
    std::vector<double> warped = scores;
    for (double& s : warped) s = std::atan(2.0 * s) + 3.0;
    const RocCurve same = roc_curve(warped, labels);
    REQUIRE(same.points.size() == base.points.size());
    for (size_t i = 0; i < base.points.size(); ++i) {
        CHECK(same.points[i].fpr == base.points[i].fpr);
        CHECK(same.points[i].tpr == base.points[i].tpr);
    }
    CHECK(same.auc == doctest::Approx(base.auc).epsilon(1e-12));

    // Tie-free inputs: AUC(s) + AUC(-s) = 1.
    std::vector<double> negated = scores;
    for (double& s : negated) s = -s;
    const RocCurve flipped = roc_curve(negated, labels);
    CHECK(base.auc + flipped.auc == doctest::Approx(1.0).epsilon(1e-9));

    // Trapezoidal AUC equals the Mann-Whitney pair statistic.
    CHECK(base.auc == doctest::Approx(oracle::mann_whitney_auc(scores, labels)).epsilon(1e-9));

    // With ties across classes the two still agree (half credit per tie).
    std::vector<double> tied = scores;
    for (size_t i = 0; i < 40; ++i) tied[i] = 0.25;
    const RocCurve tied_roc = roc_curve(tied, labels);
    CHECK(tied_roc.auc == doctest::Approx(oracle::mann_whitney_auc(tied, labels)).epsilon(1e-9));
}

TEST_CASE("format_roc emits rows plus an AUC line") {
    const RocCurve roc = roc_curve({0.1, 0.9}, {2, 1});
    const std::string text = format_roc(roc);
    CHECK(text.find("auc\t") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 4 + 1);
}
