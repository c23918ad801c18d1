// Independent reference implementations used only by tests. These stay
// deliberately naive (explicit loops, full matrix products, generic solvers)
// so they share no code path with the library.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "lsksvd/dictionary.hpp"

namespace oracle {

struct NaiveOmpResult {
    std::vector<int> support;
    Eigen::VectorXd coefficients; // full length K
};

// Step-by-step greedy pursuit: explicit residual, explicit normal equations
// solved by full-pivoting LU, atoms never reselected, ties to lowest index.
inline NaiveOmpResult naive_omp(const Eigen::MatrixXd& dict, const Eigen::VectorXd& signal,
                                int rho) {
    const int n_atoms = static_cast<int>(dict.cols());
    NaiveOmpResult result;
    result.coefficients = Eigen::VectorXd::Zero(n_atoms);
    Eigen::VectorXd residual = signal;
    const double snorm = signal.norm();
    std::vector<bool> used(static_cast<size_t>(n_atoms), false);

    Eigen::VectorXd coef;
    for (int step = 0; step < rho; ++step) {
        if (residual.norm() < 1e-10 * snorm) break;
        int best = -1;
        double best_abs = 0.0;
        for (int j = 0; j < n_atoms; ++j) {
            if (used[static_cast<size_t>(j)]) continue;
            const double a = std::abs(dict.col(j).dot(residual));
            if (a > best_abs) {
                best_abs = a;
                best = j;
            }
        }
        if (best < 0 || best_abs < 1e-12) break;
        used[static_cast<size_t>(best)] = true;
        result.support.push_back(best);

        const int m = static_cast<int>(result.support.size());
        Eigen::MatrixXd sub(dict.rows(), m);
        for (int i = 0; i < m; ++i) sub.col(i) = dict.col(result.support[static_cast<size_t>(i)]);
        const Eigen::MatrixXd normal = sub.transpose() * sub;
        const Eigen::VectorXd rhs = sub.transpose() * signal;
        coef = normal.fullPivLu().solve(rhs);
        residual = signal - sub * coef;
    }
    for (size_t i = 0; i < result.support.size(); ++i) {
        result.coefficients[result.support[i]] = coef[static_cast<Eigen::Index>(i)];
    }
    return result;
}

// diag(E^T C^{-1} E) through the full N x N product.
inline Eigen::VectorXd naive_mahalanobis_diag(const Eigen::MatrixXd& errors,
                                              const Eigen::MatrixXd& corr) {
    const Eigen::MatrixXd full = errors.transpose() * corr.inverse() * errors;
    return full.diagonal();
}

// Scalar CIELAB path, written independently of the library's.
inline void naive_srgb_to_lab(double r, double g, double b, double& big_l, double& a_star,
                              double& b_star) {
    auto decode = [](double u) {
        if (u <= 0.04045) return u / 12.92;
        return std::pow((u + 0.055) / 1.055, 2.4);
    };
    const double lin[3] = {decode(r), decode(g), decode(b)};
    const double matrix[3][3] = {{0.4124564, 0.3575761, 0.1804375},
                                 {0.2126729, 0.7151522, 0.0721750},
                                 {0.0193339, 0.1191920, 0.9503041}};
    double xyz[3] = {0, 0, 0};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) xyz[i] += matrix[i][j] * lin[j];
    }
    const double white[3] = {0.95047, 1.0, 1.08883};
    double f[3];
    for (int i = 0; i < 3; ++i) {
        const double t = xyz[i] / white[i];
        f[i] = t > 216.0 / 24389.0 ? std::cbrt(t) : ((24389.0 / 27.0) * t + 16.0) / 116.0;
    }
    big_l = 116.0 * f[1] - 16.0;
    a_star = 500.0 * (f[0] - f[1]);
    b_star = 200.0 * (f[1] - f[2]);
}

// Mann-Whitney pair statistic with half credit for ties (label 1 positive).
inline double mann_whitney_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double pairs = 0.0, wins = 0.0;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] == 1) continue;
            pairs += 1.0;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / pairs;
}

inline lsksvd::Dictionary random_dictionary(int k, int n_atoms, unsigned seed,
                                            int patch_size = 0, int channels = 0) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    lsksvd::Dictionary dict;
    dict.patch_size = patch_size;
    dict.channels = channels;
    dict.atoms.resize(k, n_atoms);
    for (int j = 0; j < n_atoms; ++j) {
        for (int i = 0; i < k; ++i) dict.atoms(i, j) = gauss(rng);
        dict.atoms.col(j).normalize();
    }
    return dict;
}

// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("lsksvd_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace oracle
