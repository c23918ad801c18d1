#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "lsksvd/dictionary.hpp"

namespace lsksvd {

struct TrainConfig {
    int atom_count = 128;    // K
    int sparsity = 8;        // rho
    int iterations = 30;
    enum class Init { random_samples, random_unit };
    Init init = Init::random_samples;
    uint64_t seed = 0;
    int unused_atom_threshold = 1;       // replace atoms used by fewer signals
    double duplicate_correlation = 0.99; // replace atoms more correlated than this
    double rel_improvement_stop = 1e-6;  // early stop on relative objective gain
};

struct KsvdResult {
    Dictionary dict;
    Eigen::MatrixXd coeffs; // K x N, consistent with dict (no cleanup after the last pass)
    std::vector<double> objective; // ||M - D A||_F after each iteration's atom updates
};

/// Alternating minimization of ||M - D A||_F with ||a_n||_0 <= rho: sparse
/// coding by batch_omp, then one rank-1 SVD update per atom on the restricted
/// residual (atom = leading left singular vector, its coefficient row =
/// sigma * leading right singular vector). Between iterations, atoms used by
/// fewer than unused_atom_threshold signals or duplicating another atom are
/// replaced by the currently worst-approximated signal, normalized.
/// patch_size/channels only annotate the returned dictionary.
KsvdResult ksvd_train(const Eigen::MatrixXd& signals, const TrainConfig& cfg,
                      int patch_size = 0, int channels = 0);

namespace detail {
/// One SVD atom update, in place; returns false when no signal uses atom j.
/// Exposed so the per-atom objective monotonicity can be checked directly.
bool ksvd_update_atom(Eigen::MatrixXd& dict_atoms, Eigen::MatrixXd& coeffs,
                      const Eigen::MatrixXd& signals, int j);
} // namespace detail

} // namespace lsksvd
