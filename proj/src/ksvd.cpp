#include "lsksvd/ksvd.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>

#include "lsksvd/pursuit.hpp"
#include "lsksvd/rng.hpp"

namespace lsksvd {

namespace detail {

bool ksvd_update_atom(Eigen::MatrixXd& dict_atoms, Eigen::MatrixXd& coeffs,
                      const Eigen::MatrixXd& signals, int j) {
    std::vector<Eigen::Index> omega;
    for (Eigen::Index n = 0; n < coeffs.cols(); ++n) {
        if (coeffs(j, n) != 0.0) omega.push_back(n);
    }
    if (omega.empty()) return false;

    const Eigen::Index m = static_cast<Eigen::Index>(omega.size());
    Eigen::MatrixXd sig_sub(signals.rows(), m);
    Eigen::MatrixXd coef_sub(coeffs.rows(), m);
    for (Eigen::Index i = 0; i < m; ++i) {
        sig_sub.col(i) = signals.col(omega[static_cast<size_t>(i)]);
        coef_sub.col(i) = coeffs.col(omega[static_cast<size_t>(i)]);
    }
    // Residual with atom j's contribution restored.
    Eigen::MatrixXd restricted = sig_sub - dict_atoms * coef_sub;
    restricted.noalias() += dict_atoms.col(j) * coef_sub.row(j);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(restricted, Eigen::ComputeThinU | Eigen::ComputeThinV);
    dict_atoms.col(j) = svd.matrixU().col(0);
    const double sigma = svd.singularValues()[0];
    for (Eigen::Index i = 0; i < m; ++i) {
        coeffs(j, omega[static_cast<size_t>(i)]) = sigma * svd.matrixV()(i, 0);
    }
    return true;
}

} // namespace detail

namespace {

Eigen::MatrixXd init_from_samples(const Eigen::MatrixXd& signals, int atom_count,
                                  std::mt19937_64& rng) {
    std::vector<Eigen::Index> order(static_cast<size_t>(signals.cols()));
    std::iota(order.begin(), order.end(), 0);
    shuffle_vec(order, rng);

    Eigen::MatrixXd atoms(signals.rows(), atom_count);
    std::vector<Eigen::Index> accepted;
    for (Eigen::Index idx : order) {
        if (static_cast<int>(accepted.size()) == atom_count) break;
        const auto candidate = signals.col(idx);
        if (candidate.norm() < 1e-12) continue;
        bool duplicate = false;
        for (Eigen::Index prev : accepted) {
            if (candidate == signals.col(prev)) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;
        atoms.col(static_cast<Eigen::Index>(accepted.size())) = candidate.normalized();
        accepted.push_back(idx);
    }
    if (static_cast<int>(accepted.size()) < atom_count) {
        throw std::runtime_error("ksvd_train: fewer distinct signals than K at initialization");
    }
    return atoms;
}

Eigen::MatrixXd init_random_unit(Eigen::Index k, int atom_count, std::mt19937_64& rng) {
    Eigen::MatrixXd atoms(k, atom_count);
    for (int j = 0; j < atom_count; ++j) {
        for (Eigen::Index i = 0; i < k; ++i) atoms(i, j) = normal01(rng);
        atoms.col(j).normalize();
    }
    return atoms;
}

// Replace unused and duplicated atoms by the worst-approximated signals.
void cleanup_atoms(Eigen::MatrixXd& atoms, Eigen::MatrixXd& coeffs,
                   const Eigen::MatrixXd& signals, const TrainConfig& cfg,
                   std::mt19937_64& rng) {
    const Eigen::Index n = signals.cols();
    std::vector<int> usage(static_cast<size_t>(atoms.cols()), 0);
    for (Eigen::Index j = 0; j < coeffs.rows(); ++j) {
        for (Eigen::Index c = 0; c < n; ++c) {
            if (coeffs(j, c) != 0.0) ++usage[static_cast<size_t>(j)];
        }
    }

    Eigen::MatrixXd residual = signals - atoms * coeffs;
    Eigen::VectorXd res2 = residual.colwise().squaredNorm();
    std::vector<char> taken(static_cast<size_t>(n), 0);

    for (Eigen::Index j = 0; j < atoms.cols(); ++j) {
        bool replace = usage[static_cast<size_t>(j)] < cfg.unused_atom_threshold;
        if (!replace) {
            for (Eigen::Index i = 0; i < atoms.cols() && !replace; ++i) {
                if (i == j) continue;
                replace = std::abs(atoms.col(i).dot(atoms.col(j))) > cfg.duplicate_correlation;
            }
        }
        if (!replace) continue;

        // Give atom j's energy back to the residual before dropping its row.
        for (Eigen::Index c = 0; c < n; ++c) {
            if (coeffs(j, c) != 0.0) {
                residual.col(c) += atoms.col(j) * coeffs(j, c);
                res2[c] = residual.col(c).squaredNorm();
                coeffs(j, c) = 0.0;
            }
        }
        Eigen::Index worst = -1;
        double worst_res = -1.0;
        for (Eigen::Index c = 0; c < n; ++c) {
            if (taken[static_cast<size_t>(c)]) continue;
            if (signals.col(c).norm() < 1e-12) continue;
            if (res2[c] > worst_res) {
                worst_res = res2[c];
                worst = c;
            }
        }
        if (worst >= 0) {
            atoms.col(j) = signals.col(worst).normalized();
            taken[static_cast<size_t>(worst)] = 1;
        } else {
            for (Eigen::Index i = 0; i < atoms.rows(); ++i) atoms(i, j) = normal01(rng);
            atoms.col(j).normalize();
        }
    }
}

} // namespace

KsvdResult ksvd_train(const Eigen::MatrixXd& signals, const TrainConfig& cfg,
                      int patch_size, int channels) {
    const Eigen::Index k = signals.rows();
    const Eigen::Index n = signals.cols();
    if (!signals.allFinite()) throw std::invalid_argument("ksvd_train: non-finite input");
    if (n < 1) throw std::invalid_argument("ksvd_train: no signals");
    if (cfg.atom_count < 1) throw std::invalid_argument("ksvd_train: K must be >= 1");
    if (cfg.sparsity < 1 || cfg.sparsity > std::min<Eigen::Index>(k, cfg.atom_count)) {
        throw std::invalid_argument("ksvd_train: rho out of range");
    }
    if (cfg.iterations < 1) throw std::invalid_argument("ksvd_train: iterations must be >= 1");
    if (n < cfg.atom_count) {
        std::cerr << "ksvd_train: warning: fewer signals (" << n << ") than atoms ("
                  << cfg.atom_count << ")\n";
    }

    std::mt19937_64 rng(cfg.seed);
    Dictionary dict;
    dict.patch_size = patch_size;
    dict.channels = channels;
    dict.atoms = cfg.init == TrainConfig::Init::random_samples
                     ? init_from_samples(signals, cfg.atom_count, rng)
                     : init_random_unit(k, cfg.atom_count, rng);

    const double signals_norm = signals.norm();
    KsvdResult result;
    for (int iter = 1; iter <= cfg.iterations; ++iter) {
        result.coeffs = batch_omp(dict, signals, cfg.sparsity);
        for (int j = 0; j < cfg.atom_count; ++j) {
            detail::ksvd_update_atom(dict.atoms, result.coeffs, signals, j);
        }
        const double objective = (signals - dict.atoms * result.coeffs).norm();
        result.objective.push_back(objective);

        const bool at_floor = objective < 1e-12 * signals_norm;
        const bool stalled =
            result.objective.size() >= 2 &&
            std::abs(result.objective[result.objective.size() - 2] - objective) <
                cfg.rel_improvement_stop *
                    std::max(result.objective[result.objective.size() - 2], 1e-300);
        if (iter == cfg.iterations || at_floor || stalled) break;
        // Cleanup runs only between iterations so the returned pair stays
        // consistent with the last recorded objective.
        cleanup_atoms(dict.atoms, result.coeffs, signals, cfg, rng);
    }
    result.dict = std::move(dict);
    return result;
}

} // namespace lsksvd
