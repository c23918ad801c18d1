#include "lsksvd/pursuit.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

namespace lsksvd {

namespace {

constexpr double kResidualStop = 1e-10; // relative to ||signal||
constexpr double kCorrelationStop = 1e-12;

// Solve G c = rhs for the SPD Gram submatrix; a 1e-12 ridge is added when the
// factorization reports a numerical issue.
Eigen::VectorXd solve_normal_equations(Eigen::MatrixXd gram, const Eigen::VectorXd& rhs) {
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
        gram.diagonal().array() += 1e-12;
        llt.compute(gram);
        if (llt.info() != Eigen::Success) {
            throw std::runtime_error("omp: normal equations not positive definite");
        }
    }
    return llt.solve(rhs);
}

int argmax_unselected(const Eigen::VectorXd& corr, const std::vector<char>& selected) {
    int best = -1;
    double best_abs = 0.0;
    for (Eigen::Index j = 0; j < corr.size(); ++j) {
        if (selected[static_cast<size_t>(j)]) continue;
        const double a = std::abs(corr[j]);
        if (a > best_abs) {
            best_abs = a;
            best = static_cast<int>(j);
        }
    }
    return best_abs < kCorrelationStop ? -1 : best;
}

} // namespace

SparseCode omp(const Dictionary& dict, const Eigen::VectorXd& signal, int rho) {
    const int k = dict.k();
    const int n_atoms = dict.atom_count();
    if (signal.size() != k) throw std::invalid_argument("omp: signal dimension mismatch");
    if (rho < 0 || rho > n_atoms) throw std::invalid_argument("omp: rho out of range");

    const double snorm = signal.norm();
    Eigen::VectorXd residual = signal;
    std::vector<char> selected(static_cast<size_t>(n_atoms), 0);
    std::vector<int> support;
    Eigen::VectorXd coef;

    while (static_cast<int>(support.size()) < rho) {
        if (residual.norm() < kResidualStop * snorm) break;
        const Eigen::VectorXd corr = dict.atoms.transpose() * residual;
        const int pick = argmax_unselected(corr, selected);
        if (pick < 0) break;
        support.push_back(pick);
        selected[static_cast<size_t>(pick)] = 1;

        const int m = static_cast<int>(support.size());
        Eigen::MatrixXd sub(k, m);
        for (int i = 0; i < m; ++i) sub.col(i) = dict.atoms.col(support[static_cast<size_t>(i)]);
        coef = solve_normal_equations(sub.transpose() * sub, sub.transpose() * signal);
        residual = signal - sub * coef;
    }

    SparseCode code;
    code.coefficients = Eigen::VectorXd::Zero(n_atoms);
    code.support = support;
    for (size_t i = 0; i < support.size(); ++i) {
        code.coefficients[support[i]] = coef[static_cast<Eigen::Index>(i)];
    }
    return code;
}

Eigen::MatrixXd batch_omp(const Dictionary& dict, const Eigen::MatrixXd& signals, int rho) {
    const int k = dict.k();
    const int n_atoms = dict.atom_count();
    if (signals.rows() != k) throw std::invalid_argument("batch_omp: signal dimension mismatch");
    if (rho < 0 || rho > n_atoms) throw std::invalid_argument("batch_omp: rho out of range");

    const Eigen::Index n = signals.cols();
    Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(n_atoms, n);
    if (n == 0) return coeffs;

    const Eigen::MatrixXd gram = dict.atoms.transpose() * dict.atoms;
    const Eigen::MatrixXd proj = dict.atoms.transpose() * signals; // D^T X

    std::vector<char> selected(static_cast<size_t>(n_atoms), 0);
    std::vector<int> support;
    for (Eigen::Index col = 0; col < n; ++col) {
        const Eigen::VectorXd alpha0 = proj.col(col);
        const double snorm2 = signals.col(col).squaredNorm();

        std::fill(selected.begin(), selected.end(), 0);
        support.clear();
        Eigen::VectorXd alpha = alpha0; // equals D^T residual throughout
        Eigen::VectorXd coef;
        double rnorm2 = snorm2;

        while (static_cast<int>(support.size()) < rho) {
            if (std::sqrt(std::max(rnorm2, 0.0)) < kResidualStop * std::sqrt(snorm2)) break;
            const int pick = argmax_unselected(alpha, selected);
            if (pick < 0) break;
            support.push_back(pick);
            selected[static_cast<size_t>(pick)] = 1;

            const int m = static_cast<int>(support.size());
            Eigen::MatrixXd gram_ii(m, m);
            Eigen::VectorXd rhs(m);
            for (int a = 0; a < m; ++a) {
                rhs[a] = alpha0[support[static_cast<size_t>(a)]];
                for (int b = 0; b < m; ++b) {
                    gram_ii(a, b) =
                        gram(support[static_cast<size_t>(a)], support[static_cast<size_t>(b)]);
                }
            }
            coef = solve_normal_equations(gram_ii, rhs);

            alpha = alpha0;
            for (int a = 0; a < m; ++a) {
                alpha -= coef[a] * gram.col(support[static_cast<size_t>(a)]);
            }
            // ||x - D_I c||^2 without touching the residual explicitly.
            rnorm2 = snorm2 - 2.0 * coef.dot(rhs) + coef.dot(gram_ii * coef);
        }
        for (size_t i = 0; i < support.size(); ++i) {
            coeffs(support[i], col) = coef[static_cast<Eigen::Index>(i)];
        }
    }
    return coeffs;
}

} // namespace lsksvd
