#pragma once

#include <Eigen/Core>
#include <vector>

#include "lsksvd/dictionary.hpp"

namespace lsksvd {

struct SparseCode {
    Eigen::VectorXd coefficients; // length K, zero off support
    std::vector<int> support;     // selected atom indices, in selection order
};

/// Orthogonal matching pursuit. At each of at most rho steps the atom with
/// the largest |<atom, residual>| among the not-yet-selected ones is added,
/// then the coefficients are re-solved by least squares on the accumulated
/// support. Stops early when the residual norm drops below 1e-10 * ||signal||
/// or no atom correlates with the residual.
SparseCode omp(const Dictionary& dict, const Eigen::VectorXd& signal, int rho);

/// Sparse-code every column of signals. Precomputes the Gram matrix D^T D and
/// the projections D^T X once and runs the pursuit in that basis; column n
/// matches omp(dict, signals.col(n), rho) to 1e-9.
Eigen::MatrixXd batch_omp(const Dictionary& dict, const Eigen::MatrixXd& signals, int rho);

} // namespace lsksvd
