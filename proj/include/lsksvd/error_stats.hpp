#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <utility>
#include <vector>

#include "lsksvd/dictionary.hpp"
#include "lsksvd/image.hpp"

namespace lsksvd {

/// Per-pixel dictionary approximation errors: column n is e(x_n, y_n).
/// pixels lists the (x,y) behind each column; empty for raw signal batches.
struct ErrorMatrix {
    Eigen::MatrixXd E; // k x N
    std::vector<std::pair<int, int>> pixels;
};

/// Correlation matrix of a set of error vectors, with a ridge applied, plus a
/// cached Cholesky factorization of C + ridge*I.
struct CorrelationMatrix {
    Eigen::MatrixXd C; // k x k, symmetric, ridge included on the diagonal
    double ridge = 0.0;
    Eigen::LLT<Eigen::MatrixXd> llt;
    bool positive_definite = false;

    static CorrelationMatrix identity(int k, double ridge);
};

/// E = P - D*A.
ErrorMatrix approximation_errors(const Eigen::MatrixXd& patches, const Dictionary& dict,
                                 const Eigen::MatrixXd& coeffs);

/// Zero-mean second moment Sigma = (1/N) E E^T, standardized to unit diagonal
/// (zero-variance dimensions keep scale 1), then ridged: C + ridge*I.
CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& errors, double ridge);

/// diag(E^T C^{-1} E) as row-sums of (C^{-1}E) .* E; the N x N product is
/// never formed. Throws when the cached factorization is not positive
/// definite.
Eigen::VectorXd mahalanobis_diag(const Eigen::MatrixXd& errors, const CorrelationMatrix& corr);

struct FidelityFields {
    ErrorMatrix e1;
    ErrorMatrix e2;
};

/// One mirror-padded patch per pixel (column order n = y*width + x),
/// sparse-coded against both dictionaries.
FidelityFields fidelity_fields(const ImageBuffer& image, const Dictionary& d1,
                               const Dictionary& d2, int rho);

} // namespace lsksvd
