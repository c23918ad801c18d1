#include "lsksvd/error_stats.hpp"

#include <cmath>
#include <stdexcept>

#include "lsksvd/patches.hpp"
#include "lsksvd/pursuit.hpp"

namespace lsksvd {

CorrelationMatrix CorrelationMatrix::identity(int k, double ridge) {
    CorrelationMatrix corr;
    corr.C = Eigen::MatrixXd::Identity(k, k) * (1.0 + ridge);
    corr.ridge = ridge;
    corr.llt.compute(corr.C);
    corr.positive_definite = corr.llt.info() == Eigen::Success;
    return corr;
}

ErrorMatrix approximation_errors(const Eigen::MatrixXd& patches, const Dictionary& dict,
                                 const Eigen::MatrixXd& coeffs) {
    if (patches.rows() != dict.atoms.rows() || coeffs.rows() != dict.atoms.cols() ||
        patches.cols() != coeffs.cols()) {
        throw std::invalid_argument("approximation_errors: shape mismatch");
    }
    ErrorMatrix err;
    err.E = patches - dict.atoms * coeffs;
    return err;
}

CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& errors, double ridge) {
    const Eigen::Index k = errors.rows();
    const Eigen::Index n = errors.cols();
    if (n == 0) throw std::invalid_argument("correlation_matrix: no error columns");
    if (!errors.allFinite()) throw std::invalid_argument("correlation_matrix: non-finite entries");

    // Zero-mean second moment (mu = 0 by assumption).
    Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(k, k);
    sigma.selfadjointView<Eigen::Lower>().rankUpdate(errors, 1.0 / static_cast<double>(n));
    sigma.triangularView<Eigen::StrictlyUpper>() = sigma.transpose();

    Eigen::VectorXd scale(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        scale[i] = sigma(i, i) > 0.0 ? 1.0 / std::sqrt(sigma(i, i)) : 1.0;
    }
    CorrelationMatrix corr;
    corr.C = scale.asDiagonal() * sigma * scale.asDiagonal();
    // Standardization leaves tiny asymmetries and off-by-ulp diagonals; make
    // the matrix exactly symmetric with a unit (or zero-variance) diagonal.
    corr.C = ((corr.C + corr.C.transpose()) * 0.5).eval();
    for (Eigen::Index i = 0; i < k; ++i) {
        corr.C(i, i) = sigma(i, i) > 0.0 ? 1.0 : 0.0;
    }
    corr.C.diagonal().array() += ridge;
    corr.ridge = ridge;
    corr.llt.compute(corr.C);
    corr.positive_definite = corr.llt.info() == Eigen::Success;
    return corr;
}

Eigen::VectorXd mahalanobis_diag(const Eigen::MatrixXd& errors, const CorrelationMatrix& corr) {
    if (errors.rows() != corr.C.rows()) {
        throw std::invalid_argument("mahalanobis_diag: dimension mismatch");
    }
    if (!corr.positive_definite) {
        throw std::runtime_error("mahalanobis_diag: correlation matrix factorization failed");
    }
    const Eigen::MatrixXd solved = corr.llt.solve(errors);
    return solved.cwiseProduct(errors).colwise().sum();
}

FidelityFields fidelity_fields(const ImageBuffer& image, const Dictionary& d1,
                               const Dictionary& d2, int rho) {
    if (d1.patch_size != d2.patch_size || d1.channels != d2.channels || d1.k() != d2.k()) {
        throw std::invalid_argument("fidelity_fields: dictionary geometry mismatch");
    }
    if (d1.channels != image.channels) {
        throw std::invalid_argument("fidelity_fields: dictionary/image channel mismatch");
    }
    const int w = image.width;
    const int h = image.height;
    Eigen::MatrixXd patches(d1.k(), static_cast<Eigen::Index>(w) * h);
    std::vector<std::pair<int, int>> pixels;
    pixels.reserve(static_cast<size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            patches.col(static_cast<Eigen::Index>(y) * w + x) =
                extract_patch(image, x, y, d1.patch_size).values;
            pixels.emplace_back(x, y);
        }
    }

    FidelityFields fields;
    fields.e1 = approximation_errors(patches, d1, batch_omp(d1, patches, rho));
    fields.e2 = approximation_errors(patches, d2, batch_omp(d2, patches, rho));
    fields.e1.pixels = pixels;
    fields.e2.pixels = std::move(pixels);
    return fields;
}

} // namespace lsksvd
