#pragma once

#include <Eigen/Core>
#include <string>

namespace lsksvd {

/// Learned dictionary: columns are unit-norm atoms in R^k. patch_size and
/// channels record the patch geometry the atoms were trained on; both are 0
/// for dictionaries over raw signal vectors with no image geometry.
struct Dictionary {
    Eigen::MatrixXd atoms; // k x K
    int patch_size = 0;
    int channels = 0;

    int k() const { return static_cast<int>(atoms.rows()); }
    int atom_count() const { return static_cast<int>(atoms.cols()); }

    /// Every column unit-norm (1e-9), no zero column, K >= 1.
    bool well_formed() const;
};

/// Serialize as a JSON document:
///   {format:"lsksvd-dict", version:1, patch_size, channels, k, K,
///    atoms:[K arrays of k numbers]}
/// Numbers round-trip exactly. An optional "train_config" object may carry an
/// echo of the training parameters.
void save_dictionary(const std::string& path, const Dictionary& dict,
                     const std::string& config_echo = "");
Dictionary load_dictionary(const std::string& path);

} // namespace lsksvd
