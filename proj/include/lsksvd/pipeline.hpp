#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lsksvd/classify.hpp"
#include "lsksvd/level_set.hpp"
#include "lsksvd/synthetic.hpp"

namespace lsksvd {

/// Every field maps 1:1 to a `key=value` line in a config file and to a CLI
/// flag of the same name; command-line flags win over the file.
struct PipelineConfig {
    int patch_size = 8;
    int channels = 3;
    int dict_atoms = 128;   // K
    int sparsity = 8;       // rho
    int ksvd_iterations = 30;
    double mu = 25.0;
    double nu = 35.0;
    double tau = 0.0; // 0 -> use radius
    double radius = 10.0;
    double spacing = 30.0;
    double d = 0.005;
    int patience = 5;
    double ridge = 1e-3;
    int max_steps = 200;
    uint64_t seed = 0;
    int min_segment_area = 25;
    int stride = 0; // 0 -> patch_size / 2
    bool balance = true;
    double split_ratio = 0.7;
    double eps_h = 1.0;
    int reinit_every = 5;
    int reinit_sweeps = 10;
    double min_auc = 0.9;
    std::string norm = "correlation"; // or "l2"
    double cv_lambda1 = 1.0; // Chan-Vese baseline weights
    double cv_lambda2 = 1.0;
    double cv_mu = 0.1;
    double cv_nu = 0.0;

    int effective_stride() const { return stride > 0 ? stride : std::max(1, patch_size / 2); }
    SegParams seg_params() const;
    ScoreNorm score_norm() const;
};

/// Parse `key=value` lines ('#' comments, blank lines allowed). `skip` lists
/// keys already fixed on the command line.
void load_config_file(const std::string& path, PipelineConfig& cfg,
                      const std::vector<std::string>& skip = {});
/// Apply a single key=value pair; throws on unknown keys or bad values.
void apply_config_entry(const std::string& key, const std::string& value, PipelineConfig& cfg);
/// All recognized config keys, in file order.
std::vector<std::string> config_keys();
std::string format_config(const PipelineConfig& cfg);

struct TrainOutput {
    std::string dict1_path;
    std::string dict2_path;
    std::string summary_path;
    int train_count_fg = 0;
    int train_count_bg = 0;
    int test_count_fg = 0;
    int test_count_bg = 0;
};

/// Build the annotated dataset, train one dictionary per class on the
/// training split, and serialize both with a config echo.
TrainOutput cmd_train(const std::string& image_path, const std::string& fg_mask_path,
                      const std::string& bg_mask_path, const std::string& out_dir,
                      const PipelineConfig& cfg);

struct ValidateOutput {
    RocCurve roc;
    double auc = 0.0;
    bool passed = false; // auc >= min_auc
    std::string roc_path; // empty when not written
};

/// Score every held-out test patch with the validation classifier and sweep a
/// ROC. The dataset is rebuilt from the image + masks with the configured
/// seed, so the test split matches the one cmd_train held out.
ValidateOutput cmd_validate(const std::string& dict1_path, const std::string& dict2_path,
                            const std::string& image_path, const std::string& fg_mask_path,
                            const std::string& bg_mask_path, const PipelineConfig& cfg,
                            const std::string& roc_out_path = "");

struct SegmentationReport {
    std::string mask_path;
    std::string overlay_path;
    std::string trace_path;
    std::string report_path;
    std::optional<double> iou;
    int steps_run = 0;
    bool converged = false;
    double wall_seconds = 0.0;
};

SegmentationReport cmd_segment(const std::string& image_path, const std::string& dict1_path,
                               const std::string& dict2_path, const std::string& out_dir,
                               const PipelineConfig& cfg,
                               const std::string& gt_mask_path = "");

struct CompareRow {
    std::string method;
    double iou = 0.0;
    std::string mask_path;
    std::string overlay_path;
};

/// Level-set KSVD plus the vector-valued and a*-channel Chan-Vese baselines,
/// each scored against the ground truth.
std::vector<CompareRow> cmd_compare(const std::string& image_path,
                                    const std::string& dict1_path,
                                    const std::string& dict2_path, const std::string& out_dir,
                                    const PipelineConfig& cfg,
                                    const std::string& gt_mask_path);

struct SynthParams {
    int width = 256;
    int height = 256;
    uint64_t seed = 0;
    TextureSpec fg_texture{};
    TextureSpec bg_texture{};
    BlobLayout blobs{};
    double blur_sigma = 0.0;
};

struct SynthOutput {
    std::string image_path;
    std::string fg_mask_path;
    std::string bg_mask_path;
};

SynthOutput cmd_synth(const std::string& out_dir, const SynthParams& params);

/// Default synthetic textures: same base color (iso-mean), stripes at +45 and
/// -45 degrees, so intensity-only baselines see no contrast.
SynthParams default_synth_params();

} // namespace lsksvd
