#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>

#include "lsksvd/classify.hpp"
#include "lsksvd/pipeline.hpp"

namespace {

struct ConfigOptions {
    lsksvd::PipelineConfig cfg;
    std::string config_path;
    std::vector<CLI::Option*> options; // one per config key, same name

    // Register one flag per config key so anything in the file can be pinned
    // on the command line; file values apply only to keys left untouched.
    void attach(CLI::App* app) {
        app->add_option("--config", config_path, "key=value config file");
        auto opt = [&](const std::string& key, auto& field, const char* desc) {
            options.push_back(app->add_option("--" + key, field, desc));
        };
        opt("patch_size", cfg.patch_size, "patch side length in pixels");
        opt("channels", cfg.channels, "image channels (1 or 3)");
        opt("dict_atoms", cfg.dict_atoms, "atoms per dictionary (K)");
        opt("sparsity", cfg.sparsity, "pursuit sparsity (rho)");
        opt("ksvd_iterations", cfg.ksvd_iterations, "KSVD iterations");
        opt("mu", cfg.mu, "curvature weight");
        opt("nu", cfg.nu, "area weight");
        opt("tau", cfg.tau, "band half-width (0 = radius)");
        opt("radius", cfg.radius, "initial circle radius");
        opt("spacing", cfg.spacing, "initial circle spacing");
        opt("d", cfg.d, "convergence ratio");
        opt("patience", cfg.patience, "consecutive counts to converge");
        opt("ridge", cfg.ridge, "correlation matrix ridge");
        opt("max_steps", cfg.max_steps, "maximum evolution steps");
        opt("seed", cfg.seed, "RNG seed");
        opt("min_segment_area", cfg.min_segment_area, "post-process area threshold");
        opt("stride", cfg.stride, "dataset stride (0 = patch_size/2)");
        opt("balance", cfg.balance, "1:1 class balancing");
        opt("split_ratio", cfg.split_ratio, "train fraction");
        opt("eps_h", cfg.eps_h, "Heaviside regularization width");
        opt("reinit_every", cfg.reinit_every, "reinitialization cadence");
        opt("reinit_sweeps", cfg.reinit_sweeps, "reinitialization sweeps");
        opt("min_auc", cfg.min_auc, "validation AUC gate");
        opt("norm", cfg.norm, "classifier norm: correlation|l2");
        opt("cv_lambda1", cfg.cv_lambda1, "Chan-Vese baseline lambda1");
        opt("cv_lambda2", cfg.cv_lambda2, "Chan-Vese baseline lambda2");
        opt("cv_mu", cfg.cv_mu, "Chan-Vese baseline curvature weight");
        opt("cv_nu", cfg.cv_nu, "Chan-Vese baseline area weight");
    }

    void finalize() {
        if (config_path.empty()) return;
        std::vector<std::string> skip;
        for (const CLI::Option* o : options) {
            if (o->count() > 0) skip.push_back(o->get_name().substr(2));
        }
        lsksvd::load_config_file(config_path, cfg, skip);
        // Re-apply command-line values over the file by construction: skipped
        // keys were never overwritten.
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Level-set KSVD texture segmentation"};
    app.require_subcommand(1);

    std::string image, fg_mask, bg_mask, out_dir, dict1, dict2, gt_mask, roc_out;

    auto* train = app.add_subcommand("train", "learn class dictionaries from annotations");
    train->add_option("--image", image, "input image (PNG)")->required();
    train->add_option("--fg-mask", fg_mask, "foreground annotation mask")->required();
    train->add_option("--bg-mask", bg_mask, "background annotation mask")->required();
    train->add_option("--out-dir", out_dir, "output directory")->required();
    ConfigOptions train_cfg;
    train_cfg.attach(train);

    auto* validate = app.add_subcommand("validate", "score held-out patches, sweep a ROC");
    validate->add_option("--dict1", dict1, "foreground dictionary")->required();
    validate->add_option("--dict2", dict2, "background dictionary")->required();
    validate->add_option("--image", image, "input image (PNG)")->required();
    validate->add_option("--fg-mask", fg_mask, "foreground annotation mask")->required();
    validate->add_option("--bg-mask", bg_mask, "background annotation mask")->required();
    validate->add_option("--roc-out", roc_out, "write the ROC rows to this file");
    ConfigOptions validate_cfg;
    validate_cfg.attach(validate);

    auto* segment = app.add_subcommand("segment", "segment an image with trained dictionaries");
    segment->add_option("--image", image, "input image (PNG)")->required();
    segment->add_option("--dict1", dict1, "foreground dictionary")->required();
    segment->add_option("--dict2", dict2, "background dictionary")->required();
    segment->add_option("--out-dir", out_dir, "output directory")->required();
    segment->add_option("--gt-mask", gt_mask, "ground-truth mask for IoU");
    ConfigOptions segment_cfg;
    segment_cfg.attach(segment);

    auto* compare = app.add_subcommand("compare", "run Level-set KSVD and Chan-Vese baselines");
    compare->add_option("--image", image, "input image (PNG)")->required();
    compare->add_option("--dict1", dict1, "foreground dictionary")->required();
    compare->add_option("--dict2", dict2, "background dictionary")->required();
    compare->add_option("--out-dir", out_dir, "output directory")->required();
    compare->add_option("--gt-mask", gt_mask, "ground-truth mask for IoU")->required();
    ConfigOptions compare_cfg;
    compare_cfg.attach(compare);

    auto* synth = app.add_subcommand("synth", "generate a synthetic two-texture scene");
    lsksvd::SynthParams synth_params = lsksvd::default_synth_params();
    std::string fg_kind = "stripes", bg_kind = "stripes";
    synth->add_option("--out-dir", out_dir, "output directory")->required();
    synth->add_option("--seed", synth_params.seed, "RNG seed");
    synth->add_option("--width", synth_params.width, "image width");
    synth->add_option("--height", synth_params.height, "image height");
    synth->add_option("--blobs", synth_params.blobs.count, "foreground blob count");
    synth->add_option("--min-radius", synth_params.blobs.min_radius, "min blob radius");
    synth->add_option("--max-radius", synth_params.blobs.max_radius, "max blob radius");
    synth->add_option("--margin", synth_params.blobs.margin, "blob distance from border");
    synth->add_option("--fg-kind", fg_kind, "foreground texture: stripes|blotch");
    synth->add_option("--bg-kind", bg_kind, "background texture: stripes|blotch");
    synth->add_option("--fg-angle", synth_params.fg_texture.angle_deg, "fg stripe angle (deg)");
    synth->add_option("--bg-angle", synth_params.bg_texture.angle_deg, "bg stripe angle (deg)");
    synth->add_option("--fg-period", synth_params.fg_texture.period_px, "fg pattern period");
    synth->add_option("--bg-period", synth_params.bg_texture.period_px, "bg pattern period");
    synth->add_option("--fg-amplitude", synth_params.fg_texture.amplitude, "fg pattern amplitude");
    synth->add_option("--bg-amplitude", synth_params.bg_texture.amplitude, "bg pattern amplitude");
    synth->add_option("--fg-base", synth_params.fg_texture.base, "fg base color (r g b)");
    synth->add_option("--bg-base", synth_params.bg_texture.base, "bg base color (r g b)");
    synth->add_option("--fg-noise", synth_params.fg_texture.noise_sigma, "fg white-noise sigma");
    synth->add_option("--bg-noise", synth_params.bg_texture.noise_sigma, "bg white-noise sigma");
    synth->add_option("--blur", synth_params.blur_sigma, "Gaussian blur sigma (0 = off)");

    CLI11_PARSE(app, argc, argv);

    auto parse_kind = [](const std::string& s) {
        if (s == "stripes") return lsksvd::TextureSpec::Kind::stripes;
        if (s == "blotch") return lsksvd::TextureSpec::Kind::blotch;
        throw CLI::ValidationError("texture kind must be stripes|blotch");
    };

    try {
        if (train->parsed()) {
            train_cfg.finalize();
            lsksvd::cmd_train(image, fg_mask, bg_mask, out_dir, train_cfg.cfg);
        } else if (validate->parsed()) {
            validate_cfg.finalize();
            const auto out = lsksvd::cmd_validate(dict1, dict2, image, fg_mask, bg_mask,
                                                  validate_cfg.cfg, roc_out);
            std::cout << lsksvd::format_roc(out.roc);
            if (!out.passed) {
                std::cerr << "validate: AUC " << out.auc << " below gate "
                          << validate_cfg.cfg.min_auc << "\n";
                return 2;
            }
        } else if (segment->parsed()) {
            segment_cfg.finalize();
            const auto report = lsksvd::cmd_segment(image, dict1, dict2, out_dir,
                                                    segment_cfg.cfg, gt_mask);
            std::cout << "mask: " << report.mask_path << "\noverlay: " << report.overlay_path
                      << "\ntrace: " << report.trace_path << "\nsteps: " << report.steps_run
                      << (report.converged ? " (converged)" : " (not converged)") << "\n";
            if (report.iou) std::cout << "iou: " << *report.iou << "\n";
        } else if (compare->parsed()) {
            compare_cfg.finalize();
            const auto rows =
                lsksvd::cmd_compare(image, dict1, dict2, out_dir, compare_cfg.cfg, gt_mask);
            std::printf("%-12s %8s\n", "method", "iou");
            for (const auto& row : rows) std::printf("%-12s %8.4f\n", row.method.c_str(), row.iou);
        } else if (synth->parsed()) {
            synth_params.fg_texture.kind = parse_kind(fg_kind);
            synth_params.bg_texture.kind = parse_kind(bg_kind);
            const auto out = lsksvd::cmd_synth(out_dir, synth_params);
            std::cout << "image: " << out.image_path << "\nfg mask: " << out.fg_mask_path
                      << "\nbg mask: " << out.bg_mask_path << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
