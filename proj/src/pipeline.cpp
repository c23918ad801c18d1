#include "lsksvd/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "lsksvd/chan_vese.hpp"
#include "lsksvd/ksvd.hpp"
#include "lsksvd/mask_ops.hpp"
#include "lsksvd/patches.hpp"
#include "lsksvd/pursuit.hpp"

namespace fs = std::filesystem;

namespace lsksvd {

SegParams PipelineConfig::seg_params() const {
    SegParams p;
    p.mu = mu;
    p.nu = nu;
    p.tau = tau;
    p.eps_h = eps_h;
    p.d = d;
    p.patience = patience;
    p.max_steps = max_steps;
    p.radius = radius;
    p.spacing = spacing;
    p.reinit_every = reinit_every;
    p.reinit_sweeps = reinit_sweeps;
    p.ridge = ridge;
    return p;
}

ScoreNorm PipelineConfig::score_norm() const {
    if (norm == "correlation") return ScoreNorm::correlation;
    if (norm == "l2") return ScoreNorm::l2;
    throw std::invalid_argument("norm must be 'correlation' or 'l2', got '" + norm + "'");
}

// ---------------------------------------------------------------------------
// Config file handling
// ---------------------------------------------------------------------------

namespace {

int to_int(const std::string& v) { return std::stoi(v); }
double to_double(const std::string& v) { return std::stod(v); }
uint64_t to_u64(const std::string& v) { return std::stoull(v); }

bool to_bool(const std::string& v) {
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw std::invalid_argument("bad boolean value '" + v + "'");
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

} // namespace

void apply_config_entry(const std::string& key, const std::string& value, PipelineConfig& cfg) {
    if (key == "patch_size") cfg.patch_size = to_int(value);
    else if (key == "channels") cfg.channels = to_int(value);
    else if (key == "dict_atoms") cfg.dict_atoms = to_int(value);
    else if (key == "sparsity") cfg.sparsity = to_int(value);
    else if (key == "ksvd_iterations") cfg.ksvd_iterations = to_int(value);
    else if (key == "mu") cfg.mu = to_double(value);
    else if (key == "nu") cfg.nu = to_double(value);
    else if (key == "tau") cfg.tau = to_double(value);
    else if (key == "radius") cfg.radius = to_double(value);
    else if (key == "spacing") cfg.spacing = to_double(value);
    else if (key == "d") cfg.d = to_double(value);
    else if (key == "patience") cfg.patience = to_int(value);
    else if (key == "ridge") cfg.ridge = to_double(value);
    else if (key == "max_steps") cfg.max_steps = to_int(value);
    else if (key == "seed") cfg.seed = to_u64(value);
    else if (key == "min_segment_area") cfg.min_segment_area = to_int(value);
    else if (key == "stride") cfg.stride = to_int(value);
    else if (key == "balance") cfg.balance = to_bool(value);
    else if (key == "split_ratio") cfg.split_ratio = to_double(value);
    else if (key == "eps_h") cfg.eps_h = to_double(value);
    else if (key == "reinit_every") cfg.reinit_every = to_int(value);
    else if (key == "reinit_sweeps") cfg.reinit_sweeps = to_int(value);
    else if (key == "min_auc") cfg.min_auc = to_double(value);
    else if (key == "norm") cfg.norm = value;
    else if (key == "cv_lambda1") cfg.cv_lambda1 = to_double(value);
    else if (key == "cv_lambda2") cfg.cv_lambda2 = to_double(value);
    else if (key == "cv_mu") cfg.cv_mu = to_double(value);
    else if (key == "cv_nu") cfg.cv_nu = to_double(value);
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

std::vector<std::string> config_keys() {
    return {"patch_size", "channels", "dict_atoms", "sparsity", "ksvd_iterations",
            "mu", "nu", "tau", "radius", "spacing",
            "d", "patience", "ridge", "max_steps", "seed",
            "min_segment_area", "stride", "balance", "split_ratio", "eps_h",
            "reinit_every", "reinit_sweeps", "min_auc", "norm",
            "cv_lambda1", "cv_lambda2", "cv_mu", "cv_nu"};
}

void load_config_file(const std::string& path, PipelineConfig& cfg,
                      const std::vector<std::string>& skip) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": expected key=value");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (std::find(skip.begin(), skip.end(), key) != skip.end()) continue;
        apply_config_entry(key, value, cfg);
    }
}

std::string format_config(const PipelineConfig& cfg) {
    std::ostringstream out;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    out << "patch_size=" << cfg.patch_size << "\n";
    out << "channels=" << cfg.channels << "\n";
    out << "dict_atoms=" << cfg.dict_atoms << "\n";
    out << "sparsity=" << cfg.sparsity << "\n";
    out << "ksvd_iterations=" << cfg.ksvd_iterations << "\n";
    out << "mu=" << num(cfg.mu) << "\n";
    out << "nu=" << num(cfg.nu) << "\n";
    out << "tau=" << num(cfg.tau) << "\n";
    out << "radius=" << num(cfg.radius) << "\n";
    out << "spacing=" << num(cfg.spacing) << "\n";
    out << "d=" << num(cfg.d) << "\n";
    out << "patience=" << cfg.patience << "\n";
    out << "ridge=" << num(cfg.ridge) << "\n";
    out << "max_steps=" << cfg.max_steps << "\n";
    out << "seed=" << cfg.seed << "\n";
    out << "min_segment_area=" << cfg.min_segment_area << "\n";
    out << "stride=" << cfg.stride << "\n";
    out << "balance=" << (cfg.balance ? 1 : 0) << "\n";
    out << "split_ratio=" << num(cfg.split_ratio) << "\n";
    out << "eps_h=" << num(cfg.eps_h) << "\n";
    out << "reinit_every=" << cfg.reinit_every << "\n";
    out << "reinit_sweeps=" << cfg.reinit_sweeps << "\n";
    out << "min_auc=" << num(cfg.min_auc) << "\n";
    out << "norm=" << cfg.norm << "\n";
    out << "cv_lambda1=" << num(cfg.cv_lambda1) << "\n";
    out << "cv_lambda2=" << num(cfg.cv_lambda2) << "\n";
    out << "cv_mu=" << num(cfg.cv_mu) << "\n";
    out << "cv_nu=" << num(cfg.cv_nu) << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("failed to write '" + path + "'");
}

TrainConfig train_config(const PipelineConfig& cfg) {
    TrainConfig tc;
    tc.atom_count = cfg.dict_atoms;
    tc.sparsity = cfg.sparsity;
    tc.iterations = cfg.ksvd_iterations;
    tc.seed = cfg.seed;
    return tc;
}

Dataset rebuild_dataset(const ImageBuffer& image, const BinaryMask& fg, const BinaryMask& bg,
                        const PipelineConfig& cfg) {
    return build_dataset(image, fg, bg, cfg.patch_size, cfg.effective_stride(), cfg.balance,
                         cfg.split_ratio, cfg.seed);
}

int count_label(const std::vector<LabeledPatch>& patches, int label) {
    int n = 0;
    for (const auto& lp : patches) n += lp.label == label;
    return n;
}

CorrelationMatrix class_correlation(const Eigen::MatrixXd& signals, const Dictionary& dict,
                                    const PipelineConfig& cfg) {
    const Eigen::MatrixXd coeffs = batch_omp(dict, signals, cfg.sparsity);
    return correlation_matrix(approximation_errors(signals, dict, coeffs).E, cfg.ridge);
}

} // namespace

TrainOutput cmd_train(const std::string& image_path, const std::string& fg_mask_path,
                      const std::string& bg_mask_path, const std::string& out_dir,
                      const PipelineConfig& cfg) {
    const ImageBuffer image = read_image_png(image_path);
    const BinaryMask fg = read_mask_png(fg_mask_path);
    const BinaryMask bg = read_mask_png(bg_mask_path);
    const Dataset ds = rebuild_dataset(image, fg, bg, cfg);

    const Eigen::MatrixXd m1 = patches_to_matrix(ds.train, 1);
    const Eigen::MatrixXd m2 = patches_to_matrix(ds.train, 2);
    if (m1.cols() == 0 || m2.cols() == 0) {
        throw std::runtime_error("cmd_train: a class has no training patches");
    }

    const TrainConfig tc = train_config(cfg);
    const KsvdResult r1 = ksvd_train(m1, tc, cfg.patch_size, image.channels);
    const KsvdResult r2 = ksvd_train(m2, tc, cfg.patch_size, image.channels);

    fs::create_directories(out_dir);
    TrainOutput out;
    out.dict1_path = (fs::path(out_dir) / "dict1.json").string();
    out.dict2_path = (fs::path(out_dir) / "dict2.json").string();
    out.summary_path = (fs::path(out_dir) / "train_summary.txt").string();
    const std::string echo = format_config(cfg);
    save_dictionary(out.dict1_path, r1.dict, echo);
    save_dictionary(out.dict2_path, r2.dict, echo);

    out.train_count_fg = count_label(ds.train, 1);
    out.train_count_bg = count_label(ds.train, 2);
    out.test_count_fg = count_label(ds.test, 1);
    out.test_count_bg = count_label(ds.test, 2);

    std::ostringstream summary;
    summary << "train_fg=" << out.train_count_fg << "\n"
            << "train_bg=" << out.train_count_bg << "\n"
            << "test_fg=" << out.test_count_fg << "\n"
            << "test_bg=" << out.test_count_bg << "\n"
            << "ksvd_objective_fg=" << (r1.objective.empty() ? 0.0 : r1.objective.back()) << "\n"
            << "ksvd_objective_bg=" << (r2.objective.empty() ? 0.0 : r2.objective.back()) << "\n";
    write_text(out.summary_path, summary.str());

    std::cout << "train: class 1 (foreground) " << out.train_count_fg << " train / "
              << out.test_count_fg << " test; class 2 (background) " << out.train_count_bg
              << " train / " << out.test_count_bg << " test\n";
    return out;
}

ValidateOutput cmd_validate(const std::string& dict1_path, const std::string& dict2_path,
                            const std::string& image_path, const std::string& fg_mask_path,
                            const std::string& bg_mask_path, const PipelineConfig& cfg,
                            const std::string& roc_out_path) {
    const Dictionary d1 = load_dictionary(dict1_path);
    const Dictionary d2 = load_dictionary(dict2_path);
    if (d1.k() != d2.k() || d1.patch_size != d2.patch_size) {
        throw std::invalid_argument("cmd_validate: dictionary geometry mismatch");
    }
    const ImageBuffer image = read_image_png(image_path);
    const BinaryMask fg = read_mask_png(fg_mask_path);
    const BinaryMask bg = read_mask_png(bg_mask_path);

    PipelineConfig ds_cfg = cfg;
    ds_cfg.patch_size = d1.patch_size; // the dictionaries pin the geometry
    const Dataset ds = rebuild_dataset(image, fg, bg, ds_cfg);

    // Reference statistics come from the training split, mirroring training.
    const CorrelationMatrix c1 = class_correlation(patches_to_matrix(ds.train, 1), d1, cfg);
    const CorrelationMatrix c2 = class_correlation(patches_to_matrix(ds.train, 2), d2, cfg);

    std::vector<double> scores;
    std::vector<int> labels;
    scores.reserve(ds.test.size());
    labels.reserve(ds.test.size());
    for (const LabeledPatch& lp : ds.test) {
        scores.push_back(
            classify_patch(lp.patch.values, d1, d2, c1, c2, cfg.sparsity, cfg.score_norm())
                .score);
        labels.push_back(lp.label);
    }

    ValidateOutput out;
    out.roc = roc_curve(scores, labels);
    out.auc = out.roc.auc;
    out.passed = !(out.auc < cfg.min_auc);
    if (!roc_out_path.empty()) {
        write_text(roc_out_path, format_roc(out.roc));
        out.roc_path = roc_out_path;
    }
    return out;
}

SegmentationReport cmd_segment(const std::string& image_path, const std::string& dict1_path,
                               const std::string& dict2_path, const std::string& out_dir,
                               const PipelineConfig& cfg, const std::string& gt_mask_path) {
    const auto t0 = std::chrono::steady_clock::now();
    const ImageBuffer image = read_image_png(image_path);
    const Dictionary d1 = load_dictionary(dict1_path);
    const Dictionary d2 = load_dictionary(dict2_path);

    const EvolveResult evolved = evolve(image, d1, d2, cfg.seg_params(), cfg.sparsity, cfg.seed);
    const BinaryMask mask = post_process(evolved.mask, cfg.min_segment_area);

    fs::create_directories(out_dir);
    SegmentationReport report;
    report.mask_path = (fs::path(out_dir) / "mask.png").string();
    report.overlay_path = (fs::path(out_dir) / "overlay.png").string();
    report.trace_path = (fs::path(out_dir) / "trace.txt").string();
    report.report_path = (fs::path(out_dir) / "report.txt").string();
    write_mask_png(report.mask_path, mask);
    write_image_png(report.overlay_path, render_overlay(image, mask));
    write_text(report.trace_path, format_trace(evolved.trace, evolved.converged));

    report.steps_run = static_cast<int>(evolved.trace.size());
    report.converged = evolved.converged;
    if (!report.converged && cfg.max_steps > 0) {
        std::cerr << "cmd_segment: warning: not converged after " << report.steps_run
                  << " steps\n";
    }
    if (!gt_mask_path.empty()) {
        report.iou = compute_iou(mask, read_mask_png(gt_mask_path));
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::ostringstream rep;
    rep << "mask=" << report.mask_path << "\n"
        << "overlay=" << report.overlay_path << "\n"
        << "trace=" << report.trace_path << "\n"
        << "steps=" << report.steps_run << "\n"
        << "converged=" << (report.converged ? 1 : 0) << "\n";
    if (report.iou) rep << "iou=" << *report.iou << "\n";
    rep << "wall_seconds=" << report.wall_seconds << "\n";
    write_text(report.report_path, rep.str());
    return report;
}

std::vector<CompareRow> cmd_compare(const std::string& image_path,
                                    const std::string& dict1_path,
                                    const std::string& dict2_path, const std::string& out_dir,
                                    const PipelineConfig& cfg, const std::string& gt_mask_path) {
    const ImageBuffer image = read_image_png(image_path);
    const BinaryMask gt = read_mask_png(gt_mask_path);
    fs::create_directories(out_dir);

    auto finish = [&](const std::string& method, const BinaryMask& raw) {
        CompareRow row;
        row.method = method;
        const BinaryMask mask = post_process(raw, cfg.min_segment_area);
        row.iou = compute_iou(mask, gt);
        row.mask_path = (fs::path(out_dir) / ("mask_" + method + ".png")).string();
        row.overlay_path = (fs::path(out_dir) / ("overlay_" + method + ".png")).string();
        write_mask_png(row.mask_path, mask);
        write_image_png(row.overlay_path, render_overlay(image, mask));
        return row;
    };

    std::vector<CompareRow> rows;
    {
        const Dictionary d1 = load_dictionary(dict1_path);
        const Dictionary d2 = load_dictionary(dict2_path);
        const EvolveResult r = evolve(image, d1, d2, cfg.seg_params(), cfg.sparsity, cfg.seed);
        rows.push_back(finish("lsksvd", r.mask));
    }
    SegParams cv_params = cfg.seg_params();
    cv_params.mu = cfg.cv_mu;
    cv_params.nu = cfg.cv_nu;
    rows.push_back(finish("cv_vector", evolve_chan_vese(image, CvMode::vector, cfg.cv_lambda1,
                                                        cfg.cv_lambda2, cv_params)
                                           .mask));
    rows.push_back(finish("cv_astar", evolve_chan_vese(image, CvMode::a_star, cfg.cv_lambda1,
                                                       cfg.cv_lambda2, cv_params)
                                          .mask));
    return rows;
}

SynthParams default_synth_params() {
    SynthParams p;
    p.fg_texture.kind = TextureSpec::Kind::stripes;
    p.fg_texture.angle_deg = 45.0;
    p.fg_texture.amplitude = 0.28;
    p.fg_texture.channel_gain = {1.0, 0.75, 0.55};
    p.bg_texture.kind = TextureSpec::Kind::stripes;
    p.bg_texture.angle_deg = 135.0;
    p.bg_texture.amplitude = 0.28;
    p.bg_texture.channel_gain = {0.55, 0.75, 1.0};
    // Same base color on both sides and zero-mean patterns: iso-mean by
    // construction, so intensity-only baselines see no contrast.
    return p;
}

SynthOutput cmd_synth(const std::string& out_dir, const SynthParams& params) {
    const SyntheticScene scene =
        gen_synthetic(params.width, params.height, params.fg_texture, params.bg_texture,
                      params.blobs, params.seed, params.blur_sigma);
    fs::create_directories(out_dir);
    SynthOutput out;
    out.image_path = (fs::path(out_dir) / "image.png").string();
    out.fg_mask_path = (fs::path(out_dir) / "fg_mask.png").string();
    out.bg_mask_path = (fs::path(out_dir) / "bg_mask.png").string();
    write_image_png(out.image_path, scene.image);
    write_mask_png(out.fg_mask_path, scene.fg);
    write_mask_png(out.bg_mask_path, scene.bg);
    return out;
}

} // namespace lsksvd
