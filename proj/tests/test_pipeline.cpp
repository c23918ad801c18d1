#include <doctest.h>

#include <fstream>

#include "lsksvd/level_set.hpp"
#include "lsksvd/mask_ops.hpp"
#include "lsksvd/pipeline.hpp"
#include "oracles.hpp"

using namespace lsksvd;

TEST_CASE("post_process removes small components only") {
    SUBCASE("threshold 0 is a no-op") {
        BinaryMask mask(6, 6);
        mask.set(1, 1, true);
        const BinaryMask out = post_process(mask, 0);
        CHECK(out.bits == mask.bits);
    }
    SUBCASE("a 3-pixel component below threshold 5 disappears") {
        BinaryMask mask(6, 6);
        mask.set(1, 1, true);
        mask.set(2, 1, true);
        mask.set(2, 2, true);
        const BinaryMask out = post_process(mask, 5);
        CHECK(out.count_true() == 0);
    }
    SUBCASE("mixed sizes: only the large component survives") {
        BinaryMask mask(20, 20);
        // 3-pixel component.
        mask.set(0, 0, true);
        mask.set(1, 0, true);
        mask.set(0, 1, true);
        // 50-pixel component: a 10x5 block.
        for (int y = 10; y < 15; ++y) {
            for (int x = 5; x < 15; ++x) mask.set(x, y, true);
        }
        const BinaryMask out = post_process(mask, 10);
        CHECK(out.count_true() == 50);
        CHECK(!out.at(0, 0));
        CHECK(out.at(7, 12));
    }
    SUBCASE("diagonal pixels are separate 4-connected components") {
        BinaryMask mask(4, 4);
        mask.set(0, 0, true);
        mask.set(1, 1, true);
        const BinaryMask out = post_process(mask, 2);
        CHECK(out.count_true() == 0);
    }
    SUBCASE("never adds foreground") {
        std::mt19937 rng(500);
        BinaryMask mask(15, 15);
        for (auto& b : mask.bits) b = rng() % 3 == 0;
        const BinaryMask out = post_process(mask, 4);
        for (size_t i = 0; i < mask.bits.size(); ++i) {
            if (out.bits[i]) CHECK(mask.bits[i]);
        }
    }
}

TEST_CASE("compute_iou") {
    BinaryMask a(5, 4), b(5, 4);
    CHECK(compute_iou(a, b) == 1.0); // both empty
    for (int i = 0; i < 10; ++i) a.bits[static_cast<size_t>(i)] = 1;
    for (int i = 5; i < 15; ++i) b.bits[static_cast<size_t>(i)] = 1;
    CHECK(compute_iou(a, b) == doctest::Approx(5.0 / 15.0));
    CHECK(compute_iou(b, a) == compute_iou(a, b));
    CHECK(compute_iou(a, a) == 1.0);

    BinaryMask c(5, 4);
    for (int i = 10; i < 12; ++i) c.bits[static_cast<size_t>(i)] = 1;
    CHECK(compute_iou(a, c) == 0.0);

    BinaryMask wrong(4, 4);
    CHECK_THROWS(compute_iou(a, wrong));
}

TEST_CASE("config entries parse, reject unknown keys, and round-trip") {
    PipelineConfig cfg;
    apply_config_entry("mu", "12.5", cfg);
    apply_config_entry("balance", "false", cfg);
    apply_config_entry("norm", "l2", cfg);
    CHECK(cfg.mu == 12.5);
    CHECK(!cfg.balance);
    CHECK(cfg.score_norm() == ScoreNorm::l2);
    CHECK_THROWS(apply_config_entry("not_a_key", "1", cfg));
    CHECK_THROWS(apply_config_entry("balance", "maybe", cfg));

    oracle::TempDir dir("cfg");
    {
        std::ofstream out(dir.file("cfg.txt"));
        out << "# comment\n\nmu = 3\nnu=4\nseed=99\n";
    }
    PipelineConfig loaded;
    load_config_file(dir.file("cfg.txt"), loaded, {"nu"}); // nu fixed on the CLI
    CHECK(loaded.mu == 3.0);
    CHECK(loaded.nu == 35.0);
    CHECK(loaded.seed == 99);

    // format_config emits every key and parses back to an identical config.
    PipelineConfig reference;
    reference.mu = 17.25;
    reference.dict_atoms = 12;
    reference.norm = "l2";
    {
        std::ofstream out(dir.file("full.txt"));
        out << format_config(reference);
    }
    PipelineConfig parsed;
    load_config_file(dir.file("full.txt"), parsed);
    CHECK(format_config(parsed) == format_config(reference));
    CHECK(config_keys().size() == 28);
}

TEST_CASE("defaults follow the published parameter choices") {
    PipelineConfig cfg;
    CHECK(cfg.patch_size == 8);
    CHECK(cfg.mu == 25.0);
    CHECK(cfg.nu == 35.0);
    CHECK(cfg.d == 0.005);
    CHECK(cfg.patience == 5);
    CHECK(cfg.split_ratio == 0.7);
    CHECK(cfg.min_auc == 0.9);
    CHECK(cfg.effective_stride() == 4);
}

namespace {

// One synthetic scene + one training run shared by the integration tests.
struct PipelineFixture {
    oracle::TempDir dir{"pipeline"};
    SynthParams sp = default_synth_params();
    SynthOutput synth;
    PipelineConfig cfg;
    TrainOutput train;

    PipelineFixture() {
        sp.width = 128;
        sp.height = 128;
        sp.seed = 77;
        sp.blobs.count = 1;
        sp.blobs.min_radius = 42.0;
        sp.blobs.max_radius = 46.0;
        synth = cmd_synth(dir.file("scene"), sp);

        cfg.dict_atoms = 32;
        cfg.sparsity = 4;
        cfg.ksvd_iterations = 10;
        cfg.seed = 7;
        // Weights sized for unit-range images: the fidelity term scales with
        // the squared image range.
        cfg.mu = 0.2;
        cfg.nu = 0.3;
        cfg.ridge = 0.05;
        cfg.radius = 6.0;
        cfg.spacing = 14.0;
        cfg.d = 0.001;
        cfg.max_steps = 300;
        train = cmd_train(synth.image_path, synth.fg_mask_path, synth.bg_mask_path,
                          dir.file("train"), cfg);
    }
};

PipelineFixture& fixture() {
    static PipelineFixture fx;
    return fx;
}

} // namespace

TEST_CASE("cmd_synth writes a deterministic scene") {
    PipelineFixture& fx = fixture();
    const SynthOutput again = cmd_synth(fx.dir.file("scene_again"), fx.sp);
    CHECK(oracle::slurp(fx.synth.image_path) == oracle::slurp(again.image_path));
    CHECK(oracle::slurp(fx.synth.fg_mask_path) == oracle::slurp(again.fg_mask_path));
    CHECK(oracle::slurp(fx.synth.bg_mask_path) == oracle::slurp(again.bg_mask_path));
    CHECK(!oracle::slurp(fx.synth.image_path).empty());
}

TEST_CASE("cmd_train produces balanced splits and well-formed dictionaries") {
    PipelineFixture& fx = fixture();
    CHECK(fx.train.train_count_fg == fx.train.train_count_bg);
    CHECK(fx.train.train_count_fg > 0);
    CHECK(fx.train.test_count_fg > 0);

    const Dictionary d1 = load_dictionary(fx.train.dict1_path);
    const Dictionary d2 = load_dictionary(fx.train.dict2_path);
    CHECK(d1.well_formed());
    CHECK(d2.well_formed());
    CHECK(d1.patch_size == 8);
    CHECK(d1.k() == 192);
    CHECK(d1.atom_count() == 32);
    CHECK(!oracle::slurp(fx.train.summary_path).empty());
}

TEST_CASE("cmd_validate clears the AUC gate on separable textures") {
    PipelineFixture& fx = fixture();
    const ValidateOutput v =
        cmd_validate(fx.train.dict1_path, fx.train.dict2_path, fx.synth.image_path,
                     fx.synth.fg_mask_path, fx.synth.bg_mask_path, fx.cfg,
                     fx.dir.file("roc.txt"));
    CHECK(v.auc > 0.9);
    CHECK(v.passed);
    CHECK(!oracle::slurp(fx.dir.file("roc.txt")).empty());

    // The same dictionary on both sides cannot separate the classes: in l2
    // mode every score is exactly zero, so the ROC collapses to chance.
    PipelineConfig degenerate = fx.cfg;
    degenerate.norm = "l2";
    const ValidateOutput junk =
        cmd_validate(fx.train.dict1_path, fx.train.dict1_path, fx.synth.image_path,
                     fx.synth.fg_mask_path, fx.synth.bg_mask_path, degenerate);
    CHECK(junk.auc == doctest::Approx(0.5));
    CHECK(!junk.passed);
}

TEST_CASE("cmd_segment reaches the ground truth and reruns byte-identically") {
    PipelineFixture& fx = fixture();
    const SegmentationReport report =
        cmd_segment(fx.synth.image_path, fx.train.dict1_path, fx.train.dict2_path,
                    fx.dir.file("seg"), fx.cfg, fx.synth.fg_mask_path);
    REQUIRE(report.iou.has_value());
    CHECK(*report.iou >= 0.9);
    CHECK(report.steps_run > 0);

    const SegmentationReport rerun =
        cmd_segment(fx.synth.image_path, fx.train.dict1_path, fx.train.dict2_path,
                    fx.dir.file("seg2"), fx.cfg, fx.synth.fg_mask_path);
    CHECK(oracle::slurp(report.mask_path) == oracle::slurp(rerun.mask_path));
    CHECK(oracle::slurp(report.trace_path) == oracle::slurp(rerun.trace_path));
    CHECK(oracle::slurp(report.overlay_path) == oracle::slurp(rerun.overlay_path));
}

TEST_CASE("cmd_train reruns byte-identically") {
    PipelineFixture& fx = fixture();
    const TrainOutput again = cmd_train(fx.synth.image_path, fx.synth.fg_mask_path,
                                        fx.synth.bg_mask_path, fx.dir.file("train2"), fx.cfg);
    CHECK(oracle::slurp(fx.train.dict1_path) == oracle::slurp(again.dict1_path));
    CHECK(oracle::slurp(fx.train.dict2_path) == oracle::slurp(again.dict2_path));
}

TEST_CASE("cmd_segment with max_steps 0 returns the initial circles") {
    PipelineFixture& fx = fixture();
    PipelineConfig frozen = fx.cfg;
    frozen.max_steps = 0;
    frozen.min_segment_area = 0;
    const SegmentationReport report =
        cmd_segment(fx.synth.image_path, fx.train.dict1_path, fx.train.dict2_path,
                    fx.dir.file("seg0"), frozen);
    const BinaryMask mask = read_mask_png(report.mask_path);
    const Field phi0 = init_phi_checkerboard(128, 128, frozen.radius, frozen.spacing);
    for (size_t i = 0; i < phi0.v.size(); ++i) {
        CHECK(mask.bits[i] == (phi0.v[i] > 0.0 ? 1 : 0));
    }
}

TEST_CASE("cmd_compare ranks texture-aware segmentation above intensity baselines") {
    PipelineFixture& fx = fixture();
    const auto rows = cmd_compare(fx.synth.image_path, fx.train.dict1_path,
                                  fx.train.dict2_path, fx.dir.file("cmp"), fx.cfg,
                                  fx.synth.fg_mask_path);
    REQUIRE(rows.size() == 3);
    double lsksvd_iou = -1.0, cv_iou = -1.0;
    for (const auto& row : rows) {
        CHECK(row.iou >= 0.0);
        CHECK(row.iou <= 1.0);
        CHECK(!oracle::slurp(row.mask_path).empty());
        if (row.method == "lsksvd") lsksvd_iou = row.iou;
        if (row.method == "cv_vector") cv_iou = row.iou;
    }
    // Iso-mean textures: intensity-only Chan-Vese has no signal to work with.
    CHECK(lsksvd_iou >= cv_iou + 0.2);
}
