// Acceptance suite: one line per criterion, nonzero exit when any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "shotladder/bd.hpp"
#include "shotladder/dataset.hpp"
#include "shotladder/ladders.hpp"
#include "shotladder/pipeline.hpp"
#include "shotladder/texture.hpp"
#include "shotladder/trees.hpp"
#include "shotladder/vif.hpp"

using namespace shotladder;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

const Resolution kRes[6] = {{3840, 2160}, {2560, 1440}, {1920, 1080},
                            {1280, 720},  {960, 540},   {768, 432}};

// --- 1: correction exactness -------------------------------------------

void criterion_corrections(Check& c) {
    Ladder before;
    before.kind = LadderKind::Bitrate;
    before.steps = {{500, kRes[0]}, {1000, kRes[4]}, {2000, kRes[2]},
                    {3000, kRes[3]}, {4000, kRes[2]}};
    const Ladder after = correct_top_to_bottom(before);
    const Resolution expect_b[5] = {kRes[4], kRes[4], kRes[3], kRes[3], kRes[2]};
    for (int i = 0; i < 5; ++i)
        c.expect(after.steps[i].resolution == expect_b[i], "top-to-bottom table mismatch");

    Ladder qbefore;
    qbefore.kind = LadderKind::Quality;
    qbefore.steps = {{75, kRes[2]}, {80, kRes[3]}, {85, kRes[2]},
                     {90, kRes[1]}, {92.5, kRes[4]}};
    const Ladder qafter = correct_bottom_to_top(qbefore);
    const Resolution expect_q[5] = {kRes[2], kRes[2], kRes[2], kRes[1], kRes[1]};
    for (int i = 0; i < 5; ++i)
        c.expect(qafter.steps[i].resolution == expect_q[i], "bottom-to-top table mismatch");

    oracles::TestRng rng(20240915);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = rng.uniform_int(1, 13);
        Ladder bl, ql;
        bl.kind = LadderKind::Bitrate;
        ql.kind = LadderKind::Quality;
        std::vector<Resolution> seq;
        for (int i = 0; i < n; ++i) {
            const Resolution r = kRes[rng.uniform_int(0, 5)];
            seq.push_back(r);
            bl.steps.push_back({100.0 * (i + 1), r});
            ql.steps.push_back({20.0 + 5.0 * i, r});
        }
        const Ladder bc = correct_top_to_bottom(bl);
        const Ladder qc = correct_bottom_to_top(ql);
        const auto bo = oracles::running_min_top_down(seq);
        const auto qo = oracles::running_max_bottom_up(seq);
        const Ladder bc2 = correct_top_to_bottom(bc);
        const Ladder qc2 = correct_bottom_to_top(qc);
        for (int i = 0; i < n; ++i) {
            c.expect(bc.steps[i].resolution == bo[i], "running-min oracle mismatch");
            c.expect(qc.steps[i].resolution == qo[i], "running-max oracle mismatch");
            c.expect(bc2.steps[i].resolution == bc.steps[i].resolution, "t2b not idempotent");
            c.expect(qc2.steps[i].resolution == qc.steps[i].resolution, "b2t not idempotent");
            c.expect(bc.steps[i].level == bl.steps[i].level, "levels must not change");
        }
        if (!c.ok) return;
    }
}

// --- 2: VIF algebra ------------------------------------------------------

void criterion_vif_algebra(Check& c) {
    VifConfig cfg;
    oracles::TestRng rng(777);
    for (int trial = 0; trial < 200; ++trial) {
        GsmFit fit;
        fit.n_patches = rng.uniform_int(20, 120);
        for (int j = 0; j < kVifPatchDim; ++j) fit.eigenvalues[j] = rng.uniform(0.0, 6.0);
        std::sort(fit.eigenvalues.rbegin(), fit.eigenvalues.rend());
        for (int i = 0; i < fit.n_patches; ++i) fit.s_sq.push_back(rng.uniform(0.0, 4.0));

        const SubbandInfo info = vif_mutual_info(fit, cfg);
        double total = 0.0;
        for (int j = 0; j < kVifPatchDim; ++j) {
            double brute = 0.0;
            for (double s2 : fit.s_sq)
                brute += std::log2(1.0 + s2 * fit.eigenvalues[j] / cfg.sigma_n_sq);
            brute /= static_cast<double>(fit.s_sq.size());
            c.expect(std::fabs(info.per_eigvec[j] - brute) < 1e-10, "per-eigenvector sum");
            total += info.per_eigvec[j];
        }
        c.expect(std::fabs(info.total - total) < 1e-10, "subband total identity");
        if (!c.ok) return;
    }

    // scale averages through the real per-plane pipeline
    oracles::TestRng prng(31);
    Plane plane(96, 96);
    for (float& v : plane.samples) v = static_cast<float>(prng.uniform(0.0, 255.0));
    const VifFeatures feats = vif_plane_features(plane, cfg);
    for (int k = 0; k < kVifScales; ++k) {
        const double half_sum = 0.5 * (feats.cells[k][0].total + feats.cells[k][1].total);
        c.expect(std::fabs(feats.per_scale[k] - half_sum) < 1e-10, "scale average identity");
        for (int b = 0; b < kVifSubbands; ++b) {
            double sum = 0.0;
            for (double v : feats.cells[k][b].per_eigvec) sum += v;
            c.expect(std::fabs(feats.cells[k][b].total - sum) < 1e-10,
                     "per-plane subband identity");
        }
    }

    GsmFit zero;
    zero.n_patches = 30;
    zero.s_sq.assign(30, 2.0);
    const SubbandInfo zinfo = vif_mutual_info(zero, cfg);
    c.expect(zinfo.total == 0.0, "all-zero eigenvalues must give zero info");

    GsmFit unit;
    unit.n_patches = 64;
    unit.eigenvalues.fill(2.0 * cfg.sigma_n_sq);
    unit.s_sq.assign(64, 0.5);
    const SubbandInfo uinfo = vif_mutual_info(unit, cfg);
    c.expect(uinfo.total == 9.0, "unit-snr subband must give exactly 9");
}

// --- 3: feature-count contracts ------------------------------------------

void criterion_feature_counts(Check& c) {
    const VideoClip clip = oracles::make_clip(96, 96, 8, 8, 424242);
    const int viff_expected[9] = {4, 8, 72, 5, 9, 73, 9, 17, 145};
    for (int set_id = 1; set_id <= 9; ++set_id) {
        const FeatureVector fv = extract_viff(clip, set_id, {});
        c.expect(static_cast<int>(fv.size()) == viff_expected[set_id - 1],
                 "viff" + std::to_string(set_id) + " count " + std::to_string(fv.size()));
    }
    const int llf_expected[3] = {93, 96, 96};
    for (int set_id = 1; set_id <= 3; ++set_id) {
        const FeatureVector fv =
            extract_llf(clip, set_id, set_id == 2 ? std::optional<double>(3000.0) : std::nullopt,
                        set_id == 3 ? std::optional<double>(75.0) : std::nullopt, {});
        c.expect(static_cast<int>(fv.size()) == llf_expected[set_id - 1],
                 "llf" + std::to_string(set_id) + " count " + std::to_string(fv.size()));
    }
}

// --- 4: BD metrics --------------------------------------------------------

void criterion_bd(Check& c) {
    const double coeffs[4] = {2.1, 0.095, -3.2e-4, 1.4e-6};
    std::vector<RQPoint> anchor;
    for (int i = 0; i < 12; ++i) {
        const double q = 20.0 + 70.0 * i / 11.0;
        RQPoint p;
        p.video_id = "a";
        p.width = 1920;
        p.height = 1080;
        p.crf = i;
        p.quality = q;
        p.bitrate_kbps =
            std::exp2(coeffs[0] + coeffs[1] * q + coeffs[2] * q * q + coeffs[3] * q * q * q);
        anchor.push_back(p);
    }
    c.expect(std::fabs(bd_rate(anchor, anchor)) < 1e-9, "bd_rate(A,A) != 0");
    c.expect(std::fabs(bd_quality(anchor, anchor)) < 1e-9, "bd_quality(A,A) != 0");

    std::vector<RQPoint> shifted = anchor;
    for (auto& p : shifted) p.bitrate_kbps /= 2.0;
    c.expect(std::fabs(bd_rate(shifted, anchor) + 50.0) < 0.1, "-1 octave shift != -50%");

    std::vector<RQPoint> plus5 = anchor;
    for (auto& p : plus5) p.quality += 5.0;
    c.expect(std::fabs(bd_quality(plus5, anchor) - 5.0) < 1e-3, "+5 quality offset");

    // analytic cubic pair vs 1e5-panel quadrature
    const double ct[4] = {1.7, 0.088, -2.7e-4, 1.2e-6};
    std::vector<RQPoint> test;
    for (int i = 0; i < 14; ++i) {
        const double q = 17.0 + 74.0 * i / 13.0;
        RQPoint p;
        p.video_id = "t";
        p.width = 1920;
        p.height = 1080;
        p.crf = i;
        p.quality = q;
        p.bitrate_kbps = std::exp2(ct[0] + ct[1] * q + ct[2] * q * q + ct[3] * q * q * q);
        test.push_back(p);
    }
    const double got = bd_rate(test, anchor);
    const double lo = 20.0, hi = 90.0;
    const double mean_diff =
        oracles::quadrature(
            [&](double q) {
                const double xt = ct[0] + ct[1] * q + ct[2] * q * q + ct[3] * q * q * q;
                const double xa = coeffs[0] + coeffs[1] * q + coeffs[2] * q * q +
                                  coeffs[3] * q * q * q;
                return xt - xa;
            },
            lo, hi, 100000) /
        (hi - lo);
    const double expected = 100.0 * (std::exp2(mean_diff) - 1.0);
    c.expect(std::fabs(got - expected) < 0.01, "quadrature oracle disagreement");
}

// --- 5: pareto and cross-over oracles -------------------------------------

void criterion_pareto_crossover(Check& c) {
    oracles::TestRng rng(1313);
    for (int trial = 0; trial < 500 && c.ok; ++trial) {
        std::vector<RQPoint> pts;
        for (int i = 0; i < 50; ++i) {
            RQPoint p;
            const Resolution r = kRes[rng.uniform_int(0, 5)];
            p.video_id = "v";
            p.width = r.width;
            p.height = r.height;
            p.crf = rng.uniform_int(16, 41);
            p.bitrate_kbps = rng.uniform(100.0, 30000.0);
            p.quality = rng.uniform(2.0, 99.0);
            pts.push_back(p);
        }
        const auto front = pareto_front(pts).points;
        const auto ref = oracles::pareto_oracle(pts);
        c.expect(front.size() == ref.size(), "front size vs oracle");
        for (size_t i = 0; i < std::min(front.size(), ref.size()); ++i) {
            c.expect(front[i].bitrate_kbps == ref[i].bitrate_kbps &&
                         front[i].quality == ref[i].quality,
                     "front point vs oracle");
        }
    }

    int crossings_seen = 0;
    for (int trial = 0; trial < 500 && c.ok; ++trial) {
        auto make_curve = [&](double x0, double x1, double q0, double q1, Resolution r) {
            RQCurve curve;
            curve.resolution = r;
            std::vector<double> xs{x0, x1}, qs{q0, q1};
            for (int k = 0; k < 6; ++k) {
                xs.push_back(rng.uniform(x0, x1));
                qs.push_back(rng.uniform(q0, q1));
            }
            std::sort(xs.begin(), xs.end());
            std::sort(qs.begin(), qs.end());
            xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
            qs.resize(xs.size());
            curve.x = xs;
            curve.q = qs;
            return curve;
        };
        const RQCurve lower = make_curve(8.0, 12.0, 20.0, rng.uniform(50.0, 75.0), kRes[4]);
        const RQCurve higher = make_curve(8.5, 12.5, 10.0, rng.uniform(60.0, 95.0), kRes[2]);

        const int samples = 10000;
        const double span = std::min(lower.max_x(), higher.max_x()) -
                            std::max(lower.min_x(), higher.min_x());
        if (span <= 0) continue;
        const double ref = oracles::crossover_scan_oracle(lower, higher, samples);
        const Crossover got = crossover_bitrate(lower, higher);
        if (std::isnan(ref)) {
            c.expect(!got.exists, "oracle says no crossover");
        } else {
            c.expect(got.exists, "oracle found a crossover");
            if (got.exists) {
                c.expect(std::fabs(got.log2_bitrate - ref) <= span / samples + 1e-12,
                         "crossover outside one oracle step");
                ++crossings_seen;
            }
        }
    }
    c.expect(crossings_seen > 50, "generator produced too few crossings");

    // the analytic pair: q = 10x - 60 vs q = 20x - 160
    RQCurve lower, higher;
    lower.resolution = kRes[4];
    lower.x = {7.0, 12.0};
    lower.q = {10.0, 60.0};
    higher.resolution = kRes[2];
    higher.x = {8.5, 12.5};
    higher.q = {10.0, 90.0};
    const Crossover cb = crossover_bitrate(lower, higher);
    c.expect(cb.exists && std::fabs(cb.bitrate_kbps - 1024.0) < 1e-9, "analytic pair bitrate");
    const Crossover cq = crossover_quality(lower, higher);
    c.expect(cq.exists && std::fabs(cq.quality - 40.0) < 1e-9, "analytic pair quality");
}

// --- 6: trees determinism and sanity ---------------------------------------

void criterion_trees(Check& c) {
    oracles::TestRng rng(9090);
    TrainingMatrix m;
    m.target_name = "y";
    m.feature_names = {"x0"};
    for (int i = 0; i < 200; ++i) {
        const double x = rng.uniform01();
        m.rows.push_back({x});
        m.targets.push_back(x);
        m.groups.push_back("g" + std::to_string(i % 5));
    }
    TreesParams params; // spec defaults: 100 trees, min split 2, all features
    params.rng_seed = 7;

    const TreesModel model = fit(m, params);
    const auto bytes_a = save_model(model);
    const auto bytes_b = save_model(fit(m, params));
    c.expect(bytes_a == bytes_b, "same data+seed must be bit-identical");

    TrainingMatrix constant = m;
    for (double& t : constant.targets) t = 7.0;
    const TreesModel cmodel = fit(constant, params);
    for (int i = 0; i < 25; ++i)
        c.expect(predict(cmodel, std::vector<double>{rng.uniform01()}) == 7.0,
                 "constant target not exact");

    double mae = 0.0;
    const int probes = 400;
    for (int i = 0; i < probes; ++i) {
        const double x = rng.uniform(0.1, 0.9);
        mae += std::fabs(predict(model, std::vector<double>{x}) - x);
    }
    mae /= probes;
    c.expect(mae < 0.05, "y=x1 held-out MAE " + std::to_string(mae));

    const TreesModel loaded = load_model(bytes_a);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> x{rng.uniform01()};
        c.expect(predict(loaded, x) == predict(model, x), "save/load prediction drift");
    }

    int retained = 0;
    for (int trial = 0; trial < 20; ++trial) {
        oracles::TestRng trng(1000 + trial);
        TrainingMatrix rfe_data;
        rfe_data.target_name = "y";
        for (int f = 0; f < 21; ++f) rfe_data.feature_names.push_back("f" + std::to_string(f));
        for (int i = 0; i < 200; ++i) {
            std::vector<double> row(21);
            for (double& v : row) v = trng.uniform01();
            rfe_data.targets.push_back(4.0 * row[13]);
            rfe_data.rows.push_back(std::move(row));
            rfe_data.groups.push_back("g" + std::to_string(i % 5));
        }
        TreesParams p;
        p.n_trees = 40;
        p.rng_seed = 555 + trial;
        const auto sel = rfe_select(rfe_data, 9, p);
        if (sel.size() == 9 && std::find(sel.begin(), sel.end(), 13) != sel.end()) ++retained;
    }
    c.expect(retained >= 19, "rfe retention " + std::to_string(retained) + "/20");
}

// --- 7: end-to-end synthetic pipeline --------------------------------------

void criterion_synth_pipeline(Check& c) {
    const Config config = default_config();
    const SynthRunResult r = run_synth_pipeline(7, 30, config);
    c.expect(r.gates.oracle_ladders_match,
             "oracle ladders mismatched reference on " +
                 std::to_string(r.oracle_mismatches) + " videos");
    c.expect(r.gates.mean_bd_rate_vs_reference <= 3.0,
             "mean BD-rate vs reference " +
                 std::to_string(r.gates.mean_bd_rate_vs_reference));
    c.expect(r.gates.f25 >= 0.8, "f25 " + std::to_string(r.gates.f25));
    c.expect(r.gates.monotone_fraction >= 0.95,
             "monotone fraction " + std::to_string(r.gates.monotone_fraction));
}

// --- 8: grid and metadata contracts ----------------------------------------

void criterion_grid_metadata(Check& c) {
    const GridConfig grid = default_grid_config();
    std::vector<std::pair<std::string, std::string>> one{{"v", "/v.y4m"}};
    c.expect(plan_encodes(one, grid, "/o").jobs.size() == 138, "default grid != 138 jobs");

    std::vector<RQPoint> pts(2);
    pts[0].quality = 95.0;
    pts[0].bitrate_kbps = 1;
    pts[1].quality = 10.0;
    pts[1].bitrate_kbps = 1;
    const auto kept = filter_constraints(pts);
    c.expect(kept.size() == 1 && kept[0].quality == 95.0, "constraint filter bounds");

    RQDataset ds;
    RQPoint p;
    p.video_id = "v";
    p.width = 3840;
    p.height = 2160;
    p.crf = 20;
    p.bitrate_kbps = 4096.0;
    p.quality = 80.0;
    ds.points.push_back(p);
    std::map<std::string, FeatureVector> store;
    FeatureVector fv;
    fv.set_id = "llf1";
    fv.push("f", 0.0);
    store["v"] = fv;
    const TrainingMatrix mq = assemble_training(ds, store, PredictionTask::Quality);
    c.expect(mq.rows[0][1] == 12.0 && mq.rows[0][2] == 1.0 && mq.rows[0][3] == 0.5625 &&
                 mq.targets[0] == 0.8,
             "quality-task metadata arithmetic");
    const TrainingMatrix mb = assemble_training(ds, store, PredictionTask::Bitrate);
    c.expect(mb.rows[0][1] == 0.8 && mb.targets[0] == 12.0, "bitrate-task metadata arithmetic");
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        double limit_s;
        std::function<void(Check&)> run;
    };
    const std::vector<Criterion> criteria = {
        {"correction exactness (tables + 1000-ladder oracle)", 1.0, criterion_corrections},
        {"VIF aggregation algebra (200 random fits)", 5.0, criterion_vif_algebra},
        {"feature-count contracts (VIFF 1-9, LLF 1-3)", 120.0, criterion_feature_counts},
        {"BD metric identities and quadrature oracle", 5.0, criterion_bd},
        {"pareto/cross-over oracles (500 sets each)", 10.0, criterion_pareto_crossover},
        {"trees determinism and sanity", 30.0, criterion_trees},
        {"end-to-end synthetic pipeline (30 videos)", 300.0, criterion_synth_pipeline},
        {"grid and metadata contracts", 1.0, criterion_grid_metadata},
    };

    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Check check;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].run(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        check.expect(elapsed < criteria[i].limit_s, "runtime limit exceeded");
        std::printf("[%s] criterion %zu: %s (%.2fs)%s%s\n", check.ok ? "PASS" : "FAIL", i + 1,
                    criteria[i].name, elapsed, check.detail.empty() ? "" : " -- ",
                    check.detail.c_str());
        if (!check.ok) ++failures;
    }
    if (failures) {
        std::printf("%d of %zu acceptance criteria failed\n", failures, criteria.size());
        return 2;
    }
    std::printf("all %zu acceptance criteria passed\n", criteria.size());
    return 0;
}
