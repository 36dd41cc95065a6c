#include "shotladder/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "shotladder/error.hpp"

namespace shotladder {

Ladder synth_fixed_ladder(const SynthConfig& config, const LadderConfig& ladder_config,
                          LadderKind kind) {
    const SynthVideo center = synth_center_video(config);
    std::vector<Resolution> res = ladder_config.resolutions;
    std::sort(res.begin(), res.end(), [](const Resolution& a, const Resolution& b) {
        return b < a; // descending pixels
    });
    std::vector<CrossoverThreshold> crossings;
    for (size_t i = 0; i + 1 < res.size(); ++i) {
        const double x_star =
            center.analytic_crossing(res[i + 1], res[i]) + config.fixed_ladder_bias_octaves;
        CrossoverThreshold t;
        t.higher = res[i];
        t.lower = res[i + 1];
        t.level = kind == LadderKind::Bitrate ? std::exp2(x_star)
                                              : center.true_quality(res[i + 1], x_star);
        crossings.push_back(t);
    }
    return ladder_from_crossovers(crossings, ladder_config, kind);
}

namespace {

bool ladders_agree_on_covered_steps(const Ladder& oracle, const Ladder& reference) {
    for (const LadderStep& ref_step : reference.steps) {
        bool found = false;
        for (const LadderStep& o : oracle.steps) {
            if (o.level == ref_step.level) {
                if (!(o.resolution == ref_step.resolution)) return false;
                found = true;
                break;
            }
        }
        if (!found) return false; // oracle builders emit every configured step
    }
    return true;
}

RQDataset subset(const RQDataset& ds, const std::vector<std::string>& ids) {
    RQDataset out;
    for (const RQPoint& p : ds.points)
        if (std::find(ids.begin(), ids.end(), p.video_id) != ids.end())
            out.points.push_back(p);
    return out;
}

} // namespace

std::string SynthRunResult::rows_to_csv() const {
    std::ostringstream out;
    out << "video_id,bl_vs_fixed_bdrate,bl_vs_fixed_bdvmaf,bl_vs_ref_bdrate,bl_vs_ref_bdvmaf,"
           "ql_vs_fixed_bdrate,ql_vs_fixed_bdvmaf,ref_vs_fixed_bdrate,ref_vs_fixed_bdvmaf\n";
    char buf[320];
    auto emit = [&](const char* id, const BdPair& a, const BdPair& b, const BdPair& c,
                    const BdPair& d) {
        std::snprintf(buf, sizeof(buf), "%s,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f,%.4f\n", id,
                      a.bd_rate, a.bd_vmaf, b.bd_rate, b.bd_vmaf, c.bd_rate, c.bd_vmaf, d.bd_rate,
                      d.bd_vmaf);
        out << buf;
    };
    std::vector<double> acc[8];
    for (const VideoRow& r : rows) {
        emit(r.video_id.c_str(), r.bitrate_vs_fixed, r.bitrate_vs_ref, r.quality_vs_fixed,
             r.reference_vs_fixed);
        const double vals[8] = {r.bitrate_vs_fixed.bd_rate,   r.bitrate_vs_fixed.bd_vmaf,
                                r.bitrate_vs_ref.bd_rate,     r.bitrate_vs_ref.bd_vmaf,
                                r.quality_vs_fixed.bd_rate,   r.quality_vs_fixed.bd_vmaf,
                                r.reference_vs_fixed.bd_rate, r.reference_vs_fixed.bd_vmaf};
        for (int i = 0; i < 8; ++i) acc[i].push_back(vals[i]);
    }
    if (!rows.empty()) {
        double mean[8], stddev[8];
        for (int i = 0; i < 8; ++i) {
            double s = 0;
            for (double v : acc[i]) s += v;
            mean[i] = s / static_cast<double>(acc[i].size());
            double q = 0;
            for (double v : acc[i]) q += (v - mean[i]) * (v - mean[i]);
            stddev[i] = std::sqrt(q / static_cast<double>(acc[i].size()));
        }
        emit("mean", {mean[0], mean[1]}, {mean[2], mean[3]}, {mean[4], mean[5]},
             {mean[6], mean[7]});
        emit("std", {stddev[0], stddev[1]}, {stddev[2], stddev[3]}, {stddev[4], stddev[5]},
             {stddev[6], stddev[7]});
    }
    return out.str();
}

SynthRunResult run_synth_pipeline(uint64_t seed, int n_videos, const Config& config) {
    SynthRunResult result;

    const SynthResult synth = synth_dataset(seed, n_videos, config.synth);
    RQDataset filtered;
    filtered.points = filter_constraints(synth.dataset.points, config.grid.quality_min,
                                         config.grid.quality_max);

    const Ladder fixed_bitrate =
        synth_fixed_ladder(config.synth, config.ladder, LadderKind::Bitrate);

    // (a) dataset-backed oracle predictors must reproduce the reference
    // ladders sampled from the Pareto front, on every covered step
    std::map<std::string, Ladder> reference_ladders;
    for (const SynthVideo& video : synth.videos) {
        const std::vector<RQPoint> pts = filtered.select(video.video_id);
        if (pts.empty()) throw Error("synth pipeline: video fully filtered out");
        const ParetoFront front = pareto_front(pts);

        const Ladder ref_b = reference_ladder(front, config.ladder, LadderKind::Bitrate);
        const Ladder ref_q = reference_ladder(front, config.ladder, LadderKind::Quality);
        reference_ladders[video.video_id] = ref_b;

        const Ladder oracle_b =
            build_bitrate_ladder(empirical_quality_predictor(pts), config.ladder);
        const Ladder oracle_q =
            build_quality_ladder(empirical_bitrate_predictor(pts), config.ladder);
        if (!ladders_agree_on_covered_steps(oracle_b, ref_b)) ++result.oracle_mismatches;
        if (!ladders_agree_on_covered_steps(oracle_q, ref_q)) ++result.oracle_mismatches;
    }
    result.gates.oracle_ladders_match = result.oracle_mismatches == 0;

    // grouped split and model training
    const std::vector<std::string> ids = filtered.video_ids();
    const SplitSpec split = split_grouped_ratio(ids, {0.7, 0.1, 0.2}, seed);
    const RQDataset train_points = subset(filtered, split.train);
    std::vector<std::string> eval_ids = split.validation;
    eval_ids.insert(eval_ids.end(), split.test.begin(), split.test.end());
    const RQDataset eval_points = subset(filtered, eval_ids);

    const TreesModel quality_model =
        fit(assemble_training(train_points, synth.features, PredictionTask::Quality),
            config.trees);
    const TreesModel bitrate_model =
        fit(assemble_training(train_points, synth.features, PredictionTask::Bitrate),
            config.trees);

    result.quality_model_report =
        training_report(quality_model, eval_points, synth.features, PredictionTask::Quality);
    result.bitrate_model_report =
        training_report(bitrate_model, eval_points, synth.features, PredictionTask::Bitrate);

    // per held-out video: corrected ladders, hulls, BD pairs, monotonicity
    std::map<std::string, BdPair> method_pairs, reference_pairs;
    double bd_rate_vs_ref_sum = 0.0;
    for (const std::string& id : eval_ids) {
        const std::vector<RQPoint> pts = filtered.select(id);
        const FeatureVector& content = synth.features.at(id);

        const Ladder pred_b = correct_top_to_bottom(
            build_bitrate_ladder(quality_model, content, config.ladder));
        const Ladder pred_q = correct_bottom_to_top(
            build_quality_ladder(bitrate_model, content, config.ladder));
        const Ladder& ref_b = reference_ladders.at(id);

        const auto hull_method_b = ladder_to_hull(pred_b, pts);
        const auto hull_method_q = ladder_to_hull(pred_q, pts);
        const auto hull_ref = ladder_to_hull(ref_b, pts);
        const auto hull_fixed = ladder_to_hull(fixed_bitrate, pts);

        SynthRunResult::VideoRow row;
        row.video_id = id;
        BdResult r = bd_metrics(hull_method_b, hull_fixed);
        row.bitrate_vs_fixed = {r.bd_rate, r.bd_quality};
        r = bd_metrics(hull_method_b, hull_ref);
        row.bitrate_vs_ref = {r.bd_rate, r.bd_quality};
        r = bd_metrics(hull_method_q, hull_fixed);
        row.quality_vs_fixed = {r.bd_rate, r.bd_quality};
        r = bd_metrics(hull_ref, hull_fixed);
        row.reference_vs_fixed = {r.bd_rate, r.bd_quality};
        result.rows.push_back(row);

        method_pairs[id] = row.bitrate_vs_fixed;
        reference_pairs[id] = row.reference_vs_fixed;
        bd_rate_vs_ref_sum += row.bitrate_vs_ref.bd_rate;

        // quality-prediction series per resolution, eps = 0.5 VMAF
        for (const Resolution& res : config.ladder.resolutions) {
            const RQCurve curve = build_curve(pts, res);
            if (curve.x.size() < 2) continue; // no span to sweep
            std::vector<double> xs, qs;
            const int sweeps = 25;
            std::vector<double> row_features = content.values;
            row_features.push_back(0.0);
            row_features.push_back(res.width / kDimensionNorm);
            row_features.push_back(res.height / kDimensionNorm);
            for (int k = 0; k <= sweeps; ++k) {
                const double x = curve.min_x() + (curve.max_x() - curve.min_x()) * k / sweeps;
                row_features[content.values.size()] = x;
                xs.push_back(x);
                qs.push_back(100.0 * predict(quality_model, row_features));
            }
            ++result.mono_series_total;
            if (check_monotonic(xs, qs, 0.5).pass) ++result.mono_series_passed;
        }
    }

    result.closeness_bitrate = closeness(method_pairs, reference_pairs);
    result.gates.f25 = result.closeness_bitrate.f25;
    result.gates.mean_bd_rate_vs_reference =
        bd_rate_vs_ref_sum / static_cast<double>(eval_ids.size());
    result.gates.monotone_fraction =
        result.mono_series_total == 0
            ? 0.0
            : static_cast<double>(result.mono_series_passed) / result.mono_series_total;
    return result;
}

} // namespace shotladder
