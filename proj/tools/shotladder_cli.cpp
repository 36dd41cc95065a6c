// Command-line front end: feature extraction, encode planning, manifest
// ingestion, model training, ladder construction and BD evaluation, plus
// the synthetic desk-scale pipeline.
//
// Exit codes: 0 success, 1 validation/input error, 2 acceptance or
// property failure.
#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "shotladder/bd.hpp"
#include "shotladder/config.hpp"
#include "shotladder/dataset.hpp"
#include "shotladder/error.hpp"
#include "shotladder/ladders.hpp"
#include "shotladder/media.hpp"
#include "shotladder/pipeline.hpp"
#include "shotladder/report.hpp"
#include "shotladder/texture.hpp"
#include "shotladder/trees.hpp"
#include "shotladder/vif.hpp"

namespace fs = std::filesystem;
using namespace shotladder;

namespace {

Config load_or_default(const std::string& path) {
    if (path.empty()) return default_config();
    return load_config_file(path);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    out << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string default_video_id(const std::string& input_path) {
    return fs::path(input_path).stem().string();
}

// ---- extract-features ----------------------------------------------------

struct ExtractArgs {
    std::string input, set_name, out, video_id, config_path;
    double bitrate = 0.0;
    double quality = -1.0;
};

int run_extract(const ExtractArgs& a) {
    const Config config = load_or_default(a.config_path);
    const VideoClip clip = parse_y4m_file(a.input);

    FeatureVector fv;
    if (a.set_name.rfind("viff", 0) == 0) {
        const int set_id = std::atoi(a.set_name.c_str() + 4);
        fv = extract_viff(clip, set_id, config.vif);
    } else if (a.set_name.rfind("llf", 0) == 0) {
        const int set_id = std::atoi(a.set_name.c_str() + 3);
        fv = extract_llf(clip, set_id,
                         a.bitrate > 0 ? std::optional<double>(a.bitrate) : std::nullopt,
                         a.quality >= 0 ? std::optional<double>(a.quality) : std::nullopt,
                         config.llf);
    } else {
        throw ValidationError("unknown feature set '" + a.set_name +
                              "' (expected viff1..viff9 or llf1..llf3)");
    }

    const std::string id = a.video_id.empty() ? default_video_id(a.input) : a.video_id;
    write_text_file(a.out, feature_file_to_json(fv, id, config_hash(config)));
    std::printf("%s: %zu features (%s) -> %s\n", id.c_str(), fv.size(), fv.set_id.c_str(),
                a.out.c_str());
    return 0;
}

// ---- plan-encodes ----------------------------------------------------------

int run_plan(const std::vector<std::string>& videos, const std::string& encode_dir,
             const std::string& out, const std::string& config_path) {
    const Config config = load_or_default(config_path);
    std::vector<std::pair<std::string, std::string>> list;
    for (const std::string& v : videos) {
        const size_t eq = v.find('=');
        if (eq == std::string::npos)
            list.emplace_back(default_video_id(v), v);
        else
            list.emplace_back(v.substr(0, eq), v.substr(eq + 1));
    }
    const EncodePlan plan = plan_encodes(list, config.grid, encode_dir);
    write_text_file(out, encode_plan_to_json(plan));
    std::printf("%zu jobs -> %s\n", plan.jobs.size(), out.c_str());
    return 0;
}

// ---- ingest ---------------------------------------------------------------

int run_ingest(const std::string& manifest, const std::string& out, bool apply_filter,
               const std::string& config_path) {
    const Config config = load_or_default(config_path);
    RQDataset ds = ingest_manifest_file(manifest);
    const size_t raw = ds.points.size();
    if (apply_filter)
        ds.points = filter_constraints(ds.points, config.grid.quality_min,
                                       config.grid.quality_max);
    std::printf("%zu rows ingested, %zu kept\n", raw, ds.points.size());
    if (!out.empty()) {
        std::ofstream os(out);
        if (!os) throw ValidationError("cannot open " + out + " for writing");
        emit_manifest_csv(ds, os);
        std::printf("normalized manifest -> %s\n", out.c_str());
    }
    return 0;
}

// ---- feature store --------------------------------------------------------

std::map<std::string, FeatureVector> load_feature_store(const std::string& dir,
                                                        const std::string& set_name) {
    std::map<std::string, FeatureVector> store;
    if (!fs::is_directory(dir)) throw ValidationError("not a directory: " + dir);
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        std::string video_id;
        FeatureVector fv = feature_file_from_json(read_text_file(entry.path().string()),
                                                  &video_id);
        if (!set_name.empty() && fv.set_id != set_name) continue;
        store[video_id] = std::move(fv);
    }
    if (store.empty())
        throw ValidationError("no feature files for set '" + set_name + "' under " + dir);
    return store;
}

// ---- train ------------------------------------------------------------------

struct TrainArgs {
    std::string task, manifest, features_dir, feature_set, out, report, config_path;
    uint64_t split_seed = 0;
    std::vector<int> counts;
};

int run_train(const TrainArgs& a) {
    const Config config = load_or_default(a.config_path);
    if (a.task != "quality" && a.task != "bitrate")
        throw ValidationError("--task must be quality or bitrate");
    const PredictionTask task =
        a.task == "quality" ? PredictionTask::Quality : PredictionTask::Bitrate;

    RQDataset ds = ingest_manifest_file(a.manifest);
    ds.points =
        filter_constraints(ds.points, config.grid.quality_min, config.grid.quality_max);
    if (ds.points.empty()) throw ValidationError("no points left after constraint filtering");

    const auto store = load_feature_store(a.features_dir, a.feature_set);
    const std::vector<std::string> ids = ds.video_ids();

    SplitSpec split;
    if (a.counts.size() == 3) {
        split = split_grouped(ids, {a.counts[0], a.counts[1], a.counts[2]}, a.split_seed);
    } else if (a.counts.empty()) {
        split = split_grouped_ratio(ids, {0.7, 0.1, 0.2}, a.split_seed);
    } else {
        throw ValidationError("--counts takes exactly three values");
    }

    auto subset = [&](const std::vector<std::string>& part) {
        RQDataset out_ds;
        for (const RQPoint& p : ds.points)
            if (std::find(part.begin(), part.end(), p.video_id) != part.end())
                out_ds.points.push_back(p);
        return out_ds;
    };
    const RQDataset train_ds = subset(split.train);
    std::vector<std::string> eval_ids = split.validation;
    eval_ids.insert(eval_ids.end(), split.test.begin(), split.test.end());
    const RQDataset eval_ds = subset(eval_ids);

    const TreesModel model = fit(assemble_training(train_ds, store, task), config.trees);
    save_model_file(model, a.out);
    std::printf("model (%zu trees, %zu features) -> %s\n", model.trees.size(),
                model.dimensionality(), a.out.c_str());

    if (!eval_ds.points.empty()) {
        const TrainingReport report = training_report(model, eval_ds, store, task);
        const std::string csv = report.to_csv();
        if (!a.report.empty()) {
            write_text_file(a.report, csv);
            std::printf("validation+test correlations -> %s\n", a.report.c_str());
        }
        std::fputs(csv.c_str(), stdout);
    }
    return 0;
}

// ---- build-ladder -----------------------------------------------------------

struct BuildLadderArgs {
    std::string model, features, ladder_in, kind = "bitrate", out, config_path;
    bool correct = false;
};

int run_build_ladder(const BuildLadderArgs& a) {
    const Config config = load_or_default(a.config_path);
    Ladder ladder;
    if (!a.ladder_in.empty()) {
        ladder = load_ladder_file(a.ladder_in);
    } else {
        if (a.model.empty() || a.features.empty())
            throw ValidationError("build-ladder needs --model and --features (or --ladder)");
        const TreesModel model = load_model_file(a.model);
        const FeatureVector content = feature_file_from_json(read_text_file(a.features));
        const LadderKind kind = ladder_kind_from_name(a.kind);
        ladder = kind == LadderKind::Bitrate
                     ? build_bitrate_ladder(model, content, config.ladder)
                     : build_quality_ladder(model, content, config.ladder);
    }
    if (a.correct)
        ladder = ladder.kind == LadderKind::Bitrate ? correct_top_to_bottom(ladder)
                                                    : correct_bottom_to_top(ladder);
    save_ladder_file(ladder, a.out);
    std::printf("%s with %zu steps -> %s\n", ladder_kind_name(ladder.kind),
                ladder.steps.size(), a.out.c_str());
    return 0;
}

// ---- crossovers -------------------------------------------------------------

int run_crossovers(const std::string& manifest, const std::string& out,
                   const std::string& config_path) {
    const Config config = load_or_default(config_path);
    RQDataset ds = ingest_manifest_file(manifest);
    ds.points =
        filter_constraints(ds.points, config.grid.quality_min, config.grid.quality_max);

    std::vector<Resolution> res = config.grid.resolutions;
    std::sort(res.begin(), res.end(), [](const Resolution& x, const Resolution& y) {
        return y < x; // descending
    });

    nlohmann::json videos = nlohmann::json::object();
    for (const std::string& id : ds.video_ids()) {
        const auto pts = ds.select(id);
        nlohmann::json pairs = nlohmann::json::array();
        for (size_t i = 0; i + 1 < res.size(); ++i) {
            nlohmann::json entry = {{"higher", res[i].label()}, {"lower", res[i + 1].label()}};
            try {
                const RQCurve hi = build_curve(pts, res[i]);
                const RQCurve lo = build_curve(pts, res[i + 1]);
                const Crossover cb = crossover_bitrate(lo, hi);
                entry["crossover_bitrate_kbps"] =
                    cb.exists ? nlohmann::json(cb.bitrate_kbps) : nlohmann::json();
                Crossover cq;
                try {
                    cq = crossover_quality(lo, hi);
                } catch (const ValidationError&) {
                    cq.exists = false; // non-monotone curve: no usable inverse
                }
                entry["crossover_vmaf"] =
                    cq.exists ? nlohmann::json(cq.quality) : nlohmann::json();
            } catch (const ValidationError& e) {
                entry["error"] = e.what();
            }
            pairs.push_back(entry);
        }
        videos[id] = pairs;
    }
    write_text_file(out, nlohmann::json{{"crossovers", videos}}.dump(2) + "\n");
    std::printf("cross-over table for %zu videos -> %s\n", ds.video_ids().size(), out.c_str());
    return 0;
}

// ---- evaluate ----------------------------------------------------------------

struct EvaluateArgs {
    std::string manifest, fixed, ladder, ladder_dir, video_id, out_dir, config_path;
    bool reference = false;
    bool plots = true;
};

void plot_video(const std::string& path, const std::string& title,
                const std::vector<RQPoint>& pts, const std::vector<RQPoint>& hull,
                const ParetoFront& front, const Config& config) {
    std::vector<PlotSeries> series;
    const char* palette[6] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
    int color = 0;
    std::vector<Resolution> res = config.grid.resolutions;
    std::sort(res.begin(), res.end(), [](const Resolution& x, const Resolution& y) {
        return y < x;
    });
    for (const Resolution& r : res) {
        PlotSeries s;
        s.label = r.label();
        s.color = palette[color++ % 6];
        for (const RQPoint& p : pts)
            if (p.resolution() == r) s.xy.emplace_back(p.log2_bitrate(), p.quality);
        std::sort(s.xy.begin(), s.xy.end());
        if (!s.xy.empty()) series.push_back(std::move(s));
    }
    PlotSeries f;
    f.label = "pareto front";
    f.color = "#000000";
    f.markers = true;
    for (const RQPoint& p : front.points) f.xy.emplace_back(p.log2_bitrate(), p.quality);
    series.push_back(std::move(f));
    PlotSeries h;
    h.label = "ladder hull";
    h.color = "#e41a1c";
    h.markers = true;
    h.line = false;
    for (const RQPoint& p : hull) h.xy.emplace_back(p.log2_bitrate(), p.quality);
    series.push_back(std::move(h));
    write_svg_plot(path, title, "log2 bitrate (kbps)", "quality (VMAF)", series);
}

int run_evaluate(const EvaluateArgs& a) {
    const Config config = load_or_default(a.config_path);
    RQDataset ds = ingest_manifest_file(a.manifest);
    ds.points =
        filter_constraints(ds.points, config.grid.quality_min, config.grid.quality_max);
    const Ladder fixed = load_ladder_file(a.fixed);
    validate_ladder_resolutions(fixed, config.ladder);

    std::map<std::string, Ladder> ladders;
    if (!a.ladder.empty()) {
        const std::string id = a.video_id.empty()
                                   ? (ds.video_ids().size() == 1 ? ds.video_ids()[0] : "")
                                   : a.video_id;
        if (id.empty())
            throw ValidationError("--ladder with a multi-video manifest needs --video-id");
        ladders[id] = load_ladder_file(a.ladder);
    } else if (!a.ladder_dir.empty()) {
        for (const std::string& id : ds.video_ids()) {
            const fs::path p = fs::path(a.ladder_dir) / (id + ".json");
            if (fs::exists(p)) ladders[id] = load_ladder_file(p.string());
        }
        if (ladders.empty())
            throw ValidationError("no <video_id>.json ladders found in " + a.ladder_dir);
    } else {
        throw ValidationError("evaluate needs --ladder or --ladder-dir");
    }
    for (const auto& [id, ladder] : ladders) validate_ladder_resolutions(ladder, config.ladder);

    fs::create_directories(a.out_dir);
    std::map<std::string, BdPair> method_pairs, reference_pairs;
    std::ostringstream report;
    report << "video_id,vs_fixed_bdrate,vs_fixed_bdvmaf";
    if (a.reference)
        report << ",vs_ref_bdrate,vs_ref_bdvmaf,ref_vs_fixed_bdrate,ref_vs_fixed_bdvmaf";
    report << "\n";
    std::ostringstream mono_report;
    mono_report << "video_id,resolution,quality_monotone\n";

    char line[512];
    std::vector<double> col_vals[6];
    for (const auto& [id, ladder] : ladders) {
        const auto pts = ds.select(id);
        if (pts.empty()) throw ValidationError("manifest has no rows for video " + id);
        const auto hull_method = ladder_to_hull(ladder, pts);
        const auto hull_fixed = ladder_to_hull(fixed, pts);
        const BdResult vs_fixed = bd_metrics(hull_method, hull_fixed);
        method_pairs[id] = {vs_fixed.bd_rate, vs_fixed.bd_quality};

        const ParetoFront front = pareto_front(pts);
        double cols[6] = {vs_fixed.bd_rate, vs_fixed.bd_quality, 0, 0, 0, 0};
        int ncols = 2;
        if (a.reference) {
            const Ladder ref = reference_ladder(front, config.ladder, LadderKind::Bitrate);
            const auto hull_ref = ladder_to_hull(ref, pts);
            const BdResult vs_ref = bd_metrics(hull_method, hull_ref);
            const BdResult ref_vs_fixed = bd_metrics(hull_ref, hull_fixed);
            reference_pairs[id] = {ref_vs_fixed.bd_rate, ref_vs_fixed.bd_quality};
            cols[2] = vs_ref.bd_rate;
            cols[3] = vs_ref.bd_quality;
            cols[4] = ref_vs_fixed.bd_rate;
            cols[5] = ref_vs_fixed.bd_quality;
            ncols = 6;
        }
        report << id;
        for (int i = 0; i < ncols; ++i) {
            std::snprintf(line, sizeof(line), ",%.4f", cols[i]);
            report << line;
            col_vals[i].push_back(cols[i]);
        }
        report << "\n";

        for (const Resolution& r : ds.resolutions()) {
            const auto res_pts = ds.select(id, r);
            if (res_pts.empty()) continue;
            const RQCurve curve = build_curve(res_pts, r);
            std::snprintf(line, sizeof(line), "%s,%s,%s\n", id.c_str(), r.label().c_str(),
                          curve.quality_monotone ? "yes" : "no");
            mono_report << line;
        }

        if (a.plots) {
            plot_video((fs::path(a.out_dir) / (id + ".svg")).string(), id + " rate-quality",
                       pts, hull_method, front, config);
        }
    }

    for (const char* tag : {"mean", "std"}) {
        report << tag;
        for (const auto& col : col_vals) {
            if (col.empty()) break;
            double mean = 0;
            for (double v : col) mean += v;
            mean /= static_cast<double>(col.size());
            double var = 0;
            for (double v : col) var += (v - mean) * (v - mean);
            const double value = std::string(tag) == "mean"
                                     ? mean
                                     : std::sqrt(var / static_cast<double>(col.size()));
            std::snprintf(line, sizeof(line), ",%.4f", value);
            report << line;
        }
        report << "\n";
    }

    write_text_file((fs::path(a.out_dir) / "bd_report.csv").string(), report.str());
    write_text_file((fs::path(a.out_dir) / "monotonicity.csv").string(), mono_report.str());
    if (a.reference && !reference_pairs.empty()) {
        const ClosenessResult c = closeness(method_pairs, reference_pairs);
        std::snprintf(line, sizeof(line), "f25,f50,f75\n%.4f,%.4f,%.4f\n", c.f25, c.f50, c.f75);
        write_text_file((fs::path(a.out_dir) / "closeness.csv").string(), line);
        std::printf("closeness: f25=%.3f f50=%.3f f75=%.3f\n", c.f25, c.f50, c.f75);
    }
    std::printf("evaluation reports -> %s\n", a.out_dir.c_str());
    return 0;
}

// ---- synth --------------------------------------------------------------------

int run_synth(uint64_t seed, int n_videos, const std::string& out_dir,
              const std::string& config_path) {
    const Config config = load_or_default(config_path);
    const SynthRunResult r = run_synth_pipeline(seed, n_videos, config);

    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_text_file((fs::path(out_dir) / "bd_report.csv").string(), r.rows_to_csv());
        write_text_file((fs::path(out_dir) / "quality_model_plcc.csv").string(),
                        r.quality_model_report.to_csv());
        write_text_file((fs::path(out_dir) / "bitrate_model_plcc.csv").string(),
                        r.bitrate_model_report.to_csv());
        save_ladder_file(synth_fixed_ladder(config.synth, config.ladder, LadderKind::Bitrate),
                         (fs::path(out_dir) / "fixed_ladder.json").string());

        // a plot per held-out video, reference hull overlaid
        const SynthResult synth = synth_dataset(seed, n_videos, config.synth);
        RQDataset filtered;
        filtered.points = filter_constraints(synth.dataset.points, config.grid.quality_min,
                                             config.grid.quality_max);
        for (const auto& row : r.rows) {
            const auto pts = filtered.select(row.video_id);
            const ParetoFront front = pareto_front(pts);
            const Ladder ref = reference_ladder(front, config.ladder, LadderKind::Bitrate);
            plot_video((fs::path(out_dir) / (row.video_id + ".svg")).string(),
                       row.video_id + " rate-quality", pts, ladder_to_hull(ref, pts), front,
                       config);
        }
    }

    std::printf("oracle ladders match reference: %s\n",
                r.gates.oracle_ladders_match ? "yes" : "NO");
    std::printf("mean BD-rate of trained bitrate ladders vs reference: %+.3f%%\n",
                r.gates.mean_bd_rate_vs_reference);
    std::printf("closeness vs reference: f25=%.3f f50=%.3f f75=%.3f\n",
                r.closeness_bitrate.f25, r.closeness_bitrate.f50, r.closeness_bitrate.f75);
    std::printf("monotone prediction series: %d/%d (%.3f)\n", r.mono_series_passed,
                r.mono_series_total, r.gates.monotone_fraction);
    if (!r.gates.pass()) {
        std::printf("synthetic pipeline gates FAILED\n");
        return 2;
    }
    std::printf("synthetic pipeline gates passed\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"per-shot bitrate/quality ladder prediction toolkit"};
    app.require_subcommand(1);
    bool json_errors = false;
    app.add_flag("--json-errors", json_errors, "report errors as JSON on stderr");

    ExtractArgs ex;
    auto* extract = app.add_subcommand("extract-features",
                                       "extract a VIFF or LLF feature set from a y4m clip");
    extract->add_option("--input", ex.input, "source .y4m file")->required();
    extract->add_option("--set", ex.set_name, "viff1..viff9 or llf1..llf3")->required();
    extract->add_option("--out", ex.out, "output feature JSON")->required();
    extract->add_option("--video-id", ex.video_id, "video id (default: input stem)");
    extract->add_option("--bitrate", ex.bitrate, "encode bitrate in kbps (llf2)");
    extract->add_option("--quality", ex.quality, "encode quality score (llf3)");
    extract->add_option("--config", ex.config_path, "TOML config file");

    std::vector<std::string> plan_videos;
    std::string plan_out, plan_dir, plan_config;
    auto* plan = app.add_subcommand("plan-encodes", "emit the encode grid as a JSON job list");
    plan->add_option("videos", plan_videos, "video sources, id=path or path")->required();
    plan->add_option("--encode-dir", plan_dir, "output directory for encodes")
        ->default_val("encodes");
    plan->add_option("--out", plan_out, "plan JSON path")->required();
    plan->add_option("--config", plan_config, "TOML config file");

    std::string ing_manifest, ing_out, ing_config;
    bool ing_filter = false;
    auto* ingest = app.add_subcommand("ingest", "validate a manifest (CSV or JSON)");
    ingest->add_option("--manifest", ing_manifest, "manifest file")->required();
    ingest->add_option("--out", ing_out, "write normalized CSV here");
    ingest->add_flag("--filter", ing_filter, "apply the quality constraint band");
    ingest->add_option("--config", ing_config, "TOML config file");

    TrainArgs tr;
    auto* train = app.add_subcommand("train", "fit a quality or bitrate prediction model");
    train->add_option("--task", tr.task, "quality | bitrate")->required();
    train->add_option("--manifest", tr.manifest, "manifest file")->required();
    train->add_option("--features-dir", tr.features_dir, "directory of feature JSON files")
        ->required();
    train->add_option("--feature-set", tr.feature_set, "restrict to one set id, e.g. viff7");
    train->add_option("--split-seed", tr.split_seed, "grouped split seed");
    train->add_option("--counts", tr.counts, "train/validation/test video counts");
    train->add_option("--out", tr.out, "model output path")->required();
    train->add_option("--report", tr.report, "per-resolution PLCC report CSV");
    train->add_option("--config", tr.config_path, "TOML config file");

    BuildLadderArgs bl;
    auto* build = app.add_subcommand("build-ladder",
                                     "construct (or just correct) a per-shot ladder");
    build->add_option("--model", bl.model, "trained model file");
    build->add_option("--features", bl.features, "content feature JSON for the shot");
    build->add_option("--ladder", bl.ladder_in, "existing ladder JSON (correction mode)");
    build->add_option("--kind", bl.kind, "bitrate | quality")->default_val("bitrate");
    build->add_flag("--correct", bl.correct, "apply the kind-appropriate correction pass");
    build->add_option("--out", bl.out, "ladder JSON output")->required();
    build->add_option("--config", bl.config_path, "TOML config file");

    std::string co_manifest, co_out, co_config;
    auto* cross = app.add_subcommand("crossovers",
                                     "true cross-over bitrates/VMAFs per adjacent pair");
    cross->add_option("--manifest", co_manifest, "manifest file")->required();
    cross->add_option("--out", co_out, "crossovers JSON output")->required();
    cross->add_option("--config", co_config, "TOML config file");

    EvaluateArgs ev;
    auto* eval = app.add_subcommand("evaluate", "BD metrics of a ladder vs fixed/reference");
    eval->add_option("--manifest", ev.manifest, "manifest file")->required();
    eval->add_option("--fixed", ev.fixed, "fixed ladder JSON")->required();
    eval->add_option("--ladder", ev.ladder, "single ladder JSON");
    eval->add_option("--ladder-dir", ev.ladder_dir, "directory of <video_id>.json ladders");
    eval->add_option("--video-id", ev.video_id, "video id for --ladder");
    eval->add_flag("--reference", ev.reference, "also compare against the reference ladder");
    eval->add_option("--out-dir", ev.out_dir, "report/plot output directory")->required();
    eval->add_flag("!--no-plots", ev.plots, "skip SVG plots");
    eval->add_option("--config", ev.config_path, "TOML config file");

    uint64_t sy_seed = 7;
    int sy_videos = 30;
    std::string sy_out, sy_config;
    auto* synth = app.add_subcommand("synth", "desk-scale synthetic end-to-end pipeline");
    synth->add_option("--seed", sy_seed, "generator seed");
    synth->add_option("--videos", sy_videos, "number of synthetic videos");
    synth->add_option("--out-dir", sy_out, "report/plot output directory");
    synth->add_option("--config", sy_config, "TOML config file");

    std::string cfg_out;
    auto* cfg = app.add_subcommand("config", "emit the default TOML configuration");
    cfg->add_option("--out", cfg_out, "path to write (stdout if omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (extract->parsed()) return run_extract(ex);
        if (plan->parsed()) return run_plan(plan_videos, plan_dir, plan_out, plan_config);
        if (ingest->parsed()) return run_ingest(ing_manifest, ing_out, ing_filter, ing_config);
        if (train->parsed()) return run_train(tr);
        if (build->parsed()) return run_build_ladder(bl);
        if (cross->parsed()) return run_crossovers(co_manifest, co_out, co_config);
        if (eval->parsed()) return run_evaluate(ev);
        if (synth->parsed()) return run_synth(sy_seed, sy_videos, sy_out, sy_config);
        if (cfg->parsed()) {
            const std::string text = config_to_toml(default_config());
            if (cfg_out.empty())
                std::fputs(text.c_str(), stdout);
            else
                write_text_file(cfg_out, text);
            return 0;
        }
    } catch (const std::exception& e) {
        if (json_errors)
            std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        else
            std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
