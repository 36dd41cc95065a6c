// Python bindings for the core operations: media decode, feature
// extraction, trees regression, rate-quality analysis, ladders and BD
// metrics.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "shotladder/bd.hpp"
#include "shotladder/config.hpp"
#include "shotladder/dataset.hpp"
#include "shotladder/error.hpp"
#include "shotladder/ladders.hpp"
#include "shotladder/media.hpp"
#include "shotladder/pipeline.hpp"
#include "shotladder/stats.hpp"
#include "shotladder/texture.hpp"
#include "shotladder/trees.hpp"
#include "shotladder/vif.hpp"

namespace py = pybind11;
using namespace shotladder;

namespace {

Frame frame_from_lists(const VideoClip& clip, const std::vector<float>& luma,
                       const std::vector<float>& u, const std::vector<float>& v) {
    const size_t ly = static_cast<size_t>(clip.width) * clip.height;
    const size_t lc = static_cast<size_t>(clip.chroma_width()) * clip.chroma_height();
    if (luma.size() != ly || u.size() != lc || v.size() != lc)
        throw ValidationError("frame plane sizes do not match the clip dimensions");
    Frame f;
    f.luma = Plane(clip.width, clip.height);
    f.luma.samples = luma;
    f.chroma_u = Plane(clip.chroma_width(), clip.chroma_height());
    f.chroma_u.samples = u;
    f.chroma_v = Plane(clip.chroma_width(), clip.chroma_height());
    f.chroma_v.samples = v;
    return f;
}

std::map<std::string, double> stat_map(const std::map<Stat, double>& stats) {
    std::map<std::string, double> out;
    for (const auto& [s, v] : stats) out[stat_name(s)] = v;
    return out;
}

std::set<Stat> stats_from_names(const std::vector<std::string>& names) {
    std::set<Stat> out;
    for (const std::string& n : names) {
        if (n == "mean") out.insert(Stat::Mean);
        else if (n == "std") out.insert(Stat::Std);
        else if (n == "skew") out.insert(Stat::Skew);
        else if (n == "kurtosis") out.insert(Stat::Kurtosis);
        else throw ValidationError("unknown stat '" + n + "'");
    }
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "per-shot bitrate/quality ladder prediction toolkit";

    py::register_exception<Error>(m, "ToolkitError");

    // ---- media ----
    py::class_<VideoClip>(m, "VideoClip")
        .def(py::init([](int width, int height, int bit_depth) {
                 VideoClip c;
                 c.width = width;
                 c.height = height;
                 c.bit_depth = bit_depth;
                 return c;
             }),
             py::arg("width"), py::arg("height"), py::arg("bit_depth") = 8)
        .def_readonly("width", &VideoClip::width)
        .def_readonly("height", &VideoClip::height)
        .def_readonly("bit_depth", &VideoClip::bit_depth)
        .def_property_readonly("frame_count", &VideoClip::frame_count)
        .def("add_frame",
             [](VideoClip& clip, const std::vector<float>& luma, const std::vector<float>& u,
                const std::vector<float>& v) {
                 clip.frames.push_back(frame_from_lists(clip, luma, u, v));
             },
             py::arg("luma"), py::arg("chroma_u"), py::arg("chroma_v"),
             "append a frame from row-major flattened planes")
        .def("luma",
             [](const VideoClip& clip, int frame) {
                 if (frame < 0 || frame >= clip.frame_count())
                     throw ValidationError("frame index out of range");
                 return clip.frames[frame].luma.samples;
             },
             py::arg("frame"), "row-major flattened luma plane of one frame");

    m.def("parse_y4m", &parse_y4m_file, py::arg("path"), "decode a YUV4MPEG2 file");
    m.def("write_y4m", &write_y4m_file, py::arg("clip"), py::arg("path"));
    m.def("mean_abs_frame_difference", [](const VideoClip& clip) {
        double acc = 0.0;
        const auto diffs = luma_differences(clip);
        for (const Plane& d : diffs) acc += mean_abs(d);
        return acc / static_cast<double>(diffs.size());
    });

    m.def("pool_spatial",
          [](const std::vector<double>& values, const std::vector<std::string>& stats) {
              return stat_map(pool_spatial(std::span<const double>(values),
                                           stats_from_names(stats)));
          },
          py::arg("values"), py::arg("stats") = std::vector<std::string>{"mean", "std"});
    m.def("pool_temporal",
          [](const std::vector<double>& values, const std::vector<std::string>& stats) {
              return stat_map(pool_temporal(std::span<const double>(values),
                                            stats_from_names(stats)));
          },
          py::arg("values"),
          py::arg("stats") = std::vector<std::string>{"mean", "std", "skew", "kurtosis"});

    // ---- features ----
    py::class_<FeatureVector>(m, "FeatureVector")
        .def(py::init<>())
        .def_readwrite("set_id", &FeatureVector::set_id)
        .def_readwrite("names", &FeatureVector::names)
        .def_readwrite("values", &FeatureVector::values)
        .def("push", &FeatureVector::push)
        .def("__len__", [](const FeatureVector& fv) { return fv.size(); });

    m.def("extract_viff",
          [](const VideoClip& clip, int set_id, double sigma_n_sq) {
              VifConfig cfg;
              cfg.sigma_n_sq = sigma_n_sq;
              return extract_viff(clip, set_id, cfg);
          },
          py::arg("clip"), py::arg("set_id"), py::arg("sigma_n_sq") = 0.1);
    m.def("extract_llf",
          [](const VideoClip& clip, int set_id, std::optional<double> bitrate_kbps,
             std::optional<double> quality) {
              return extract_llf(clip, set_id, bitrate_kbps, quality, LlfConfig{});
          },
          py::arg("clip"), py::arg("set_id"), py::arg("bitrate_kbps") = py::none(),
          py::arg("quality") = py::none());

    // ---- trees ----
    py::class_<TreesParams>(m, "TreesParams")
        .def(py::init<>())
        .def_readwrite("n_trees", &TreesParams::n_trees)
        .def_readwrite("min_samples_split", &TreesParams::min_samples_split)
        .def_readwrite("max_features", &TreesParams::max_features)
        .def_readwrite("max_depth", &TreesParams::max_depth)
        .def_readwrite("rng_seed", &TreesParams::rng_seed);

    py::class_<TrainingMatrix>(m, "TrainingMatrix")
        .def(py::init<>())
        .def_readwrite("rows", &TrainingMatrix::rows)
        .def_readwrite("targets", &TrainingMatrix::targets)
        .def_readwrite("groups", &TrainingMatrix::groups)
        .def_readwrite("feature_names", &TrainingMatrix::feature_names)
        .def_readwrite("target_name", &TrainingMatrix::target_name);

    py::class_<TreesModel>(m, "TreesModel")
        .def_readonly("feature_names", &TreesModel::feature_names)
        .def_readonly("target_name", &TreesModel::target_name)
        .def_property_readonly("n_trees",
                               [](const TreesModel& m_) { return m_.trees.size(); });

    m.def("fit", &fit, py::arg("data"), py::arg("params") = TreesParams{});
    m.def("predict", [](const TreesModel& model, const std::vector<double>& features) {
        return predict(model, features);
    });
    m.def("feature_importance", &feature_importance);
    m.def("rfe_select", &rfe_select, py::arg("data"), py::arg("target_count"),
          py::arg("params") = TreesParams{});
    m.def("save_model", [](const TreesModel& model) {
        const auto bytes = save_model(model);
        return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
    });
    m.def("load_model", [](const py::bytes& payload) {
        const std::string s = payload;
        return load_model(std::span<const uint8_t>(
            reinterpret_cast<const uint8_t*>(s.data()), s.size()));
    });
    m.def("save_model_file", &save_model_file);
    m.def("load_model_file", &load_model_file);

    // ---- rate-quality analysis ----
    py::class_<Resolution>(m, "Resolution")
        .def(py::init([](int w, int h) { return Resolution{w, h}; }), py::arg("width"),
             py::arg("height"))
        .def_readwrite("width", &Resolution::width)
        .def_readwrite("height", &Resolution::height)
        .def_property_readonly("pixels", &Resolution::pixels)
        .def("label", &Resolution::label)
        .def("__eq__", [](const Resolution& a, const Resolution& b) { return a == b; })
        .def("__repr__", [](const Resolution& r) {
            return std::to_string(r.width) + "x" + std::to_string(r.height);
        });

    py::class_<RQPoint>(m, "RQPoint")
        .def(py::init([](std::string video_id, int width, int height, int crf,
                         double bitrate_kbps, double quality) {
                 RQPoint p;
                 p.video_id = std::move(video_id);
                 p.width = width;
                 p.height = height;
                 p.crf = crf;
                 p.bitrate_kbps = bitrate_kbps;
                 p.quality = quality;
                 return p;
             }),
             py::arg("video_id"), py::arg("width"), py::arg("height"), py::arg("crf"),
             py::arg("bitrate_kbps"), py::arg("quality"))
        .def_readwrite("video_id", &RQPoint::video_id)
        .def_readwrite("width", &RQPoint::width)
        .def_readwrite("height", &RQPoint::height)
        .def_readwrite("crf", &RQPoint::crf)
        .def_readwrite("bitrate_kbps", &RQPoint::bitrate_kbps)
        .def_readwrite("quality", &RQPoint::quality);

    m.def("filter_constraints",
          [](const std::vector<RQPoint>& pts, double q_min, double q_max) {
              return filter_constraints(pts, q_min, q_max);
          },
          py::arg("points"), py::arg("q_min") = 15.0, py::arg("q_max") = 95.0);

    py::class_<RQCurve>(m, "RQCurve")
        .def_readonly("x", &RQCurve::x)
        .def_readonly("q", &RQCurve::q)
        .def_readonly("quality_monotone", &RQCurve::quality_monotone);
    m.def("build_curve", [](const std::vector<RQPoint>& pts, const Resolution& res) {
        return build_curve(pts, res);
    });
    m.def("interpolate_quality", &interpolate_quality);
    m.def("interpolate_bitrate", &interpolate_bitrate);

    py::class_<ParetoFront>(m, "ParetoFront").def_readonly("points", &ParetoFront::points);
    m.def("pareto_front",
          [](const std::vector<RQPoint>& pts) { return pareto_front(pts); });

    py::class_<Crossover>(m, "Crossover")
        .def_readonly("exists", &Crossover::exists)
        .def_readonly("log2_bitrate", &Crossover::log2_bitrate)
        .def_readonly("bitrate_kbps", &Crossover::bitrate_kbps)
        .def_readonly("quality", &Crossover::quality);
    m.def("crossover_bitrate", &crossover_bitrate);
    m.def("crossover_quality", &crossover_quality);

    m.def("check_monotonic",
          [](const std::vector<double>& x, const std::vector<double>& y, double eps) {
              const auto r = check_monotonic(x, y, eps);
              return py::make_tuple(r.pass, r.first_violation);
          },
          py::arg("x"), py::arg("y"), py::arg("eps") = 0.0);

    // ---- ladders ----
    py::enum_<LadderKind>(m, "LadderKind")
        .value("BITRATE", LadderKind::Bitrate)
        .value("QUALITY", LadderKind::Quality);

    py::class_<LadderStep>(m, "LadderStep")
        .def_readonly("level", &LadderStep::level)
        .def_readonly("resolution", &LadderStep::resolution);

    py::class_<Ladder>(m, "Ladder")
        .def_readonly("kind", &Ladder::kind)
        .def_readonly("steps", &Ladder::steps)
        .def("to_json", &ladder_to_json);
    m.def("ladder_from_json", &ladder_from_json);

    py::class_<LadderConfig>(m, "LadderConfig")
        .def(py::init(&default_ladder_config))
        .def_readwrite("resolutions", &LadderConfig::resolutions)
        .def_readwrite("bitrate_steps", &LadderConfig::bitrate_steps)
        .def_readwrite("quality_steps", &LadderConfig::quality_steps);

    m.def("build_bitrate_ladder",
          [](const TreesModel& model, const FeatureVector& content, const LadderConfig& cfg) {
              return build_bitrate_ladder(model, content, cfg);
          });
    m.def("build_quality_ladder",
          [](const TreesModel& model, const FeatureVector& content, const LadderConfig& cfg) {
              return build_quality_ladder(model, content, cfg);
          });
    m.def("correct_top_to_bottom", &correct_top_to_bottom);
    m.def("correct_bottom_to_top", &correct_bottom_to_top);
    m.def("reference_ladder", &reference_ladder);
    m.def("ladder_to_hull", [](const Ladder& ladder, const std::vector<RQPoint>& pts) {
        return ladder_to_hull(ladder, pts);
    });

    // ---- BD metrics ----
    py::class_<BdResult>(m, "BdResult")
        .def_readonly("bd_rate", &BdResult::bd_rate)
        .def_readonly("bd_quality", &BdResult::bd_quality)
        .def_readonly("monotone_warning", &BdResult::monotone_warning);
    m.def("bd_rate", [](const std::vector<RQPoint>& t, const std::vector<RQPoint>& a) {
        return bd_rate(t, a);
    });
    m.def("bd_quality", [](const std::vector<RQPoint>& t, const std::vector<RQPoint>& a) {
        return bd_quality(t, a);
    });
    m.def("bd_metrics", [](const std::vector<RQPoint>& t, const std::vector<RQPoint>& a) {
        return bd_metrics(t, a);
    });
    m.def("closeness",
          [](const std::map<std::string, std::pair<double, double>>& method,
             const std::map<std::string, std::pair<double, double>>& reference) {
              std::map<std::string, BdPair> m_, r_;
              for (const auto& [k, v] : method) m_[k] = {v.first, v.second};
              for (const auto& [k, v] : reference) r_[k] = {v.first, v.second};
              const ClosenessResult c = closeness(m_, r_);
              return py::make_tuple(c.f25, c.f50, c.f75);
          },
          py::arg("method"), py::arg("reference"),
          "maps of video id -> (bd_rate, bd_vmaf); returns (f25, f50, f75)");

    // ---- orchestration ----
    m.def("ingest_manifest", &ingest_manifest_file, py::arg("path"));
    py::class_<RQDataset>(m, "RQDataset")
        .def_property_readonly("points", [](const RQDataset& ds) { return ds.points; })
        .def("video_ids", &RQDataset::video_ids);

    m.def("split_grouped",
          [](const std::vector<std::string>& ids, std::array<int, 3> counts, uint64_t seed) {
              const SplitSpec s = split_grouped(ids, counts, seed);
              return py::make_tuple(s.train, s.validation, s.test);
          });

    m.def("synth_dataset",
          [](uint64_t seed, int n_videos) {
              const SynthResult r = synth_dataset(seed, n_videos, default_synth_config());
              return py::make_tuple(r.dataset, r.features);
          },
          py::arg("seed"), py::arg("n_videos"));

    m.def("run_synth_pipeline",
          [](uint64_t seed, int n_videos) {
              const SynthRunResult r = run_synth_pipeline(seed, n_videos, default_config());
              py::dict out;
              out["oracle_ladders_match"] = r.gates.oracle_ladders_match;
              out["mean_bd_rate_vs_reference"] = r.gates.mean_bd_rate_vs_reference;
              out["f25"] = r.gates.f25;
              out["monotone_fraction"] = r.gates.monotone_fraction;
              out["pass"] = r.gates.pass();
              out["report_csv"] = r.rows_to_csv();
              return out;
          },
          py::arg("seed"), py::arg("n_videos"));

    m.attr("__version__") = "0.1.0";
}
