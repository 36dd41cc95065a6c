#include "shotladder/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "shotladder/error.hpp"

namespace shotladder {

uint64_t fnv1a64(std::span<const uint8_t> bytes) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

uint64_t fnv1a64(const std::string& text) {
    return fnv1a64(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(text.data()),
                                            text.size()));
}

GridConfig default_grid_config() {
    GridConfig g;
    g.resolutions = {{3840, 2160}, {2560, 1440}, {1920, 1080},
                     {1280, 720},  {960, 540},   {768, 432}};
    for (int crf = 16; crf <= 35; ++crf) g.crfs.push_back(crf);
    for (int crf = 37; crf <= 41; crf += 2) g.crfs.push_back(crf);
    return g;
}

EncodePlan plan_encodes(std::span<const std::pair<std::string, std::string>> videos,
                        const GridConfig& grid, const std::string& output_dir) {
    if (videos.empty()) throw ValidationError("plan_encodes: empty video list");
    if (grid.resolutions.empty()) throw ValidationError("plan_encodes: empty resolution set");
    if (grid.crfs.empty()) throw ValidationError("plan_encodes: empty CRF set");

    EncodePlan plan;
    char buf[512];
    // quality is measured after upscaling back to the largest grid resolution
    Resolution top = grid.resolutions.front();
    for (const Resolution& r : grid.resolutions)
        if (top < r) top = r;
    for (const auto& [id, path] : videos) {
        for (const Resolution& res : grid.resolutions) {
            for (int crf : grid.crfs) {
                EncodeJob job;
                job.video_id = id;
                job.source_path = path;
                job.resolution = res;
                job.crf = crf;
                job.encoder_tag = grid.encoder_tag;
                std::snprintf(buf, sizeof(buf), "%s/%s_%dx%d_crf%d.mp4", output_dir.c_str(),
                              id.c_str(), res.width, res.height, crf);
                job.output_path = buf;
                std::snprintf(buf, sizeof(buf),
                              "ffmpeg -y -i %s -vf scale=%d:%d:flags=lanczos -c:v libx265 "
                              "-preset medium -x265-params crf=%d -an %s",
                              path.c_str(), res.width, res.height, crf,
                              job.output_path.c_str());
                job.command = buf;
                std::snprintf(buf, sizeof(buf),
                              "ffmpeg -i %s -i %s "
                              "-lavfi \"[0:v]scale=%d:%d:flags=lanczos[dis];"
                              "[dis][1:v]libvmaf\" -f null -",
                              job.output_path.c_str(), path.c_str(), top.width, top.height);
                job.quality_command = buf;
                plan.jobs.push_back(std::move(job));
            }
        }
    }
    return plan;
}

std::string encode_plan_to_json(const EncodePlan& plan) {
    nlohmann::json jobs = nlohmann::json::array();
    for (const EncodeJob& j : plan.jobs)
        jobs.push_back({{"video_id", j.video_id},
                        {"source_path", j.source_path},
                        {"width", j.resolution.width},
                        {"height", j.resolution.height},
                        {"crf", j.crf},
                        {"encoder_tag", j.encoder_tag},
                        {"output_path", j.output_path},
                        {"command", j.command},
                        {"quality_command", j.quality_command}});
    return nlohmann::json{{"jobs", jobs}}.dump(2) + "\n";
}

namespace {

struct RowIssueList {
    std::vector<std::string> issues;

    void add(size_t line, const std::string& what) {
        issues.push_back("line " + std::to_string(line) + ": " + what);
    }
    void raise_if_any() const {
        if (issues.empty()) return;
        std::string msg = "manifest rejected:";
        for (const auto& s : issues) msg += "\n  " + s;
        throw ValidationError(msg);
    }
};

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

bool parse_int(const std::string& s, int& out) {
    double d;
    if (!parse_double(s, d)) return false;
    if (d != std::floor(d)) return false;
    out = static_cast<int>(d);
    return true;
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    size_t b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

// Shared row validation for CSV and JSON ingestion. `where` is a line or
// element label used in error messages.
void validate_and_insert(RQDataset& ds, std::map<std::string, size_t>& seen, RowIssueList& issues,
                         size_t line, const RQPoint& p) {
    bool ok = true;
    if (p.video_id.empty()) {
        issues.add(line, "empty video_id");
        ok = false;
    }
    if (p.width <= 0 || p.height <= 0) {
        issues.add(line, "non-positive dimensions");
        ok = false;
    }
    if (!(p.bitrate_kbps > 0.0)) {
        issues.add(line, "bitrate must be positive");
        ok = false;
    }
    if (p.quality < 0.0 || p.quality > 100.0) {
        issues.add(line, "quality outside [0,100]");
        ok = false;
    }
    if (!ok) return;

    char key[256];
    std::snprintf(key, sizeof(key), "%s|%dx%d|%d", p.video_id.c_str(), p.width, p.height, p.crf);
    auto [it, inserted] = seen.emplace(key, line);
    if (!inserted) {
        issues.add(line, "duplicate (video,resolution,crf) key, first seen on line " +
                             std::to_string(it->second));
        return;
    }
    ds.points.push_back(p);
}

} // namespace

RQDataset ingest_manifest_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ValidationError("manifest: empty file");

    const char* expected[6] = {"video_id", "width", "height", "crf", "bitrate_kbps", "vmaf"};
    std::vector<std::string> header;
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) header.push_back(trim(cell));
    int col[6];
    for (int i = 0; i < 6; ++i) {
        auto it = std::find(header.begin(), header.end(), expected[i]);
        if (it == header.end())
            throw ValidationError(std::string("manifest: missing column '") + expected[i] + "'");
        col[i] = static_cast<int>(it - header.begin());
    }

    RQDataset ds;
    std::map<std::string, size_t> seen;
    RowIssueList issues;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(trim(cell));
        if (cells.size() < header.size()) {
            issues.add(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(cells.size()));
            continue;
        }
        RQPoint p;
        p.video_id = cells[col[0]];
        bool numeric = parse_int(cells[col[1]], p.width) && parse_int(cells[col[2]], p.height) &&
                       parse_int(cells[col[3]], p.crf) &&
                       parse_double(cells[col[4]], p.bitrate_kbps) &&
                       parse_double(cells[col[5]], p.quality);
        if (!numeric) {
            issues.add(line_no, "non-numeric field");
            continue;
        }
        validate_and_insert(ds, seen, issues, line_no, p);
    }
    issues.raise_if_any();
    if (ds.points.empty()) throw ValidationError("manifest: no valid rows");
    return ds;
}

RQDataset ingest_manifest_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("manifest json: ") + e.what());
    }
    const nlohmann::json& arr = doc.is_array() ? doc : doc.at("points");
    RQDataset ds;
    std::map<std::string, size_t> seen;
    RowIssueList issues;
    size_t idx = 0;
    for (const auto& e : arr) {
        ++idx;
        RQPoint p;
        try {
            p.video_id = e.at("video_id").get<std::string>();
            p.width = e.at("width").get<int>();
            p.height = e.at("height").get<int>();
            p.crf = e.at("crf").get<int>();
            p.bitrate_kbps = e.at("bitrate_kbps").get<double>();
            p.quality = e.at("vmaf").get<double>();
        } catch (const nlohmann::json::exception& ex) {
            issues.add(idx, std::string("bad element: ") + ex.what());
            continue;
        }
        validate_and_insert(ds, seen, issues, idx, p);
    }
    issues.raise_if_any();
    if (ds.points.empty()) throw ValidationError("manifest: no valid rows");
    return ds;
}

RQDataset ingest_manifest_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
        std::stringstream ss;
        ss << in.rdbuf();
        return ingest_manifest_json(ss.str());
    }
    return ingest_manifest_csv(in);
}

void emit_manifest_csv(const RQDataset& dataset, std::ostream& out) {
    out << "video_id,width,height,crf,bitrate_kbps,vmaf\n";
    char buf[256];
    for (const RQPoint& p : dataset.points) {
        std::snprintf(buf, sizeof(buf), "%s,%d,%d,%d,%.17g,%.17g\n", p.video_id.c_str(), p.width,
                      p.height, p.crf, p.bitrate_kbps, p.quality);
        out << buf;
    }
}

std::string feature_file_to_json(const FeatureVector& features, const std::string& video_id,
                                 uint64_t config_hash) {
    char hash_hex[32];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(config_hash));
    nlohmann::json arr = nlohmann::json::array();
    for (size_t i = 0; i < features.size(); ++i)
        arr.push_back({{"name", features.names[i]}, {"value", features.values[i]}});
    const nlohmann::json doc = {{"video_id", video_id},
                                {"feature_set", features.set_id},
                                {"config_hash", hash_hex},
                                {"features", arr}};
    return doc.dump(2) + "\n";
}

FeatureVector feature_file_from_json(const std::string& text, std::string* video_id,
                                     uint64_t* config_hash) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("feature file: ") + e.what());
    }
    FeatureVector fv;
    try {
        fv.set_id = doc.at("feature_set").get<std::string>();
        for (const auto& e : doc.at("features"))
            fv.push(e.at("name").get<std::string>(), e.at("value").get<double>());
        if (video_id) *video_id = doc.at("video_id").get<std::string>();
        if (config_hash)
            *config_hash = std::stoull(doc.at("config_hash").get<std::string>(), nullptr, 16);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("feature file: ") + e.what());
    }
    return fv;
}

TrainingMatrix assemble_training(const RQDataset& dataset,
                                 const std::map<std::string, FeatureVector>& features,
                                 PredictionTask task) {
    if (dataset.points.empty()) throw ValidationError("assemble_training: empty dataset");

    const std::vector<std::string>* content_names = nullptr;
    for (const std::string& id : dataset.video_ids()) {
        auto it = features.find(id);
        if (it == features.end())
            throw ValidationError("assemble_training: missing features for video '" + id + "'");
        if (!content_names) {
            content_names = &it->second.names;
        } else if (*content_names != it->second.names) {
            throw ValidationError("assemble_training: inconsistent feature names across videos");
        }
    }

    TrainingMatrix m;
    m.feature_names = *content_names;
    if (task == PredictionTask::Quality) {
        m.feature_names.insert(m.feature_names.end(),
                               {kMetaLog2Bitrate, kMetaWidthNorm, kMetaHeightNorm});
        m.target_name = kMetaQualityNorm;
    } else {
        m.feature_names.insert(m.feature_names.end(),
                               {kMetaQualityNorm, kMetaWidthNorm, kMetaHeightNorm});
        m.target_name = kMetaLog2Bitrate;
    }

    for (const RQPoint& p : dataset.points) {
        const FeatureVector& fv = features.at(p.video_id);
        std::vector<double> row = fv.values;
        if (task == PredictionTask::Quality) {
            row.push_back(p.log2_bitrate());
            row.push_back(p.width / kDimensionNorm);
            row.push_back(p.height / kDimensionNorm);
            m.targets.push_back(p.quality / 100.0);
        } else {
            row.push_back(p.quality / 100.0);
            row.push_back(p.width / kDimensionNorm);
            row.push_back(p.height / kDimensionNorm);
            m.targets.push_back(p.log2_bitrate());
        }
        m.rows.push_back(std::move(row));
        m.groups.push_back(p.video_id);
    }
    return m;
}

namespace {

struct SplitRng {
    std::mt19937_64 engine;
    explicit SplitRng(uint64_t seed) : engine(seed) {}
    size_t below(size_t n) { return static_cast<size_t>(engine() % n); }
    double uniform01() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }
};

} // namespace

SplitSpec split_grouped(std::span<const std::string> video_ids, std::array<int, 3> counts,
                        uint64_t seed) {
    std::vector<std::string> ids(video_ids.begin(), video_ids.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    const long long want =
        static_cast<long long>(counts[0]) + counts[1] + counts[2];
    for (int c : counts)
        if (c < 0) throw ValidationError("split_grouped: negative count");
    if (want > static_cast<long long>(ids.size()))
        throw ValidationError("split_grouped: counts exceed available videos (" +
                              std::to_string(ids.size()) + ")");

    SplitRng rng(seed ^ 0x73706c6974ULL);
    for (size_t i = ids.size(); i-- > 1;) std::swap(ids[i], ids[rng.below(i + 1)]);

    SplitSpec spec;
    spec.seed = seed;
    auto it = ids.begin();
    spec.train.assign(it, it + counts[0]);
    it += counts[0];
    spec.validation.assign(it, it + counts[1]);
    it += counts[1];
    spec.test.assign(it, it + counts[2]);
    std::sort(spec.train.begin(), spec.train.end());
    std::sort(spec.validation.begin(), spec.validation.end());
    std::sort(spec.test.begin(), spec.test.end());
    return spec;
}

SplitSpec split_grouped_ratio(std::span<const std::string> video_ids,
                              std::array<double, 3> ratios, uint64_t seed) {
    double total = ratios[0] + ratios[1] + ratios[2];
    if (!(total > 0.0)) throw ValidationError("split_grouped_ratio: ratios must be positive");
    std::vector<std::string> ids(video_ids.begin(), video_ids.end());
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    const int n = static_cast<int>(ids.size());

    std::array<int, 3> counts;
    counts[1] = static_cast<int>(std::floor(n * ratios[1] / total));
    counts[2] = static_cast<int>(std::floor(n * ratios[2] / total));
    counts[0] = n - counts[1] - counts[2]; // remainder favors training
    return split_grouped(ids, counts, seed);
}

SynthConfig default_synth_config() {
    SynthConfig c;
    const GridConfig g = default_grid_config();
    c.resolutions = g.resolutions;
    c.crfs = g.crfs;
    return c;
}

double SynthVideo::true_quality(Resolution res, double log2_bitrate) const {
    const double a = slope.at(res);
    const double x0 = midpoint.at(res);
    return ceiling.at(res) / (1.0 + std::exp(-a * (log2_bitrate - x0)));
}

double SynthVideo::true_log2_bitrate(Resolution res, double quality) const {
    const double c = ceiling.at(res);
    if (!(quality > 0.0) || !(quality < c))
        throw ValidationError("true_log2_bitrate: quality outside (0, ceiling)");
    const double a = slope.at(res);
    const double x0 = midpoint.at(res);
    return x0 - std::log(c / quality - 1.0) / a;
}

double SynthVideo::analytic_crossing(Resolution lower, Resolution higher) const {
    (void)higher;
    auto it = crossing_above.find(lower);
    if (it == crossing_above.end())
        throw ValidationError("analytic_crossing: not an adjacent pair of this family");
    return it->second;
}

namespace {

void validate_synth_config(const SynthConfig& config) {
    if (config.resolutions.empty() || config.crfs.empty())
        throw ValidationError("synth_dataset: empty grid");
    if (config.crossing_centers.size() + 1 < config.resolutions.size() ||
        config.crossing_jitters.size() + 1 < config.resolutions.size())
        throw ValidationError("synth_dataset: need one crossing target per adjacent pair");
}

// rng == nullptr derives the jitter-free family center
SynthVideo derive_synth_video(const SynthConfig& config, SplitRng* rng,
                              const std::string& video_id) {
    std::vector<Resolution> res = config.resolutions;
    std::sort(res.begin(), res.end()); // ascending pixels
    const size_t n = res.size();
    const double pix_max = static_cast<double>(res.back().pixels());
    auto jitter = [&](double amount) { return rng ? rng->uniform(-amount, amount) : 0.0; };

    SynthVideo video;
    video.video_id = video_id;

    const double rate_jitter = jitter(config.bitrate_jitter_octaves);
    std::vector<double> slopes, midpoints, ceilings;
    for (size_t i = 0; i < n; ++i) {
        const double pix_ratio = static_cast<double>(res[i].pixels()) / pix_max;
        video.ref_kbps[res[i]] = config.bitrate_base_kbps *
                                 std::pow(pix_ratio, config.bitrate_pixel_exponent) *
                                 std::exp2(rate_jitter);
        slopes.push_back(config.slope_base + static_cast<double>(i) * config.slope_step +
                         jitter(config.slope_jitter));
        ceilings.push_back(config.q_ceiling_top -
                           config.q_ceiling_step * static_cast<double>(n - 1 - i));
        if (ceilings.back() <= 0.0)
            throw ValidationError("synth: ceiling_step drops a ceiling below zero");
    }
    midpoints.push_back(std::log2(video.ref_kbps[res[0]]) - config.midpoint_offset +
                        jitter(config.midpoint_jitter));

    // single signed displacement of the whole switching structure
    double shift = 0.0;
    if (rng) {
        const double sign = rng->uniform01() < 0.5 ? -1.0 : 1.0;
        shift = sign * rng->uniform(config.video_shift_min, config.video_shift_max);
    }
    for (size_t i = 1; i < n; ++i) {
        const double x_star = config.crossing_centers[i - 1] + shift +
                              jitter(config.crossing_jitters[i - 1]);
        // chain x0 so this pair's curves intersect exactly at x_star
        const double q_star =
            ceilings[i - 1] / (1.0 + std::exp(-slopes[i - 1] * (x_star - midpoints[i - 1])));
        const double sigma = q_star / ceilings[i];
        midpoints.push_back(x_star - std::log(sigma / (1.0 - sigma)) / slopes[i]);
        video.crossing_above[res[i - 1]] = x_star;
    }
    for (size_t i = 0; i < n; ++i) {
        video.slope[res[i]] = slopes[i];
        video.midpoint[res[i]] = midpoints[i];
        video.ceiling[res[i]] = ceilings[i];
    }
    return video;
}

} // namespace

SynthVideo synth_center_video(const SynthConfig& config) {
    validate_synth_config(config);
    return derive_synth_video(config, nullptr, "family-center");
}

SynthResult synth_dataset(uint64_t seed, int n_videos, const SynthConfig& config) {
    if (n_videos < 1) throw ValidationError("synth_dataset: need at least one video");
    validate_synth_config(config);

    std::vector<Resolution> res = config.resolutions;
    std::sort(res.begin(), res.end()); // ascending pixels

    SynthResult out;
    SplitRng rng(seed ^ 0x73796e7468ULL);
    char buf[64];
    for (int v = 0; v < n_videos; ++v) {
        std::snprintf(buf, sizeof(buf), "synth%03d", v);
        SynthVideo video = derive_synth_video(config, &rng, buf);

        for (size_t i = 0; i < res.size(); ++i) {
            for (int crf : config.crfs) {
                const double x = std::log2(video.ref_kbps[res[i]]) -
                                 (static_cast<double>(crf) - config.crf_pivot) /
                                     config.crf_octave;
                RQPoint p;
                p.video_id = video.video_id;
                p.width = res[i].width;
                p.height = res[i].height;
                p.crf = crf;
                p.bitrate_kbps = std::exp2(x);
                p.quality = video.true_quality(res[i], x);
                out.dataset.points.push_back(std::move(p));
            }
        }

        // noisy copies of the generating parameters stand in for content
        // features at desk scale
        const double rate_jitter =
            std::log2(video.ref_kbps[res.back()] / config.bitrate_base_kbps);
        FeatureVector fv;
        fv.set_id = "synth";
        for (size_t i = 0; i < res.size(); ++i) {
            fv.push("synth_slope_" + res[i].label(),
                    video.slope[res[i]] *
                        (1.0 + rng.uniform(-config.feature_noise, config.feature_noise)));
            fv.push("synth_midpoint_" + res[i].label(),
                    video.midpoint[res[i]] *
                        (1.0 + rng.uniform(-config.feature_noise, config.feature_noise)));
        }
        fv.push("synth_rate_offset",
                rate_jitter + rng.uniform(-config.feature_noise, config.feature_noise));
        out.features[video.video_id] = std::move(fv);
        out.videos.push_back(std::move(video));
    }
    return out;
}

} // namespace shotladder
