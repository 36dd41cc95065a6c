#include "shotladder/ladders.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "shotladder/error.hpp"

namespace shotladder {

const char* ladder_kind_name(LadderKind kind) {
    return kind == LadderKind::Bitrate ? "bitrate-ladder" : "quality-ladder";
}

LadderKind ladder_kind_from_name(const std::string& name) {
    if (name == "bitrate-ladder" || name == "bitrate") return LadderKind::Bitrate;
    if (name == "quality-ladder" || name == "quality") return LadderKind::Quality;
    throw ValidationError("unknown ladder kind '" + name + "'");
}

LadderConfig default_ladder_config() {
    LadderConfig c;
    c.resolutions = {{3840, 2160}, {2560, 1440}, {1920, 1080},
                     {1280, 720},  {960, 540},   {768, 432}};
    c.bitrate_steps = {500,  1000, 2000, 3000, 4000,  5000,  6000,
                       7000, 8000, 9000, 10500, 12000, 15000};
    c.quality_steps = {25, 35, 45, 50, 55, 60, 65, 70, 75, 80, 85, 90, 92.5};
    return c;
}

namespace {

std::vector<double> validated_steps(const LadderConfig& config, LadderKind kind) {
    const std::vector<double>& steps =
        kind == LadderKind::Bitrate ? config.bitrate_steps : config.quality_steps;
    if (steps.empty()) throw ValidationError("ladder config: empty step list");
    for (size_t i = 1; i < steps.size(); ++i)
        if (!(steps[i] > steps[i - 1]))
            throw ValidationError("ladder config: steps must be strictly increasing");
    if (config.resolutions.empty()) throw ValidationError("ladder config: no resolutions");
    return steps;
}

// Resolutions ordered by ascending pixel count so that iterating with a
// strict comparison lands ties on fewer pixels.
std::vector<Resolution> ascending_resolutions(const LadderConfig& config) {
    std::vector<Resolution> res = config.resolutions;
    std::sort(res.begin(), res.end());
    return res;
}

} // namespace

Ladder build_bitrate_ladder(const QualityPredictor& predict_quality, const LadderConfig& config) {
    const std::vector<double> steps = validated_steps(config, LadderKind::Bitrate);
    const std::vector<Resolution> res = ascending_resolutions(config);

    Ladder ladder;
    ladder.kind = LadderKind::Bitrate;
    for (double b : steps) {
        const double x = std::log2(b);
        Resolution best = res.front();
        double best_q = -std::numeric_limits<double>::infinity();
        for (const Resolution& r : res) {
            double q = predict_quality(r, x);
            if (!std::isfinite(q)) continue;
            q = std::clamp(q, 0.0, 1.0);
            if (q > best_q) {
                best_q = q;
                best = r;
            }
        }
        ladder.steps.push_back({b, best});
    }
    return ladder;
}

Ladder build_quality_ladder(const BitratePredictor& predict_bitrate, const LadderConfig& config) {
    const std::vector<double> steps = validated_steps(config, LadderKind::Quality);
    const std::vector<Resolution> res = ascending_resolutions(config);

    Ladder ladder;
    ladder.kind = LadderKind::Quality;
    for (double qs : steps) {
        const double qn = qs / 100.0;
        Resolution best = res.front();
        double best_x = std::numeric_limits<double>::infinity();
        for (const Resolution& r : res) {
            const double x = predict_bitrate(r, qn);
            if (!std::isfinite(x)) continue;
            if (x < best_x) {
                best_x = x;
                best = r;
            }
        }
        ladder.steps.push_back({qs, best});
    }
    return ladder;
}

namespace {

std::vector<double> model_row(const TreesModel& model, const FeatureVector& content,
                              const char* meta0) {
    const size_t n = content.size();
    if (model.feature_names.size() != n + 3)
        throw ValidationError("model feature names do not match content features + metadata");
    for (size_t i = 0; i < n; ++i)
        if (model.feature_names[i] != content.names[i])
            throw ValidationError("model feature name mismatch at '" + content.names[i] + "'");
    if (model.feature_names[n] != meta0 || model.feature_names[n + 1] != kMetaWidthNorm ||
        model.feature_names[n + 2] != kMetaHeightNorm)
        throw ValidationError("model metadata feature names mismatch");
    std::vector<double> row(content.values);
    row.resize(n + 3);
    return row;
}

} // namespace

Ladder build_bitrate_ladder(const TreesModel& quality_model, const FeatureVector& content,
                            const LadderConfig& config) {
    std::vector<double> row = model_row(quality_model, content, kMetaLog2Bitrate);
    const size_t n = content.size();
    QualityPredictor pred = [&quality_model, row, n](Resolution r, double x) mutable {
        row[n] = x;
        row[n + 1] = r.width / kDimensionNorm;
        row[n + 2] = r.height / kDimensionNorm;
        return predict(quality_model, row);
    };
    return build_bitrate_ladder(pred, config);
}

Ladder build_quality_ladder(const TreesModel& bitrate_model, const FeatureVector& content,
                            const LadderConfig& config) {
    std::vector<double> row = model_row(bitrate_model, content, kMetaQualityNorm);
    const size_t n = content.size();
    BitratePredictor pred = [&bitrate_model, row, n](Resolution r, double qn) mutable {
        row[n] = qn;
        row[n + 1] = r.width / kDimensionNorm;
        row[n + 2] = r.height / kDimensionNorm;
        return predict(bitrate_model, row);
    };
    return build_quality_ladder(pred, config);
}

namespace {

// per-resolution (key, value) samples sorted by key
std::map<Resolution, std::vector<std::pair<double, double>>> bucket_by_resolution(
    std::span<const RQPoint> points, bool key_is_bitrate) {
    std::map<Resolution, std::vector<std::pair<double, double>>> out;
    for (const RQPoint& p : points) {
        if (key_is_bitrate)
            out[p.resolution()].emplace_back(p.log2_bitrate(), p.quality / 100.0);
        else
            out[p.resolution()].emplace_back(p.quality / 100.0, p.log2_bitrate());
    }
    for (auto& [res, v] : out) std::sort(v.begin(), v.end());
    return out;
}

} // namespace

QualityPredictor empirical_quality_predictor(std::span<const RQPoint> points) {
    auto buckets = bucket_by_resolution(points, true);
    return [buckets = std::move(buckets)](Resolution res, double log2_bitrate) {
        auto it = buckets.find(res);
        if (it == buckets.end()) return std::numeric_limits<double>::quiet_NaN();
        double best = std::numeric_limits<double>::quiet_NaN();
        for (const auto& [x, qn] : it->second) {
            if (x > log2_bitrate) break;
            if (std::isnan(best) || qn > best) best = qn;
        }
        return best;
    };
}

BitratePredictor empirical_bitrate_predictor(std::span<const RQPoint> points) {
    auto buckets = bucket_by_resolution(points, false);
    return [buckets = std::move(buckets)](Resolution res, double quality_norm) {
        auto it = buckets.find(res);
        if (it == buckets.end()) return std::numeric_limits<double>::quiet_NaN();
        double best = std::numeric_limits<double>::quiet_NaN();
        for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit) {
            if (rit->first < quality_norm) break;
            if (std::isnan(best) || rit->second < best) best = rit->second;
        }
        return best;
    };
}

Ladder ladder_from_crossovers(std::span<const CrossoverThreshold> crossovers,
                              const LadderConfig& config, LadderKind kind,
                              std::vector<std::string>* warnings) {
    const std::vector<double> steps = validated_steps(config, kind);
    std::vector<Resolution> res = config.resolutions; // descending pixels
    std::sort(res.begin(), res.end(), [](const Resolution& a, const Resolution& b) { return b < a; });

    if (res.size() > 1 && crossovers.size() != res.size() - 1)
        throw ValidationError("ladder_from_crossovers: need one cross-over per adjacent pair");
    for (size_t i = 0; i + 1 < res.size(); ++i)
        if (!(crossovers[i].higher == res[i]) || !(crossovers[i].lower == res[i + 1]))
            throw ValidationError("ladder_from_crossovers: pair order must follow the "
                                  "configured resolutions, high to low");

    // threshold[i]: level above which res[i] is eligible; missing
    // cross-overs collapse the transition into that resolution.
    const double neg_inf = -std::numeric_limits<double>::infinity();
    struct Eligible {
        Resolution res;
        double threshold;
    };
    std::vector<Eligible> eligible;
    for (size_t i = 0; i < res.size(); ++i) {
        if (i + 1 == res.size()) {
            eligible.push_back({res[i], neg_inf}); // lowest rung always reachable
        } else if (crossovers[i].level) {
            eligible.push_back({res[i], *crossovers[i].level});
        }
    }

    // Enforce monotone thresholds (higher resolution switches in later).
    bool adjusted = false;
    for (size_t i = eligible.size(); i-- > 1;) {
        if (eligible[i - 1].threshold < eligible[i].threshold) {
            eligible[i - 1].threshold = eligible[i].threshold;
            adjusted = true;
        }
    }
    if (adjusted && warnings)
        warnings->push_back("cross-over thresholds out of order; "
                            "enforced monotone via cumulative max");

    Ladder ladder;
    ladder.kind = kind;
    for (double level : steps) {
        Resolution pick = eligible.back().res;
        for (const Eligible& e : eligible) {
            if (e.threshold <= level) {
                pick = e.res; // highest eligible resolution
                break;
            }
        }
        ladder.steps.push_back({level, pick});
    }
    return ladder;
}

Ladder correct_top_to_bottom(const Ladder& ladder) {
    if (ladder.kind != LadderKind::Bitrate)
        throw ValidationError("correct_top_to_bottom applies to bitrate ladders");
    Ladder out = ladder;
    for (size_t i = out.steps.size(); i-- > 1;) {
        // walking down in bitrate: never exceed the resolution above
        if (out.steps[i - 1].resolution.pixels() > out.steps[i].resolution.pixels())
            out.steps[i - 1].resolution = out.steps[i].resolution;
    }
    return out;
}

Ladder correct_bottom_to_top(const Ladder& ladder) {
    if (ladder.kind != LadderKind::Quality)
        throw ValidationError("correct_bottom_to_top applies to quality ladders");
    Ladder out = ladder;
    for (size_t i = 1; i < out.steps.size(); ++i) {
        // walking up in quality: never drop below the resolution beneath
        if (out.steps[i].resolution.pixels() < out.steps[i - 1].resolution.pixels())
            out.steps[i].resolution = out.steps[i - 1].resolution;
    }
    return out;
}

Ladder reference_ladder(const ParetoFront& front, const LadderConfig& config, LadderKind kind) {
    if (front.points.empty()) throw ValidationError("reference_ladder: empty front");
    const std::vector<double> steps = validated_steps(config, kind);

    Ladder ladder;
    ladder.kind = kind;
    for (double level : steps) {
        const RQPoint* pick = nullptr;
        if (kind == LadderKind::Bitrate) {
            // highest-quality front point with bitrate <= level; the front
            // rises in quality so the last such point governs
            for (const RQPoint& p : front.points)
                if (p.bitrate_kbps <= level) pick = &p;
        } else {
            // lowest-bitrate front point with quality >= level
            for (const RQPoint& p : front.points)
                if (p.quality >= level) {
                    pick = &p;
                    break;
                }
        }
        if (pick) ladder.steps.push_back({level, pick->resolution()});
    }
    if (ladder.steps.empty())
        throw ValidationError("reference_ladder: no step overlaps the front span");
    return ladder;
}

std::vector<RQPoint> ladder_to_hull(const Ladder& ladder, std::span<const RQPoint> video_points) {
    if (ladder.steps.empty()) throw ValidationError("ladder_to_hull: empty ladder");
    for (const LadderStep& s : ladder.steps) {
        bool present = false;
        for (const RQPoint& p : video_points)
            if (p.resolution() == s.resolution) {
                present = true;
                break;
            }
        if (!present)
            throw ValidationError("ladder_to_hull: dataset has no points at " +
                                  s.resolution.label());
    }

    std::vector<RQPoint> hull;
    const double inf = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < ladder.steps.size(); ++i) {
        const double lo = ladder.steps[i].level;
        const double hi = i + 1 < ladder.steps.size() ? ladder.steps[i + 1].level : inf;
        for (const RQPoint& p : video_points) {
            if (!(p.resolution() == ladder.steps[i].resolution)) continue;
            const double v = ladder.kind == LadderKind::Bitrate ? p.bitrate_kbps : p.quality;
            if (v >= lo && v < hi) hull.push_back(p);
        }
    }
    std::sort(hull.begin(), hull.end(), [](const RQPoint& a, const RQPoint& b) {
        if (a.bitrate_kbps != b.bitrate_kbps) return a.bitrate_kbps < b.bitrate_kbps;
        return a.quality < b.quality;
    });
    return hull;
}

void validate_ladder_resolutions(const Ladder& ladder, const LadderConfig& config) {
    for (const LadderStep& s : ladder.steps) {
        if (std::find(config.resolutions.begin(), config.resolutions.end(), s.resolution) ==
            config.resolutions.end())
            throw ValidationError("ladder resolution " + s.resolution.label() +
                                  " is not in the configured resolution set");
    }
}

std::string ladder_to_json(const Ladder& ladder) {
    nlohmann::json steps = nlohmann::json::array();
    for (const LadderStep& s : ladder.steps)
        steps.push_back({{"level", s.level},
                         {"width", s.resolution.width},
                         {"height", s.resolution.height}});
    const nlohmann::json doc = {{"kind", ladder_kind_name(ladder.kind)}, {"steps", steps}};
    return doc.dump(2) + "\n";
}

Ladder ladder_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("ladder json: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("kind") || !doc.contains("steps"))
        throw FormatError("ladder json: expected {kind, steps}");
    Ladder ladder;
    ladder.kind = ladder_kind_from_name(doc["kind"].get<std::string>());
    for (const auto& s : doc["steps"]) {
        LadderStep step;
        step.level = s.at("level").get<double>();
        step.resolution.width = s.at("width").get<int>();
        step.resolution.height = s.at("height").get<int>();
        ladder.steps.push_back(step);
    }
    for (size_t i = 1; i < ladder.steps.size(); ++i)
        if (!(ladder.steps[i].level > ladder.steps[i - 1].level))
            throw ValidationError("ladder json: levels must be strictly increasing");
    return ladder;
}

void save_ladder_file(const Ladder& ladder, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    out << ladder_to_json(ladder);
}

Ladder load_ladder_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ladder_from_json(ss.str());
}

} // namespace shotladder
