#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shotladder/features.hpp"
#include "shotladder/rq.hpp"
#include "shotladder/trees.hpp"

namespace shotladder {

enum class LadderKind { Bitrate, Quality };

const char* ladder_kind_name(LadderKind kind);
LadderKind ladder_kind_from_name(const std::string& name);

struct LadderStep {
    double level = 0.0; // kbps for bitrate ladders, VMAF score for quality ladders
    Resolution resolution;
};

struct Ladder {
    LadderKind kind = LadderKind::Bitrate;
    std::vector<LadderStep> steps; // levels strictly increasing
};

struct LadderConfig {
    std::vector<Resolution> resolutions;
    std::vector<double> bitrate_steps;
    std::vector<double> quality_steps;
};

LadderConfig default_ladder_config();

// Quality prediction hook: (resolution, log2 bitrate) -> quality/100.
// Non-finite results exclude the resolution at that step.
using QualityPredictor = std::function<double(Resolution, double)>;
// Bitrate prediction hook: (resolution, quality/100) -> log2 bitrate.
using BitratePredictor = std::function<double(Resolution, double)>;

// One step per configured bitrate: predict quality at every resolution and
// keep the argmax, ties to fewer pixels. Quality predictions are clamped
// to [0,1] before comparison. Returns the uncorrected ladder.
Ladder build_bitrate_ladder(const QualityPredictor& predict_quality, const LadderConfig& config);
Ladder build_bitrate_ladder(const TreesModel& quality_model, const FeatureVector& content,
                            const LadderConfig& config);

// Dual construction: predict log2 bitrate at every resolution per quality
// step and keep the argmin, ties to fewer pixels.
Ladder build_quality_ladder(const BitratePredictor& predict_bitrate, const LadderConfig& config);
Ladder build_quality_ladder(const TreesModel& bitrate_model, const FeatureVector& content,
                            const LadderConfig& config);

// Step-function predictors backed by one video's measured points: the
// best quality reachable at bitrate <= b, and the least bitrate reaching
// quality >= q. Resolutions without a qualifying sample predict NaN.
// Built from the same points as a Pareto front, these reproduce the
// reference ladder exactly.
QualityPredictor empirical_quality_predictor(std::span<const RQPoint> points);
BitratePredictor empirical_bitrate_predictor(std::span<const RQPoint> points);

// Cross-over threshold between one adjacent resolution pair, ordered
// high -> low resolution. A missing level collapses the transition into
// `higher`.
struct CrossoverThreshold {
    Resolution higher;
    Resolution lower;
    std::optional<double> level; // kbps or VMAF depending on ladder kind
};

// Assign each step the highest resolution whose threshold is <= the step
// level; the lowest resolution is always eligible. Out-of-order thresholds
// are reported through `warnings` and resolved by a cumulative max.
Ladder ladder_from_crossovers(std::span<const CrossoverThreshold> crossovers,
                              const LadderConfig& config, LadderKind kind,
                              std::vector<std::string>* warnings = nullptr);

// Walk a bitrate ladder from the highest bitrate down, capping each
// resolution at the previous step's (pixel count). Idempotent.
Ladder correct_top_to_bottom(const Ladder& ladder);

// Walk a quality ladder from the lowest quality up, flooring each
// resolution at the previous step's. Idempotent.
Ladder correct_bottom_to_top(const Ladder& ladder);

// Sample a Pareto front at the configured steps: bitrate ladders take the
// highest-quality front point with bitrate <= step, quality ladders the
// lowest-bitrate front point with quality >= step. Steps outside the
// front's span are dropped.
Ladder reference_ladder(const ParetoFront& front, const LadderConfig& config, LadderKind kind);

// Materialize a ladder into RQ points for BD evaluation: step i at
// resolution R contributes the video's points at R with level in
// [l_i, l_{i+1}) (last step unbounded above). Sorted by bitrate.
std::vector<RQPoint> ladder_to_hull(const Ladder& ladder, std::span<const RQPoint> video_points);

// Throws unless every step resolution belongs to the configured set.
void validate_ladder_resolutions(const Ladder& ladder, const LadderConfig& config);

// JSON (de)serialization per the ladder file schema:
// {"kind": ..., "steps": [{"level","width","height"}...]}.
std::string ladder_to_json(const Ladder& ladder);
Ladder ladder_from_json(const std::string& text);
void save_ladder_file(const Ladder& ladder, const std::string& path);
Ladder load_ladder_file(const std::string& path);

} // namespace shotladder
