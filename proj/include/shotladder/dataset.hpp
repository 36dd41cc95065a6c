#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "shotladder/features.hpp"
#include "shotladder/rq.hpp"
#include "shotladder/trees.hpp"

namespace shotladder {

// Encode/quality-measurement grid. CRFs default to 16..35 plus 37/39/41,
// resolutions to the six-rung ladder from 2160p down to 432p.
struct GridConfig {
    std::vector<Resolution> resolutions;
    std::vector<int> crfs;
    double quality_min = 15.0;
    double quality_max = 95.0;
    std::string encoder_tag = "libx265-medium";
};

GridConfig default_grid_config();

struct EncodeJob {
    std::string video_id;
    std::string source_path;
    Resolution resolution;
    int crf = 0;
    std::string encoder_tag;
    std::string output_path;
    std::string command;         // external encoder invocation, shell-agnostic
    std::string quality_command; // external quality-tool invocation
};

struct EncodePlan {
    std::vector<EncodeJob> jobs;
};

// Full cartesian product videos x resolutions x CRFs. `videos` carries
// (id, source path) pairs.
EncodePlan plan_encodes(std::span<const std::pair<std::string, std::string>> videos,
                        const GridConfig& grid, const std::string& output_dir);

std::string encode_plan_to_json(const EncodePlan& plan);

// Manifest rows: video_id,width,height,crf,bitrate_kbps,vmaf. Rows
// violating invariants are rejected with their line numbers; duplicate
// (video,resolution,crf) keys name both offending lines.
RQDataset ingest_manifest_csv(std::istream& in);
RQDataset ingest_manifest_json(const std::string& text);
RQDataset ingest_manifest_file(const std::string& path);
void emit_manifest_csv(const RQDataset& dataset, std::ostream& out);

// Feature store file: one JSON document per (video, feature set).
std::string feature_file_to_json(const FeatureVector& features, const std::string& video_id,
                                 uint64_t config_hash);
FeatureVector feature_file_from_json(const std::string& text, std::string* video_id = nullptr,
                                     uint64_t* config_hash = nullptr);

enum class PredictionTask { Quality, Bitrate };

// Build the training matrix for one task from constraint-filtered points
// and per-video content features. Quality rows append
// [log2(b), w/3840, h/3840] and regress q/100; bitrate rows append
// [q/100, w/3840, h/3840] and regress log2(b). Groups carry video ids.
TrainingMatrix assemble_training(const RQDataset& dataset,
                                 const std::map<std::string, FeatureVector>& features,
                                 PredictionTask task);

struct SplitSpec {
    std::vector<std::string> train;
    std::vector<std::string> validation;
    std::vector<std::string> test;
    uint64_t seed = 0;
};

// Disjoint video-level split, seed-deterministic. Throws when the counts
// exceed the available videos.
SplitSpec split_grouped(std::span<const std::string> video_ids, std::array<int, 3> counts,
                        uint64_t seed);
SplitSpec split_grouped_ratio(std::span<const std::string> video_ids,
                              std::array<double, 3> ratios, uint64_t seed);

// Synthetic rate-quality family for desk-scale verification. Each video
// and resolution carries a scaled logistic quality curve
//   q(x) = C_r / (1 + exp(-a_r (x - x0_r))),   x = log2 bitrate kbps,
// with slopes and ceilings increasing in resolution. Midpoints are chained
// so each adjacent pair crosses exactly once at a chosen position; a
// per-video displacement of all crossings keeps the family-center fixed
// ladder meaningfully suboptimal on every video. Sampling follows a
// CRF-like grid b = b_ref * 2^(-(crf - pivot)/octave).
struct SynthConfig {
    std::vector<Resolution> resolutions; // high -> low
    std::vector<int> crfs;
    double q_ceiling_top = 95.0;  // ceiling of the largest resolution
    double q_ceiling_step = 5.0;  // ceiling drop per rung down
    double crf_pivot = 28.0;
    double crf_octave = 6.0;
    double bitrate_base_kbps = 8000.0;   // b_ref at the largest resolution
    double bitrate_pixel_exponent = 0.85;
    double bitrate_jitter_octaves = 0.3; // per-video b_ref scale jitter
    double slope_base = 0.7;             // logistic slope at the smallest resolution
    double slope_step = 0.14;
    double slope_jitter = 0.03;
    double midpoint_offset = 1.2;        // x0 of the smallest resolution, below log2(b_ref)
    double midpoint_jitter = 0.2;
    // crossing positions (log2 kbps) per adjacent pair, low -> high
    std::vector<double> crossing_centers{9.2, 9.9, 10.7, 11.5, 12.3};
    std::vector<double> crossing_jitters{0.15, 0.15, 0.15, 0.15, 0.15};
    double video_shift_min = 0.4;  // magnitude range of the per-video crossing shift
    double video_shift_max = 0.65;
    // the content-independent ladder switches this many octaves past the
    // family-center crossings
    double fixed_ladder_bias_octaves = 0.8;
    double feature_noise = 0.005; // relative noise on emitted content features
};

SynthConfig default_synth_config();

// Ground truth for one synthetic video: per-resolution curve parameters,
// the rate mapping used when sampling, and the pinned crossings.
struct SynthVideo {
    std::string video_id;
    std::map<Resolution, double> slope;     // a
    std::map<Resolution, double> midpoint;  // x0
    std::map<Resolution, double> ceiling;   // C
    std::map<Resolution, double> ref_kbps;  // b_ref
    std::map<Resolution, double> crossing_above; // keyed by the lower rung of each pair

    double true_quality(Resolution res, double log2_bitrate) const;
    double true_log2_bitrate(Resolution res, double quality) const;
    // pinned intersection of an adjacent pair's curves
    double analytic_crossing(Resolution lower, Resolution higher) const;
};

struct SynthResult {
    RQDataset dataset;
    std::vector<SynthVideo> videos;
    std::map<std::string, FeatureVector> features; // noisy per-video content features
};

SynthResult synth_dataset(uint64_t seed, int n_videos, const SynthConfig& config);

// The jitter-free family center; its analytic crossings define the
// content-independent fixed ladder for synthetic runs.
SynthVideo synth_center_video(const SynthConfig& config);

uint64_t fnv1a64(std::span<const uint8_t> bytes);
uint64_t fnv1a64(const std::string& text);

} // namespace shotladder
