#pragma once

#include <string>
#include <vector>

#include "shotladder/bd.hpp"
#include "shotladder/config.hpp"
#include "shotladder/dataset.hpp"
#include "shotladder/ladders.hpp"
#include "shotladder/report.hpp"

namespace shotladder {

// Content-independent ladder for the synthetic family: thresholds come
// from the analytic crossings of the family-center curves (no jitter),
// so it plays the role of the one-size-fits-all ladder.
Ladder synth_fixed_ladder(const SynthConfig& config, const LadderConfig& ladder_config,
                          LadderKind kind);

// Gates checked by the desk-scale synthetic run.
struct SynthGates {
    bool oracle_ladders_match = false;    // dataset-backed predictors == reference ladders
    double mean_bd_rate_vs_reference = 0; // trained bitrate ladders vs reference hulls
    double f25 = 0;                       // closeness of trained ladders through the fixed ladder
    double monotone_fraction = 0;         // prediction series passing the eps=0.5 check

    bool pass() const {
        return oracle_ladders_match && mean_bd_rate_vs_reference <= 3.0 && f25 >= 0.8 &&
               monotone_fraction >= 0.95;
    }
};

struct SynthRunResult {
    struct VideoRow {
        std::string video_id;
        BdPair bitrate_vs_fixed;   // trained bitrate ladder vs fixed ladder
        BdPair bitrate_vs_ref;     // trained bitrate ladder vs reference ladder
        BdPair quality_vs_fixed;   // trained quality ladder vs fixed ladder
        BdPair reference_vs_fixed; // reference ladder vs fixed ladder
    };

    SynthGates gates;
    std::vector<VideoRow> rows; // validation + test videos
    ClosenessResult closeness_bitrate;
    TrainingReport quality_model_report;
    TrainingReport bitrate_model_report;
    int oracle_mismatches = 0;
    int mono_series_total = 0;
    int mono_series_passed = 0;

    std::string rows_to_csv() const;
};

// Full desk-scale pipeline on synthetic data: generate, filter, build
// reference/oracle ladders, train quality and bitrate models on a grouped
// split, construct corrected ladders for held-out videos and evaluate BD
// metrics, closeness and monotonicity.
SynthRunResult run_synth_pipeline(uint64_t seed, int n_videos, const Config& config);

} // namespace shotladder
