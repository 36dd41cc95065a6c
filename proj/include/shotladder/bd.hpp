#pragma once

#include <map>
#include <span>
#include <string>

#include "shotladder/rq.hpp"

namespace shotladder {

// Bjontegaard deltas between a test point set and an anchor point set.
// Negative bd_rate means the test set needs less bitrate; positive
// bd_quality means a quality gain. Spans record the integration overlap.
struct BdResult {
    double bd_rate = 0.0;    // percent
    double bd_quality = 0.0; // VMAF delta
    double quality_span[2] = {0.0, 0.0};
    double log2_bitrate_span[2] = {0.0, 0.0};
    bool monotone_warning = false; // a fitted cubic is non-monotone on its overlap
};

// Cubic least-squares fit of log2 bitrate as a function of quality for
// both sets, integrated over the overlapping quality span:
// 100 * (2^mean_log2_diff - 1). Requires >= 4 points with distinct
// qualities per set and a non-empty overlap.
double bd_rate(std::span<const RQPoint> test, std::span<const RQPoint> anchor);

// Dual fit of quality as a cubic of log2 bitrate, mean difference over the
// overlapping bitrate span.
double bd_quality(std::span<const RQPoint> test, std::span<const RQPoint> anchor);

// Both metrics at once, with overlap spans and the monotonicity flag.
BdResult bd_metrics(std::span<const RQPoint> test, std::span<const RQPoint> anchor);

struct BdPair {
    double bd_rate = 0.0;
    double bd_vmaf = 0.0;
};

struct ClosenessResult {
    double f25 = 0.0;
    double f50 = 0.0;
    double f75 = 0.0;
};

// Fraction of videos whose method gains reach 25/50/75% of the reference
// gains, both measured against the fixed ladder:
// f_t counts videos with -bd_rate_m >= t * -bd_rate_r and
// bd_vmaf_m >= t * bd_vmaf_r. Video sets must match.
ClosenessResult closeness(const std::map<std::string, BdPair>& method,
                          const std::map<std::string, BdPair>& reference);

} // namespace shotladder
