#pragma once

#include <span>
#include <string>
#include <vector>

namespace shotladder {

struct Resolution {
    int width = 0;
    int height = 0;

    long long pixels() const { return static_cast<long long>(width) * height; }
    bool operator==(const Resolution&) const = default;
    bool operator<(const Resolution& o) const {
        if (pixels() != o.pixels()) return pixels() < o.pixels();
        if (width != o.width) return width < o.width;
        return height < o.height;
    }
    std::string label() const;
};

// One encode outcome. bitrate is kbps, quality a VMAF-scale score.
struct RQPoint {
    std::string video_id;
    int width = 0;
    int height = 0;
    int crf = 0;
    double bitrate_kbps = 0.0;
    double quality = 0.0;

    Resolution resolution() const { return {width, height}; }
    double log2_bitrate() const;
};

struct RQDataset {
    std::vector<RQPoint> points;

    std::vector<std::string> video_ids() const;
    std::vector<Resolution> resolutions() const;
    std::vector<RQPoint> select(const std::string& video_id) const;
    std::vector<RQPoint> select(const std::string& video_id, Resolution res) const;
};

// Keep points with q_min <= quality <= q_max (inclusive on both ends).
std::vector<RQPoint> filter_constraints(std::span<const RQPoint> points,
                                        double q_min = 15.0, double q_max = 95.0);

// Per-resolution rate-quality curve with knots in (log2 bitrate, quality),
// bitrate strictly ascending. Non-monotone quality is reported, never
// silently repaired.
struct RQCurve {
    Resolution resolution;
    std::vector<double> x; // log2 bitrate
    std::vector<double> q; // quality
    bool quality_monotone = true;

    double min_x() const { return x.front(); }
    double max_x() const { return x.back(); }
    double min_q() const;
    double max_q() const;
};

// Build a curve from one video's points at one resolution. Equal-bitrate
// collisions keep the higher quality.
RQCurve build_curve(std::span<const RQPoint> points, Resolution resolution);

// Piecewise-linear interpolation in (log2 bitrate, quality). Queries
// outside the knot span throw.
double interpolate_quality(const RQCurve& curve, double log2_bitrate);

// Inverse lookup quality -> log2 bitrate; requires strictly increasing
// quality knots.
double interpolate_bitrate(const RQCurve& curve, double quality);

struct ParetoFront {
    std::vector<RQPoint> points; // sorted by bitrate, strictly rising quality
};

// Maximal non-dominated subset. A point is dominated when another point
// has bitrate <= and quality >= with at least one strict; equal
// (bitrate, quality) duplicates resolve to fewer pixels.
ParetoFront pareto_front(std::span<const RQPoint> points);

// Intersection of two per-resolution curves. When found, both coordinates
// of the switch point are reported.
struct Crossover {
    bool exists = false;
    double log2_bitrate = 0.0;
    double bitrate_kbps = 0.0;
    double quality = 0.0;
};

// Smallest bitrate in the overlap above which `higher` stays at least as
// good as `lower`. exists = false when the higher resolution never
// overtakes.
Crossover crossover_bitrate(const RQCurve& lower, const RQCurve& higher);

// Mirror on the quality axis: smallest quality above which `higher`
// reaches equal quality at lower bitrate. Requires strictly monotone
// quality on both curves.
Crossover crossover_quality(const RQCurve& lower, const RQCurve& higher);

struct MonotonicityReport {
    bool pass = true;
    int first_violation = -1; // index into y of the first offending sample
};

// Pass iff y is non-decreasing up to eps along strictly increasing x.
MonotonicityReport check_monotonic(std::span<const double> x, std::span<const double> y,
                                   double eps);

} // namespace shotladder
