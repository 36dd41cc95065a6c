#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>

namespace shotladder {

enum class Stat : uint8_t { Mean, Std, Skew, Kurtosis };

const char* stat_name(Stat s);

// Population central moments. Degenerate rule: when the standard deviation
// is zero, skew and kurtosis are defined as zero. Kurtosis is excess
// kurtosis (a normal distribution pools to 0).
struct Moments {
    double mean = 0.0;
    double stddev = 0.0;
    double skew = 0.0;
    double kurtosis = 0.0;
};

Moments compute_moments(std::span<const double> values);
Moments compute_moments(std::span<const float> values);

// Pooling configuration shared by the feature extractors. Spatial pooling
// supports {mean, std}; temporal pooling supports all four moments.
struct PoolSpec {
    std::set<Stat> spatial_stats{Stat::Mean, Stat::Std};
    std::set<Stat> temporal_stats{Stat::Mean, Stat::Std, Stat::Skew, Stat::Kurtosis};
};

// Pool a plane (or any sample collection) spatially. Throws on empty input
// or when a stat outside {mean, std} is requested.
std::map<Stat, double> pool_spatial(std::span<const double> values, const std::set<Stat>& stats);
std::map<Stat, double> pool_spatial(std::span<const float> values, const std::set<Stat>& stats);

// Pool a per-frame scalar series temporally. Throws on empty input.
std::map<Stat, double> pool_temporal(std::span<const double> values, const std::set<Stat>& stats);

} // namespace shotladder
