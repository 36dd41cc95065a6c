#include "shotladder/stats.hpp"

#include <cmath>
#include <vector>

#include "shotladder/error.hpp"

namespace shotladder {

const char* stat_name(Stat s) {
    switch (s) {
    case Stat::Mean: return "mean";
    case Stat::Std: return "std";
    case Stat::Skew: return "skew";
    case Stat::Kurtosis: return "kurtosis";
    }
    return "?";
}

namespace {

template <typename T>
Moments moments_impl(std::span<const T> values) {
    if (values.empty()) throw ValidationError("moments of empty input");
    const double n = static_cast<double>(values.size());
    double sum = 0.0;
    for (T v : values) sum += static_cast<double>(v);
    const double mean = sum / n;

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (T v : values) {
        const double d = static_cast<double>(v) - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    Moments r;
    r.mean = mean;
    r.stddev = std::sqrt(m2);
    if (m2 > 0.0) {
        r.skew = m3 / (m2 * r.stddev);
        r.kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return r;
}

double pick(const Moments& m, Stat s) {
    switch (s) {
    case Stat::Mean: return m.mean;
    case Stat::Std: return m.stddev;
    case Stat::Skew: return m.skew;
    case Stat::Kurtosis: return m.kurtosis;
    }
    return 0.0;
}

} // namespace

Moments compute_moments(std::span<const double> values) { return moments_impl(values); }
Moments compute_moments(std::span<const float> values) { return moments_impl(values); }

template <typename T>
static std::map<Stat, double> pool_spatial_impl(std::span<const T> values,
                                                const std::set<Stat>& stats) {
    if (values.empty()) throw ValidationError("pool_spatial: empty input");
    if (stats.empty()) throw ValidationError("pool_spatial: empty stat set");
    for (Stat s : stats)
        if (s != Stat::Mean && s != Stat::Std)
            throw ValidationError("pool_spatial supports only mean and std");
    const Moments m = moments_impl(values);
    std::map<Stat, double> out;
    for (Stat s : stats) out[s] = pick(m, s);
    return out;
}

std::map<Stat, double> pool_spatial(std::span<const double> values, const std::set<Stat>& stats) {
    return pool_spatial_impl(values, stats);
}
std::map<Stat, double> pool_spatial(std::span<const float> values, const std::set<Stat>& stats) {
    return pool_spatial_impl(values, stats);
}

std::map<Stat, double> pool_temporal(std::span<const double> values, const std::set<Stat>& stats) {
    if (values.empty()) throw ValidationError("pool_temporal: empty input");
    if (stats.empty()) throw ValidationError("pool_temporal: empty stat set");
    const Moments m = compute_moments(values);
    std::map<Stat, double> out;
    for (Stat s : stats) out[s] = pick(m, s);
    return out;
}

} // namespace shotladder
