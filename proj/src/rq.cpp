#include "shotladder/rq.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "shotladder/error.hpp"

namespace shotladder {

std::string Resolution::label() const {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%dp", height);
    return buf;
}

double RQPoint::log2_bitrate() const { return std::log2(bitrate_kbps); }

std::vector<std::string> RQDataset::video_ids() const {
    std::set<std::string> ids;
    for (const RQPoint& p : points) ids.insert(p.video_id);
    return {ids.begin(), ids.end()};
}

std::vector<Resolution> RQDataset::resolutions() const {
    std::set<Resolution> seen;
    for (const RQPoint& p : points) seen.insert(p.resolution());
    std::vector<Resolution> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end(), [](const Resolution& a, const Resolution& b) {
        return b < a; // descending pixel count
    });
    return out;
}

std::vector<RQPoint> RQDataset::select(const std::string& video_id) const {
    std::vector<RQPoint> out;
    for (const RQPoint& p : points)
        if (p.video_id == video_id) out.push_back(p);
    return out;
}

std::vector<RQPoint> RQDataset::select(const std::string& video_id, Resolution res) const {
    std::vector<RQPoint> out;
    for (const RQPoint& p : points)
        if (p.video_id == video_id && p.resolution() == res) out.push_back(p);
    return out;
}

std::vector<RQPoint> filter_constraints(std::span<const RQPoint> points, double q_min,
                                        double q_max) {
    std::vector<RQPoint> out;
    out.reserve(points.size());
    for (const RQPoint& p : points)
        if (p.quality >= q_min && p.quality <= q_max) out.push_back(p);
    return out;
}

double RQCurve::min_q() const { return *std::min_element(q.begin(), q.end()); }
double RQCurve::max_q() const { return *std::max_element(q.begin(), q.end()); }

RQCurve build_curve(std::span<const RQPoint> points, Resolution resolution) {
    std::vector<const RQPoint*> sel;
    for (const RQPoint& p : points)
        if (p.resolution() == resolution) sel.push_back(&p);
    if (sel.empty()) throw ValidationError("build_curve: no points at " + resolution.label());
    std::sort(sel.begin(), sel.end(), [](const RQPoint* a, const RQPoint* b) {
        if (a->bitrate_kbps != b->bitrate_kbps) return a->bitrate_kbps < b->bitrate_kbps;
        return a->quality > b->quality;
    });

    RQCurve curve;
    curve.resolution = resolution;
    for (const RQPoint* p : sel) {
        const double x = p->log2_bitrate();
        if (!curve.x.empty() && x == curve.x.back()) continue; // collision keeps higher quality
        curve.x.push_back(x);
        curve.q.push_back(p->quality);
    }
    for (size_t i = 1; i < curve.q.size(); ++i)
        if (curve.q[i] < curve.q[i - 1]) curve.quality_monotone = false;
    return curve;
}

double interpolate_quality(const RQCurve& curve, double log2_bitrate) {
    if (curve.x.empty()) throw ValidationError("interpolate: empty curve");
    if (log2_bitrate < curve.min_x() || log2_bitrate > curve.max_x())
        throw ValidationError("interpolate: query outside the curve span");
    const auto it = std::lower_bound(curve.x.begin(), curve.x.end(), log2_bitrate);
    const size_t j = static_cast<size_t>(it - curve.x.begin());
    if (j < curve.x.size() && curve.x[j] == log2_bitrate) return curve.q[j]; // exact knot
    const size_t i = j - 1;
    const double t = (log2_bitrate - curve.x[i]) / (curve.x[i + 1] - curve.x[i]);
    return curve.q[i] + t * (curve.q[i + 1] - curve.q[i]);
}

double interpolate_bitrate(const RQCurve& curve, double quality) {
    for (size_t i = 1; i < curve.q.size(); ++i)
        if (curve.q[i] <= curve.q[i - 1])
            throw ValidationError("interpolate inverse requires strictly increasing quality");
    if (curve.q.empty()) throw ValidationError("interpolate: empty curve");
    if (quality < curve.q.front() || quality > curve.q.back())
        throw ValidationError("interpolate: query outside the curve span");
    const auto it = std::lower_bound(curve.q.begin(), curve.q.end(), quality);
    const size_t j = static_cast<size_t>(it - curve.q.begin());
    if (j < curve.q.size() && curve.q[j] == quality) return curve.x[j];
    const size_t i = j - 1;
    const double t = (quality - curve.q[i]) / (curve.q[i + 1] - curve.q[i]);
    return curve.x[i] + t * (curve.x[i + 1] - curve.x[i]);
}

ParetoFront pareto_front(std::span<const RQPoint> points) {
    if (points.empty()) throw ValidationError("pareto_front: empty input");
    std::vector<RQPoint> sorted(points.begin(), points.end());
    // Bitrate ascending; at equal bitrate the best candidate first:
    // higher quality, then fewer pixels, then stable identity order.
    std::sort(sorted.begin(), sorted.end(), [](const RQPoint& a, const RQPoint& b) {
        if (a.bitrate_kbps != b.bitrate_kbps) return a.bitrate_kbps < b.bitrate_kbps;
        if (a.quality != b.quality) return a.quality > b.quality;
        if (a.resolution().pixels() != b.resolution().pixels())
            return a.resolution().pixels() < b.resolution().pixels();
        if (a.crf != b.crf) return a.crf < b.crf;
        return a.video_id < b.video_id;
    });

    ParetoFront front;
    double best_q = -std::numeric_limits<double>::infinity();
    for (const RQPoint& p : sorted) {
        if (p.quality > best_q) {
            front.points.push_back(p);
            best_q = p.quality;
        }
    }
    return front;
}

namespace {

// Merged-knot evaluation of f(x) = interp(hi, x) - interp(lo, x) over the
// bitrate overlap, then the last upward zero crossing. f is linear between
// merged knots so the sign walk is exact.
Crossover crossover_impl(const std::vector<double>& xs, const std::vector<double>& f,
                         const RQCurve& higher) {
    Crossover out;
    if (f.back() < 0.0) return out; // never overtakes (or falls back below)

    size_t last_neg = xs.size(); // index of last strictly negative value
    for (size_t i = 0; i < xs.size(); ++i)
        if (f[i] < 0.0) last_neg = i;

    double x_star;
    if (last_neg == xs.size()) {
        x_star = xs.front(); // superior over the whole overlap
    } else {
        const size_t i = last_neg;
        const double t = f[i] / (f[i] - f[i + 1]); // f[i] < 0 <= f[i+1]
        x_star = xs[i] + t * (xs[i + 1] - xs[i]);
    }
    out.exists = true;
    out.log2_bitrate = x_star;
    out.bitrate_kbps = std::exp2(x_star);
    out.quality = interpolate_quality(higher, x_star);
    return out;
}

} // namespace

Crossover crossover_bitrate(const RQCurve& lower, const RQCurve& higher) {
    const double lo = std::max(lower.min_x(), higher.min_x());
    const double hi = std::min(lower.max_x(), higher.max_x());
    if (lo >= hi) throw ValidationError("crossover_bitrate: curves do not overlap in bitrate");

    std::vector<double> xs{lo, hi};
    for (double x : lower.x)
        if (x > lo && x < hi) xs.push_back(x);
    for (double x : higher.x)
        if (x > lo && x < hi) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    std::vector<double> f(xs.size());
    for (size_t i = 0; i < xs.size(); ++i)
        f[i] = interpolate_quality(higher, xs[i]) - interpolate_quality(lower, xs[i]);
    return crossover_impl(xs, f, higher);
}

Crossover crossover_quality(const RQCurve& lower, const RQCurve& higher) {
    // Work in the inverse domain: bitrate as a function of quality.
    const double lo = std::max(lower.q.front(), higher.q.front());
    const double hi = std::min(lower.q.back(), higher.q.back());
    if (lo >= hi) return Crossover{}; // disjoint quality spans: no cross-over

    std::vector<double> qs{lo, hi};
    for (double q : lower.q)
        if (q > lo && q < hi) qs.push_back(q);
    for (double q : higher.q)
        if (q > lo && q < hi) qs.push_back(q);
    std::sort(qs.begin(), qs.end());
    qs.erase(std::unique(qs.begin(), qs.end()), qs.end());

    // g >= 0 where the higher resolution reaches quality q at lower bitrate.
    std::vector<double> g(qs.size());
    for (size_t i = 0; i < qs.size(); ++i)
        g[i] = interpolate_bitrate(lower, qs[i]) - interpolate_bitrate(higher, qs[i]);

    Crossover out;
    if (g.back() < 0.0) return out;
    size_t last_neg = qs.size();
    for (size_t i = 0; i < qs.size(); ++i)
        if (g[i] < 0.0) last_neg = i;
    double q_star;
    if (last_neg == qs.size()) {
        q_star = qs.front();
    } else {
        const size_t i = last_neg;
        const double t = g[i] / (g[i] - g[i + 1]);
        q_star = qs[i] + t * (qs[i + 1] - qs[i]);
    }
    out.exists = true;
    out.quality = q_star;
    out.log2_bitrate = interpolate_bitrate(higher, q_star);
    out.bitrate_kbps = std::exp2(out.log2_bitrate);
    return out;
}

MonotonicityReport check_monotonic(std::span<const double> x, std::span<const double> y,
                                   double eps) {
    if (x.size() != y.size()) throw ValidationError("check_monotonic: x/y size mismatch");
    for (size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1]))
            throw ValidationError("check_monotonic: x must be strictly increasing");
    MonotonicityReport r;
    double running_max = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < y.size(); ++i) {
        if (y[i] < running_max - eps) {
            r.pass = false;
            r.first_violation = static_cast<int>(i);
            return r;
        }
        running_max = std::max(running_max, y[i]);
    }
    return r;
}

} // namespace shotladder
