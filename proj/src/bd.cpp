#include "shotladder/bd.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "shotladder/error.hpp"

namespace shotladder {

namespace {

struct Cubic {
    // coefficients in the shared normalized coordinate u = (v - shift) / scale
    double c[4] = {0, 0, 0, 0};
    double shift = 0.0;
    double scale = 1.0;

    double eval_u(double u) const { return ((c[3] * u + c[2]) * u + c[1]) * u + c[0]; }
    // definite integral of the polynomial over [ua, ub] in u-space
    double integral_u(double ua, double ub) const {
        auto anti = [this](double u) {
            return c[0] * u + c[1] * u * u / 2.0 + c[2] * u * u * u / 3.0 +
                   c[3] * u * u * u * u / 4.0;
        };
        return anti(ub) - anti(ua);
    }
};

// Least-squares cubic y(v) with a caller-supplied normalization so that two
// fits share one coordinate system and their difference is a coefficient
// subtraction.
Cubic fit_cubic(std::span<const double> v, std::span<const double> y, double shift, double scale) {
    Eigen::MatrixXd a(v.size(), 4);
    Eigen::VectorXd b(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        const double u = (v[i] - shift) / scale;
        a(static_cast<Eigen::Index>(i), 0) = 1.0;
        a(static_cast<Eigen::Index>(i), 1) = u;
        a(static_cast<Eigen::Index>(i), 2) = u * u;
        a(static_cast<Eigen::Index>(i), 3) = u * u * u;
        b(static_cast<Eigen::Index>(i)) = y[i];
    }
    const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(b);
    Cubic f;
    for (int k = 0; k < 4; ++k) f.c[k] = sol(k);
    f.shift = shift;
    f.scale = scale;
    return f;
}

bool monotone_on(const Cubic& f, double ua, double ub) {
    // sample the derivative; adequate for a warning flag
    double prev = f.eval_u(ua);
    for (int i = 1; i <= 128; ++i) {
        const double u = ua + (ub - ua) * i / 128.0;
        const double cur = f.eval_u(u);
        if (cur < prev - 1e-12 * std::max(1.0, std::fabs(prev))) return false;
        prev = cur;
    }
    return true;
}

struct AxisData {
    std::vector<double> v; // abscissa
    std::vector<double> y; // ordinate
};

AxisData axis_points(std::span<const RQPoint> pts, bool quality_as_abscissa) {
    AxisData d;
    for (const RQPoint& p : pts) {
        const double x = p.log2_bitrate();
        if (quality_as_abscissa) {
            d.v.push_back(p.quality);
            d.y.push_back(x);
        } else {
            d.v.push_back(x);
            d.y.push_back(p.quality);
        }
    }
    return d;
}

void validate_set(const AxisData& d, const char* which) {
    if (d.v.size() < 4)
        throw ValidationError(std::string("bd: ") + which + " set needs at least 4 points");
    std::set<double> uniq(d.v.begin(), d.v.end());
    if (uniq.size() < 4)
        throw ValidationError(std::string("bd: ") + which +
                              " set needs 4 distinct abscissa values");
}

// Shared machinery for both deltas: fit both sets as cubics of the chosen
// abscissa, integrate the difference over the overlap, return its mean.
double mean_curve_difference(std::span<const RQPoint> test, std::span<const RQPoint> anchor,
                             bool quality_as_abscissa, double overlap[2], bool* warn) {
    const AxisData dt = axis_points(test, quality_as_abscissa);
    const AxisData da = axis_points(anchor, quality_as_abscissa);
    validate_set(dt, "test");
    validate_set(da, "anchor");

    const double lo = std::max(*std::min_element(dt.v.begin(), dt.v.end()),
                               *std::min_element(da.v.begin(), da.v.end()));
    const double hi = std::min(*std::max_element(dt.v.begin(), dt.v.end()),
                               *std::max_element(da.v.begin(), da.v.end()));
    if (!(hi > lo))
        throw ValidationError(quality_as_abscissa ? "bd: no quality overlap"
                                                  : "bd: no bitrate overlap");
    overlap[0] = lo;
    overlap[1] = hi;

    // one normalization for both fits, anchored on the union span
    const double vmin = std::min(*std::min_element(dt.v.begin(), dt.v.end()),
                                 *std::min_element(da.v.begin(), da.v.end()));
    const double vmax = std::max(*std::max_element(dt.v.begin(), dt.v.end()),
                                 *std::max_element(da.v.begin(), da.v.end()));
    const double shift = 0.5 * (vmin + vmax);
    const double scale = std::max(0.5 * (vmax - vmin), 1e-12);

    const Cubic ft = fit_cubic(dt.v, dt.y, shift, scale);
    const Cubic fa = fit_cubic(da.v, da.y, shift, scale);

    const double ua = (lo - shift) / scale;
    const double ub = (hi - shift) / scale;
    if (warn) *warn = !monotone_on(ft, ua, ub) || !monotone_on(fa, ua, ub);

    // d(mean) is scale-free: the du->dv Jacobians cancel
    const double mean_diff = (ft.integral_u(ua, ub) - fa.integral_u(ua, ub)) / (ub - ua);
    return mean_diff;
}

} // namespace

double bd_rate(std::span<const RQPoint> test, std::span<const RQPoint> anchor) {
    double span[2];
    const double d = mean_curve_difference(test, anchor, true, span, nullptr);
    return 100.0 * (std::exp2(d) - 1.0);
}

double bd_quality(std::span<const RQPoint> test, std::span<const RQPoint> anchor) {
    double span[2];
    return mean_curve_difference(test, anchor, false, span, nullptr);
}

BdResult bd_metrics(std::span<const RQPoint> test, std::span<const RQPoint> anchor) {
    BdResult r;
    bool warn_rate = false, warn_quality = false;
    const double d = mean_curve_difference(test, anchor, true, r.quality_span, &warn_rate);
    r.bd_rate = 100.0 * (std::exp2(d) - 1.0);
    r.bd_quality =
        mean_curve_difference(test, anchor, false, r.log2_bitrate_span, &warn_quality);
    r.monotone_warning = warn_rate || warn_quality;
    return r;
}

ClosenessResult closeness(const std::map<std::string, BdPair>& method,
                          const std::map<std::string, BdPair>& reference) {
    if (method.empty()) throw ValidationError("closeness: empty video set");
    if (method.size() != reference.size())
        throw ValidationError("closeness: mismatched video sets");
    for (const auto& [id, pair] : method)
        if (!reference.count(id))
            throw ValidationError("closeness: video '" + id + "' missing from reference");

    ClosenessResult out;
    const double thresholds[3] = {0.25, 0.5, 0.75};
    double* slots[3] = {&out.f25, &out.f50, &out.f75};
    for (int t = 0; t < 3; ++t) {
        int hits = 0;
        for (const auto& [id, m] : method) {
            const BdPair& r = reference.at(id);
            const bool rate_ok = -m.bd_rate >= thresholds[t] * -r.bd_rate;
            const bool quality_ok = m.bd_vmaf >= thresholds[t] * r.bd_vmaf;
            if (rate_ok && quality_ok) ++hits;
        }
        *slots[t] = static_cast<double>(hits) / static_cast<double>(method.size());
    }
    return out;
}

} // namespace shotladder
