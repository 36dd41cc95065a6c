#include "shotladder/vif.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "shotladder/error.hpp"

namespace shotladder {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

struct LevelResult {
    Plane approx;
    Plane horizontal_detail; // row high-pass, column low-pass
    Plane vertical_detail;   // row low-pass, column high-pass
};

// One separable Haar analysis level. Odd trailing samples are dropped
// (floor halving); the diagonal band is not produced.
LevelResult haar_level(const Plane& src) {
    const int hw = src.width / 2;
    const int hh = src.height / 2;
    Plane row_lo(hw, src.height);
    Plane row_hi(hw, src.height);
    for (int y = 0; y < src.height; ++y) {
        for (int j = 0; j < hw; ++j) {
            const float a = src.at(y, 2 * j);
            const float b = src.at(y, 2 * j + 1);
            row_lo.at(y, j) = static_cast<float>((a + b) * kInvSqrt2);
            row_hi.at(y, j) = static_cast<float>((a - b) * kInvSqrt2);
        }
    }
    LevelResult r{Plane(hw, hh), Plane(hw, hh), Plane(hw, hh)};
    for (int i = 0; i < hh; ++i) {
        for (int x = 0; x < hw; ++x) {
            const float la = row_lo.at(2 * i, x);
            const float lb = row_lo.at(2 * i + 1, x);
            const float ha = row_hi.at(2 * i, x);
            const float hb = row_hi.at(2 * i + 1, x);
            r.approx.at(i, x) = static_cast<float>((la + lb) * kInvSqrt2);
            r.vertical_detail.at(i, x) = static_cast<float>((la - lb) * kInvSqrt2);
            r.horizontal_detail.at(i, x) = static_cast<float>((ha + hb) * kInvSqrt2);
        }
    }
    return r;
}

} // namespace

SubbandPyramid wavelet_decompose(const Plane& plane, const VifConfig&) {
    if (plane.width < 48 || plane.height < 48)
        throw ValidationError("wavelet_decompose: plane too small (need >= 48x48)");
    SubbandPyramid pyr;
    Plane approx = plane;
    for (int k = 0; k < kVifScales; ++k) {
        LevelResult level = haar_level(approx);
        pyr.scales[k].horizontal_detail = std::move(level.horizontal_detail);
        pyr.scales[k].vertical_detail = std::move(level.vertical_detail);
        approx = std::move(level.approx);
    }
    return pyr;
}

GsmFit fit_gsm(const Plane& subband, const VifConfig& config) {
    const int ps = config.patch_size;
    if (subband.width < ps || subband.height < ps)
        throw ValidationError("fit_gsm: subband smaller than one patch");

    const int rows = subband.height - ps + 1;
    const int cols = subband.width - ps + 1;
    const int n = rows * cols;
    const int m = kVifPatchDim;

    // Ensemble mean and raw second moment in one pass over the patches.
    Eigen::Matrix<double, 9, 1> mu = Eigen::Matrix<double, 9, 1>::Zero();
    Eigen::Matrix<double, 9, 9> raw = Eigen::Matrix<double, 9, 9>::Zero();
    Eigen::Matrix<double, 9, 1> c;
    for (int y = 0; y < rows; ++y) {
        for (int x = 0; x < cols; ++x) {
            int k = 0;
            for (int dy = 0; dy < ps; ++dy)
                for (int dx = 0; dx < ps; ++dx) c(k++) = subband.at(y + dy, x + dx);
            mu += c;
            raw.selfadjointView<Eigen::Lower>().rankUpdate(c);
        }
    }
    mu /= static_cast<double>(n);
    Eigen::Matrix<double, 9, 9> cov =
        Eigen::Matrix<double, 9, 9>(raw.selfadjointView<Eigen::Lower>()) / static_cast<double>(n) -
        mu * mu.transpose();

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 9, 9>> solver(cov);
    if (solver.info() != Eigen::Success) throw Error("fit_gsm: eigendecomposition failed");

    GsmFit fit;
    fit.n_patches = n;
    // Eigen reports ascending order; store descending and clamp at zero.
    for (int j = 0; j < m; ++j)
        fit.eigenvalues[j] = std::max(0.0, solver.eigenvalues()(m - 1 - j));

    // Pseudo-inverse through the same eigenbasis.
    const double lmax = fit.eigenvalues[0];
    const double tol = lmax * 1e-12;
    Eigen::Matrix<double, 9, 1> inv_eig;
    for (int j = 0; j < m; ++j) {
        const double lambda = solver.eigenvalues()(j);
        inv_eig(j) = lambda > tol && lambda > 0.0 ? 1.0 / lambda : 0.0;
    }
    const Eigen::Matrix<double, 9, 9> pinv =
        solver.eigenvectors() * inv_eig.asDiagonal() * solver.eigenvectors().transpose();

    fit.s_sq.resize(static_cast<size_t>(n));
    size_t idx = 0;
    for (int y = 0; y < rows; ++y) {
        for (int x = 0; x < cols; ++x) {
            int k = 0;
            for (int dy = 0; dy < ps; ++dy)
                for (int dx = 0; dx < ps; ++dx) c(k++) = subband.at(y + dy, x + dx);
            c -= mu;
            const double q = c.dot(pinv * c);
            fit.s_sq[idx++] = std::max(0.0, q / static_cast<double>(m));
        }
    }
    return fit;
}

SubbandInfo vif_mutual_info(const GsmFit& fit, const VifConfig& config) {
    if (fit.n_patches <= 0 || fit.s_sq.empty())
        throw ValidationError("vif_mutual_info: empty GSM fit");
    if (config.sigma_n_sq <= 0.0)
        throw ValidationError("vif_mutual_info: sigma_n_sq must be positive");
    SubbandInfo info;
    const double inv_n = 1.0 / static_cast<double>(fit.s_sq.size());
    const double inv_sigma = 1.0 / config.sigma_n_sq;
    for (int j = 0; j < kVifPatchDim; ++j) {
        const double lambda = fit.eigenvalues[j];
        if (lambda <= 0.0) continue; // log2(1 + 0) contributes nothing
        double acc = 0.0;
        for (double s2 : fit.s_sq) acc += std::log2(1.0 + s2 * lambda * inv_sigma);
        info.per_eigvec[j] = acc * inv_n;
    }
    for (int j = 0; j < kVifPatchDim; ++j) info.total += info.per_eigvec[j];
    return info;
}

VifFeatures vif_plane_features(const Plane& plane, const VifConfig& config) {
    const SubbandPyramid pyr = wavelet_decompose(plane, config);
    VifFeatures out;
    for (int k = 0; k < kVifScales; ++k) {
        out.cells[k][0] = vif_mutual_info(fit_gsm(pyr.scales[k].horizontal_detail, config), config);
        out.cells[k][1] = vif_mutual_info(fit_gsm(pyr.scales[k].vertical_detail, config), config);
        out.per_scale[k] = 0.5 * (out.cells[k][0].total + out.cells[k][1].total);
    }
    return out;
}

int viff_feature_count(int set_id) {
    static constexpr int counts[9] = {4, 8, 72, 5, 9, 73, 9, 17, 145};
    if (set_id < 1 || set_id > 9) throw ValidationError("viff set id must be in 1..9");
    return counts[set_id - 1];
}

namespace {

enum class Granularity { Scale, Subband, Eigvec };

Granularity viff_granularity(int set_id) {
    switch ((set_id - 1) % 3) {
    case 0: return Granularity::Scale;
    case 1: return Granularity::Subband;
    default: return Granularity::Eigvec;
    }
}

void append_plane_features(FeatureVector& fv, const VifFeatures& mean, Granularity g,
                           const std::string& prefix) {
    char name[64];
    switch (g) {
    case Granularity::Scale:
        for (int k = 0; k < kVifScales; ++k) {
            std::snprintf(name, sizeof(name), "%svif_scale%d", prefix.c_str(), k + 1);
            fv.push(name, mean.per_scale[k]);
        }
        break;
    case Granularity::Subband:
        for (int k = 0; k < kVifScales; ++k)
            for (int b = 0; b < kVifSubbands; ++b) {
                std::snprintf(name, sizeof(name), "%svif_scale%d_band%d", prefix.c_str(), k + 1,
                              b + 1);
                fv.push(name, mean.cells[k][b].total);
            }
        break;
    case Granularity::Eigvec:
        for (int k = 0; k < kVifScales; ++k)
            for (int b = 0; b < kVifSubbands; ++b)
                for (int j = 0; j < kVifPatchDim; ++j) {
                    std::snprintf(name, sizeof(name), "%svif_scale%d_band%d_eig%d", prefix.c_str(),
                                  k + 1, b + 1, j + 1);
                    fv.push(name, mean.cells[k][b].per_eigvec[j]);
                }
        break;
    }
}

void accumulate(VifFeatures& acc, const VifFeatures& v, double weight) {
    for (int k = 0; k < kVifScales; ++k) {
        acc.per_scale[k] += v.per_scale[k] * weight;
        for (int b = 0; b < kVifSubbands; ++b) {
            acc.cells[k][b].total += v.cells[k][b].total * weight;
            for (int j = 0; j < kVifPatchDim; ++j)
                acc.cells[k][b].per_eigvec[j] += v.cells[k][b].per_eigvec[j] * weight;
        }
    }
}

// Per-plane extraction is independent; results are reduced in index order
// afterwards so the pooled means stay bit-identical to a sequential run.
std::vector<VifFeatures> plane_features_parallel(const std::vector<const Plane*>& planes,
                                                 const VifConfig& config) {
    std::vector<VifFeatures> out(planes.size());
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (size_t i; (i = next.fetch_add(1)) < planes.size();)
            out[i] = vif_plane_features(*planes[i], config);
    };
    const unsigned workers = std::min<unsigned>(
        std::max(1u, std::thread::hardware_concurrency()),
        static_cast<unsigned>(planes.size()));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }
    return out;
}

} // namespace

FeatureVector extract_viff(const VideoClip& clip, int set_id, const VifConfig& config) {
    const int expected = viff_feature_count(set_id);
    const bool wants_diff_scalar = set_id >= 4;
    const bool wants_diff_vif = set_id >= 7;
    if (clip.frames.empty()) throw ValidationError("extract_viff: empty clip");
    if (wants_diff_scalar && clip.frame_count() < 2)
        throw ValidationError("extract_viff: sets 4-9 need at least 2 frames");

    // Temporal pooling is the mean over frames (and over difference planes).
    std::vector<const Plane*> luma_planes;
    for (const Frame& f : clip.frames) luma_planes.push_back(&f.luma);
    const std::vector<VifFeatures> per_frame = plane_features_parallel(luma_planes, config);
    VifFeatures frame_mean;
    const double fw = 1.0 / static_cast<double>(clip.frame_count());
    for (const VifFeatures& v : per_frame) accumulate(frame_mean, v, fw);

    double mean_abs_diff = 0.0;
    VifFeatures diff_mean;
    if (wants_diff_scalar) {
        const std::vector<Plane> diffs = luma_differences(clip);
        const double dw = 1.0 / static_cast<double>(diffs.size());
        for (const Plane& d : diffs) mean_abs_diff += mean_abs(d) * dw;
        if (wants_diff_vif) {
            std::vector<const Plane*> diff_planes;
            for (const Plane& d : diffs) diff_planes.push_back(&d);
            const std::vector<VifFeatures> per_diff =
                plane_features_parallel(diff_planes, config);
            for (const VifFeatures& v : per_diff) accumulate(diff_mean, v, dw);
        }
    }

    FeatureVector fv;
    char set_label[16];
    std::snprintf(set_label, sizeof(set_label), "viff%d", set_id);
    fv.set_id = set_label;

    const Granularity g = viff_granularity(set_id);
    append_plane_features(fv, frame_mean, g, "");
    if (wants_diff_scalar) fv.push("mean_abs_frame_diff", mean_abs_diff);
    if (wants_diff_vif) append_plane_features(fv, diff_mean, g, "diff_");

    if (static_cast<int>(fv.size()) != expected)
        throw Error("extract_viff: feature count mismatch");
    return fv;
}

} // namespace shotladder
