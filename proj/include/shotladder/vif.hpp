#pragma once

#include <array>
#include <vector>

#include "shotladder/features.hpp"
#include "shotladder/media.hpp"

namespace shotladder {

inline constexpr int kVifScales = 4;
inline constexpr int kVifSubbands = 2;
inline constexpr int kVifPatchDim = 9; // 3x3 patches

struct VifConfig {
    double sigma_n_sq = 0.1; // wavelet-domain noise variance
    int patch_size = 3;
};

// Four-scale detail pyramid. horizontal_detail high-passes along rows
// (responds to vertical edges), vertical_detail high-passes along columns
// (responds to horizontal edges). The diagonal band is discarded and the
// approximation band feeds the next scale.
struct SubbandPyramid {
    struct Scale {
        Plane horizontal_detail;
        Plane vertical_detail;
    };
    std::array<Scale, kVifScales> scales;
};

// Gaussian scale mixture fit of one subband: eigenvalues of the patch
// covariance (descending) and the per-patch scalar field s_i^2.
struct GsmFit {
    std::array<double, kVifPatchDim> eigenvalues{};
    std::vector<double> s_sq;
    int n_patches = 0;
};

// Mutual information of one (scale, subband) cell: per-eigenvector values
// and their sum.
struct SubbandInfo {
    std::array<double, kVifPatchDim> per_eigvec{};
    double total = 0.0;
};

// Aggregate over one plane: all scales and subbands plus the per-scale
// averages. index [k][b] with k = scale, b = 0 horizontal / 1 vertical.
struct VifFeatures {
    std::array<std::array<SubbandInfo, kVifSubbands>, kVifScales> cells{};
    std::array<double, kVifScales> per_scale{};
};

// Recursive single-level orthonormal Haar analysis. Requires the plane to
// be at least 48x48 so the coarsest subbands still hold a 3x3 patch.
SubbandPyramid wavelet_decompose(const Plane& plane, const VifConfig& config);

// Fit the GSM model to a subband: overlapping mean-removed 3x3 patches,
// covariance eigenvalues clamped at zero, s_i^2 via (pseudo-)inverse.
GsmFit fit_gsm(const Plane& subband, const VifConfig& config);

// Mutual information along each covariance eigenvector:
// per_eigvec[j] = (1/N) sum_i log2(1 + s_i^2 * lambda_j / sigma_n^2).
SubbandInfo vif_mutual_info(const GsmFit& fit, const VifConfig& config);

// Full per-plane pipeline: pyramid, GSM fit and mutual information for
// every (scale, subband) cell.
VifFeatures vif_plane_features(const Plane& plane, const VifConfig& config);

// Number of features produced by VIFF set 1..9: {4,8,72,5,9,73,9,17,145}.
int viff_feature_count(int set_id);

// Extract VIFF set `set_id` from a clip. Sets 1-3 use luma frames only;
// sets 4-9 add the mean absolute frame difference; sets 7-9 additionally
// run the VIF pipeline on the difference planes. Per-frame features are
// temporally pooled by their mean. Vector order is fixed: frame features
// by (scale, band, eigenvector) ascending, then the mean absolute
// difference, then difference-plane features in the same order.
FeatureVector extract_viff(const VideoClip& clip, int set_id, const VifConfig& config);

} // namespace shotladder
