#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "shotladder/features.hpp"
#include "shotladder/media.hpp"

namespace shotladder {

struct GlcmSpec {
    int levels = 64;
    int block = 64;
    // (dy, dx) displacements, averaged into one symmetric matrix per block
    std::vector<std::pair<int, int>> offsets{{0, 1}, {1, 0}, {1, 1}, {1, -1}};
    bool symmetric = true;
};

struct GlcmProps {
    double correlation = 0.0; // in [-1,1]; 0 when a marginal variance is 0
    double contrast = 0.0;
    double energy = 0.0;      // sqrt of angular second moment, in (0,1]
    double homogeneity = 0.0; // in (0,1]
};

struct LlfConfig {
    GlcmSpec glcm;
    int coherence_block = 64;
    double coherence_epsilon = 1e-6;
    int dct_block = 32;
    double log_energy_floor = -60.0; // guards log2 of zero temporal energy
    double chroma_v_weight = 5.0;    // W_R applied to pooled V-plane stats
};

// Per-plane (Y,U,V) DCT texture terms, temporally pooled by mean:
// E = mean |AC| of blockwise DCT, h = mean |DCT_t - DCT_{t-1}|,
// L = mean sqrt(DC).
struct DctTextureTriple {
    std::array<double, 3> E{};
    std::array<double, 3> h{};
    std::array<double, 3> L{};
};

// Normalized co-occurrence matrix of one quantized block, offsets
// averaged. Exposed separately so single-offset behaviour is testable.
std::vector<double> glcm_matrix(const Plane& block, int bit_depth, const GlcmSpec& spec);
GlcmProps glcm_properties(const std::vector<double>& matrix, int levels);

// GLCM family: 4 properties, spatially pooled {mean,std} over 64x64
// blocks, temporally pooled {mean,std,skew,kurtosis} -> 32 features.
std::vector<double> glcm_features(const VideoClip& clip, const LlfConfig& config,
                                  std::vector<std::string>* names = nullptr);

// Temporal coherence: per frame pair and block,
// var(F_i - F_{i-1}) / (var(F_i) + var(F_{i-1}) + eps), pooled
// {mean,std,skew,kurtosis} over blocks then {mean,std} over pairs -> 8.
std::vector<double> temporal_coherence(const VideoClip& clip, const LlfConfig& config,
                                       std::vector<std::string>* names = nullptr);

// SI, TI, CTI, CF and CI families -> 44 features.
std::vector<double> si_ti_cti_cf_ci(const VideoClip& clip, const LlfConfig& config,
                                    std::vector<std::string>* names = nullptr);

// Blockwise DCT texture triple for all three planes.
DctTextureTriple dct_texture(const VideoClip& clip, const LlfConfig& config);

// log2(sqrt(h/E)) with the zero-energy guard applied.
double dct_log_ratio(double h, double E, const LlfConfig& config);

int llf_feature_count(int set_id);

// Extract LLF set 1..3 (lengths 93/96/96). Set 2 needs the bitrate of the
// target encode, set 3 its quality score.
FeatureVector extract_llf(const VideoClip& clip, int set_id,
                          std::optional<double> bitrate_kbps,
                          std::optional<double> quality,
                          const LlfConfig& config);

} // namespace shotladder
