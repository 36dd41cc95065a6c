#include "shotladder/texture.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "shotladder/error.hpp"
#include "shotladder/stats.hpp"

namespace shotladder {

namespace {

const std::set<Stat> kMeanStd{Stat::Mean, Stat::Std};
const std::set<Stat> kAllFour{Stat::Mean, Stat::Std, Stat::Skew, Stat::Kurtosis};
const Stat kOrderedTwo[2] = {Stat::Mean, Stat::Std};
const Stat kOrderedFour[4] = {Stat::Mean, Stat::Std, Stat::Skew, Stat::Kurtosis};

Plane crop_block(const Plane& p, int y0, int x0, int size) {
    Plane b(size, size);
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) b.at(y, x) = p.at(y0 + y, x0 + x);
    return b;
}

double plane_variance(const Plane& p, int y0, int x0, int size) {
    double sum = 0.0, sq = 0.0;
    const double n = static_cast<double>(size) * size;
    for (int y = 0; y < size; ++y)
        for (int x = 0; x < size; ++x) {
            const double v = p.at(y0 + y, x0 + x);
            sum += v;
            sq += v * v;
        }
    const double mean = sum / n;
    return std::max(0.0, sq / n - mean * mean);
}

// Emit "<prefix>_<f1>_<f2>" features: F1 stats computed per frame, each
// pooled over frames by the F2 stats. `per_frame[s]` holds one series per
// F1 stat.
template <size_t NF1, size_t NF2>
void pool_two_level(const std::array<std::vector<double>, NF1>& per_frame,
                    const Stat (&f1)[NF1], const Stat (&f2)[NF2], const std::string& prefix,
                    std::vector<double>& out, std::vector<std::string>* names) {
    for (size_t a = 0; a < NF1; ++a) {
        const Moments m = compute_moments(std::span<const double>(per_frame[a]));
        for (size_t b = 0; b < NF2; ++b) {
            double v = 0.0;
            switch (f2[b]) {
            case Stat::Mean: v = m.mean; break;
            case Stat::Std: v = m.stddev; break;
            case Stat::Skew: v = m.skew; break;
            case Stat::Kurtosis: v = m.kurtosis; break;
            }
            out.push_back(v);
            if (names)
                names->push_back(prefix + "_" + stat_name(f1[a]) + "_" + stat_name(f2[b]));
        }
    }
}

} // namespace

std::vector<double> glcm_matrix(const Plane& block, int bit_depth, const GlcmSpec& spec) {
    if (spec.levels < 2) throw ValidationError("glcm: need at least 2 gray levels");
    const int L = spec.levels;
    std::vector<double> mat(static_cast<size_t>(L) * L, 0.0);
    const int full = 1 << bit_depth;

    auto level_of = [&](float v) {
        int q = static_cast<int>(static_cast<long long>(v) * L / full);
        return std::clamp(q, 0, L - 1);
    };

    double total = 0.0;
    for (const auto& [dy, dx] : spec.offsets) {
        for (int y = 0; y < block.height; ++y) {
            const int yy = y + dy;
            if (yy < 0 || yy >= block.height) continue;
            for (int x = 0; x < block.width; ++x) {
                const int xx = x + dx;
                if (xx < 0 || xx >= block.width) continue;
                const int a = level_of(block.at(y, x));
                const int b = level_of(block.at(yy, xx));
                mat[static_cast<size_t>(a) * L + b] += 1.0;
                total += 1.0;
                if (spec.symmetric) {
                    mat[static_cast<size_t>(b) * L + a] += 1.0;
                    total += 1.0;
                }
            }
        }
    }
    if (total > 0.0)
        for (double& v : mat) v /= total;
    return mat;
}

GlcmProps glcm_properties(const std::vector<double>& matrix, int levels) {
    GlcmProps p;
    double asm_ = 0.0;
    double mu_i = 0.0, mu_j = 0.0;
    for (int i = 0; i < levels; ++i) {
        for (int j = 0; j < levels; ++j) {
            const double v = matrix[static_cast<size_t>(i) * levels + j];
            if (v == 0.0) continue;
            const int d = i - j;
            p.contrast += d * d * v;
            p.homogeneity += v / (1.0 + d * d);
            asm_ += v * v;
            mu_i += i * v;
            mu_j += j * v;
        }
    }
    p.energy = std::sqrt(asm_);
    double var_i = 0.0, var_j = 0.0, cov = 0.0;
    for (int i = 0; i < levels; ++i) {
        for (int j = 0; j < levels; ++j) {
            const double v = matrix[static_cast<size_t>(i) * levels + j];
            if (v == 0.0) continue;
            var_i += (i - mu_i) * (i - mu_i) * v;
            var_j += (j - mu_j) * (j - mu_j) * v;
            cov += (i - mu_i) * (j - mu_j) * v;
        }
    }
    const double denom = std::sqrt(var_i * var_j);
    p.correlation = denom > 0.0 ? cov / denom : 0.0; // degenerate marginals
    return p;
}

std::vector<double> glcm_features(const VideoClip& clip, const LlfConfig& config,
                                  std::vector<std::string>* names) {
    const int bs = config.glcm.block;
    if (clip.width < bs || clip.height < bs)
        throw ValidationError("glcm_features: frame smaller than one block");
    const int bx = clip.width / bs;
    const int by = clip.height / bs;

    // per property, per F1 stat: one value per frame
    const char* prop_names[4] = {"glcm_correlation", "glcm_contrast", "glcm_energy",
                                 "glcm_homogeneity"};
    std::array<std::array<std::vector<double>, 2>, 4> series; // [prop][f1] -> frames

    for (const Frame& f : clip.frames) {
        std::array<std::vector<double>, 4> block_vals;
        for (int iy = 0; iy < by; ++iy) {
            for (int ix = 0; ix < bx; ++ix) {
                const Plane block = crop_block(f.luma, iy * bs, ix * bs, bs);
                const auto mat = glcm_matrix(block, clip.bit_depth, config.glcm);
                const GlcmProps p = glcm_properties(mat, config.glcm.levels);
                block_vals[0].push_back(p.correlation);
                block_vals[1].push_back(p.contrast);
                block_vals[2].push_back(p.energy);
                block_vals[3].push_back(p.homogeneity);
            }
        }
        for (int prop = 0; prop < 4; ++prop) {
            const Moments m = compute_moments(std::span<const double>(block_vals[prop]));
            series[prop][0].push_back(m.mean);
            series[prop][1].push_back(m.stddev);
        }
    }

    std::vector<double> out;
    for (int prop = 0; prop < 4; ++prop) {
        std::array<std::vector<double>, 2> per_frame{series[prop][0], series[prop][1]};
        pool_two_level(per_frame, kOrderedTwo, kOrderedFour, prop_names[prop], out, names);
    }
    return out;
}

std::vector<double> temporal_coherence(const VideoClip& clip, const LlfConfig& config,
                                       std::vector<std::string>* names) {
    if (clip.frame_count() < 2)
        throw ValidationError("temporal_coherence: need at least 2 frames");
    const int bs = config.coherence_block;
    if (clip.width < bs || clip.height < bs)
        throw ValidationError("temporal_coherence: frame smaller than one block");
    const int bx = clip.width / bs;
    const int by = clip.height / bs;

    std::array<std::vector<double>, 4> per_pair; // F1 stats over blocks, one per frame pair
    for (size_t i = 1; i < clip.frames.size(); ++i) {
        const Plane& prev = clip.frames[i - 1].luma;
        const Plane& cur = clip.frames[i].luma;
        std::vector<double> coh;
        coh.reserve(static_cast<size_t>(bx) * by);
        for (int iy = 0; iy < by; ++iy) {
            for (int ix = 0; ix < bx; ++ix) {
                const int y0 = iy * bs, x0 = ix * bs;
                Plane diff(bs, bs);
                for (int y = 0; y < bs; ++y)
                    for (int x = 0; x < bs; ++x)
                        diff.at(y, x) = cur.at(y0 + y, x0 + x) - prev.at(y0 + y, x0 + x);
                const double vd = plane_variance(diff, 0, 0, bs);
                const double va = plane_variance(cur, y0, x0, bs);
                const double vb = plane_variance(prev, y0, x0, bs);
                coh.push_back(vd / (va + vb + config.coherence_epsilon));
            }
        }
        const Moments m = compute_moments(std::span<const double>(coh));
        per_pair[0].push_back(m.mean);
        per_pair[1].push_back(m.stddev);
        per_pair[2].push_back(m.skew);
        per_pair[3].push_back(m.kurtosis);
    }

    std::vector<double> out;
    pool_two_level(per_pair, kOrderedFour, kOrderedTwo, "tc", out, names);
    return out;
}

namespace {

Plane sobel_magnitude(const Plane& p) {
    // valid interior only; a constant plane produces an all-zero result
    Plane mag(std::max(0, p.width - 2), std::max(0, p.height - 2));
    for (int y = 1; y + 1 < p.height; ++y) {
        for (int x = 1; x + 1 < p.width; ++x) {
            const double gx = -p.at(y - 1, x - 1) + p.at(y - 1, x + 1) - 2.0 * p.at(y, x - 1) +
                              2.0 * p.at(y, x + 1) - p.at(y + 1, x - 1) + p.at(y + 1, x + 1);
            const double gy = -p.at(y - 1, x - 1) - 2.0 * p.at(y - 1, x) - p.at(y - 1, x + 1) +
                              p.at(y + 1, x - 1) + 2.0 * p.at(y + 1, x) + p.at(y + 1, x + 1);
            mag.at(y - 1, x - 1) = static_cast<float>(std::sqrt(gx * gx + gy * gy));
        }
    }
    return mag;
}

// Hasler-Susstrunk colorfulness on opponent channels. The rg/yb axes are
// linear in the centered chroma planes (BT.709), so no RGB conversion is
// needed and the metric is computed at chroma resolution.
double colorfulness(const Frame& f, int bit_depth) {
    const double center = static_cast<double>(1u << (bit_depth - 1));
    const size_t n = f.chroma_u.size();
    double sum_rg = 0.0, sum_yb = 0.0, sq_rg = 0.0, sq_yb = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double cb = f.chroma_u.samples[i] - center;
        const double cr = f.chroma_v.samples[i] - center;
        const double rg = 0.18732 * cb + 2.04292 * cr;
        const double yb = 0.55334 * cr - 1.94926 * cb;
        sum_rg += rg;
        sum_yb += yb;
        sq_rg += rg * rg;
        sq_yb += yb * yb;
    }
    const double nn = static_cast<double>(n);
    const double mu_rg = sum_rg / nn, mu_yb = sum_yb / nn;
    const double var_rg = std::max(0.0, sq_rg / nn - mu_rg * mu_rg);
    const double var_yb = std::max(0.0, sq_yb / nn - mu_yb * mu_yb);
    return std::sqrt(var_rg + var_yb) + 0.3 * std::sqrt(mu_rg * mu_rg + mu_yb * mu_yb);
}

} // namespace

std::vector<double> si_ti_cti_cf_ci(const VideoClip& clip, const LlfConfig& config,
                                    std::vector<std::string>* names) {
    if (clip.frame_count() < 2) throw ValidationError("si_ti_cti_cf_ci: need at least 2 frames");

    std::array<std::vector<double>, 2> si, ti, cti, ci_u, ci_v;
    std::vector<double> cf;

    for (const Frame& f : clip.frames) {
        const Plane mag = sobel_magnitude(f.luma);
        const Moments ms = compute_moments(std::span<const float>(mag.samples));
        si[0].push_back(ms.mean);
        si[1].push_back(ms.stddev);

        const Moments my = compute_moments(std::span<const float>(f.luma.samples));
        cti[0].push_back(my.mean);
        cti[1].push_back(my.stddev);

        cf.push_back(colorfulness(f, clip.bit_depth));

        const Moments mu = compute_moments(std::span<const float>(f.chroma_u.samples));
        ci_u[0].push_back(mu.mean);
        ci_u[1].push_back(mu.stddev);
        const Moments mv = compute_moments(std::span<const float>(f.chroma_v.samples));
        ci_v[0].push_back(config.chroma_v_weight * mv.mean);
        ci_v[1].push_back(config.chroma_v_weight * mv.stddev);
    }
    for (const Plane& d : luma_differences(clip)) {
        const Moments md = compute_moments(std::span<const float>(d.samples));
        ti[0].push_back(md.mean);
        ti[1].push_back(md.stddev);
    }

    std::vector<double> out;
    pool_two_level(si, kOrderedTwo, kOrderedFour, "si", out, names);
    pool_two_level(ti, kOrderedTwo, kOrderedFour, "ti", out, names);
    pool_two_level(cti, kOrderedTwo, kOrderedFour, "cti", out, names);
    {
        const Moments m = compute_moments(std::span<const double>(cf));
        const double vals[4] = {m.mean, m.stddev, m.skew, m.kurtosis};
        for (int i = 0; i < 4; ++i) {
            out.push_back(vals[i]);
            if (names) names->push_back(std::string("cf_") + stat_name(kOrderedFour[i]));
        }
    }
    pool_two_level(ci_u, kOrderedTwo, kOrderedFour, "ci_u", out, names);
    pool_two_level(ci_v, kOrderedTwo, kOrderedFour, "ci_v", out, names);
    return out;
}

namespace {

Eigen::MatrixXd dct_basis(int n) {
    Eigen::MatrixXd t(n, n);
    const double c0 = std::sqrt(1.0 / n);
    const double ck = std::sqrt(2.0 / n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            t(k, i) = (k == 0 ? c0 : ck) * std::cos(M_PI * (2.0 * i + 1.0) * k / (2.0 * n));
    return t;
}

struct PlaneDctStats {
    double E = 0.0; // mean |AC|, pooled over frames
    double h = 0.0; // mean |DCT_t - DCT_{t-1}|, pooled over frame pairs
    double L = 0.0; // mean sqrt(DC), pooled over frames
};

PlaneDctStats plane_dct_stats(const VideoClip& clip, int which, int block) {
    auto plane_of = [&](const Frame& f) -> const Plane& {
        return which == 0 ? f.luma : which == 1 ? f.chroma_u : f.chroma_v;
    };
    const Plane& first = plane_of(clip.frames.front());
    const int bx = first.width / block;
    const int by = first.height / block;
    if (bx == 0 || by == 0) throw ValidationError("dct_texture: plane smaller than one DCT block");

    static thread_local std::map<int, Eigen::MatrixXd> basis_cache;
    auto it = basis_cache.find(block);
    if (it == basis_cache.end()) it = basis_cache.emplace(block, dct_basis(block)).first;
    const Eigen::MatrixXd& T = it->second;

    const int nblocks = bx * by;
    const double coeffs = static_cast<double>(block) * block;
    std::vector<Eigen::MatrixXd> prev(static_cast<size_t>(nblocks));
    std::vector<double> e_frames, l_frames, h_pairs;

    Eigen::MatrixXd b(block, block);
    for (size_t fi = 0; fi < clip.frames.size(); ++fi) {
        const Plane& p = plane_of(clip.frames[fi]);
        double e_sum = 0.0, l_sum = 0.0, h_sum = 0.0;
        int bi = 0;
        for (int iy = 0; iy < by; ++iy) {
            for (int ix = 0; ix < bx; ++ix, ++bi) {
                for (int y = 0; y < block; ++y)
                    for (int x = 0; x < block; ++x)
                        b(y, x) = p.at(iy * block + y, ix * block + x);
                Eigen::MatrixXd d = T * b * T.transpose();
                e_sum += d.cwiseAbs().sum() - std::fabs(d(0, 0));
                l_sum += std::sqrt(std::max(0.0, d(0, 0)));
                if (fi > 0) h_sum += (d - prev[bi]).cwiseAbs().sum();
                prev[bi] = std::move(d);
            }
        }
        e_frames.push_back(e_sum / (nblocks * (coeffs - 1.0)));
        l_frames.push_back(l_sum / nblocks);
        if (fi > 0) h_pairs.push_back(h_sum / (nblocks * coeffs));
    }

    PlaneDctStats s;
    s.E = compute_moments(std::span<const double>(e_frames)).mean;
    s.L = compute_moments(std::span<const double>(l_frames)).mean;
    s.h = compute_moments(std::span<const double>(h_pairs)).mean;
    return s;
}

} // namespace

DctTextureTriple dct_texture(const VideoClip& clip, const LlfConfig& config) {
    if (clip.frame_count() < 2) throw ValidationError("dct_texture: need at least 2 frames");
    DctTextureTriple t;
    for (int plane = 0; plane < 3; ++plane) {
        const PlaneDctStats s = plane_dct_stats(clip, plane, config.dct_block);
        t.E[plane] = s.E;
        t.h[plane] = s.h;
        t.L[plane] = s.L;
    }
    return t;
}

double dct_log_ratio(double h, double E, const LlfConfig& config) {
    const double floor = config.log_energy_floor;
    if (h <= 0.0 || E <= 0.0) return floor;
    return std::clamp(std::log2(std::sqrt(h / E)), floor, -floor);
}

int llf_feature_count(int set_id) {
    switch (set_id) {
    case 1: return 93;
    case 2: return 96;
    case 3: return 96;
    default: throw ValidationError("llf set id must be in 1..3");
    }
}

FeatureVector extract_llf(const VideoClip& clip, int set_id, std::optional<double> bitrate_kbps,
                          std::optional<double> quality, const LlfConfig& config) {
    const int expected = llf_feature_count(set_id);
    if (set_id == 2 && !bitrate_kbps)
        throw ValidationError("llf2 requires the encode bitrate");
    if (set_id == 3 && !quality) throw ValidationError("llf3 requires the encode quality score");
    if (bitrate_kbps && *bitrate_kbps <= 0.0)
        throw ValidationError("llf: bitrate must be positive");

    FeatureVector fv;
    char label[8];
    std::snprintf(label, sizeof(label), "llf%d", set_id);
    fv.set_id = label;

    auto append = [&fv](const std::vector<double>& vals, const std::vector<std::string>& names) {
        for (size_t i = 0; i < vals.size(); ++i) fv.push(names[i], vals[i]);
    };

    std::vector<std::string> names;
    std::vector<double> vals = glcm_features(clip, config, &names);
    append(vals, names);
    names.clear();
    vals = temporal_coherence(clip, config, &names);
    append(vals, names);
    names.clear();
    vals = si_ti_cti_cf_ci(clip, config, &names);
    append(vals, names);

    const DctTextureTriple t = dct_texture(clip, config);
    const char* suffix[3] = {"y", "u", "v"};
    for (int p = 0; p < 3; ++p) {
        fv.push(std::string("dct_spatial_") + suffix[p], t.E[p]);
        fv.push(std::string("dct_temporal_") + suffix[p], t.h[p]);
        fv.push(std::string("dct_lum_") + suffix[p], t.L[p]);
    }

    if (set_id == 2) {
        const double lb = 2.0 * std::log2(*bitrate_kbps);
        for (int p = 0; p < 3; ++p)
            fv.push(std::string("bitrate_dct_") + suffix[p],
                    dct_log_ratio(t.h[p], t.E[p], config) + lb);
    } else if (set_id == 3) {
        for (int p = 0; p < 3; ++p)
            fv.push(std::string("vmaf_dct_") + suffix[p],
                    0.5 * (*quality - dct_log_ratio(t.h[p], t.E[p], config)));
    }

    if (static_cast<int>(fv.size()) != expected) throw Error("extract_llf: feature count mismatch");
    return fv;
}

} // namespace shotladder
