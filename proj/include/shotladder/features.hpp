#pragma once

#include <span>
#include <string>
#include <vector>

namespace shotladder {

// Ordered, named scalar features plus the identifier of the set that
// produced them ("viff7", "llf2", ...). Order is part of the contract.
struct FeatureVector {
    std::string set_id;
    std::vector<std::string> names;
    std::vector<double> values;

    void push(std::string name, double value) {
        names.push_back(std::move(name));
        values.push_back(value);
    }
    size_t size() const { return values.size(); }
};

// Metadata feature names appended to content features when assembling
// model inputs. Fixed so models and builders agree on vector layout.
inline constexpr const char* kMetaLog2Bitrate = "log2_bitrate";
inline constexpr const char* kMetaQualityNorm = "quality_norm";
inline constexpr const char* kMetaWidthNorm = "width_norm";
inline constexpr const char* kMetaHeightNorm = "height_norm";

// Normalization anchor for width/height metadata (UHD source width).
inline constexpr double kDimensionNorm = 3840.0;

} // namespace shotladder
