#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace shotladder {

// A single 2-D sample plane, row-major. Decoded samples are stored as
// float; integer sources up to 16 bit round-trip exactly.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<float> samples;

    Plane() = default;
    Plane(int w, int h, float fill = 0.0f)
        : width(w), height(h), samples(static_cast<size_t>(w) * h, fill) {}

    float at(int y, int x) const { return samples[static_cast<size_t>(y) * width + x]; }
    float& at(int y, int x) { return samples[static_cast<size_t>(y) * width + x]; }
    size_t size() const { return samples.size(); }
};

struct Frame {
    Plane luma;
    Plane chroma_u;
    Plane chroma_v;
};

// Decoded 4:2:0 clip. Chroma planes are half the luma size in both
// dimensions; all frames share dimensions and bit depth.
struct VideoClip {
    int width = 0;
    int height = 0;
    int bit_depth = 8;
    int fps_num = 25;
    int fps_den = 1;
    std::vector<Frame> frames;

    int frame_count() const { return static_cast<int>(frames.size()); }
    int chroma_width() const { return width / 2; }
    int chroma_height() const { return height / 2; }
    double max_sample() const { return static_cast<double>((1u << bit_depth) - 1); }
};

// Parse a YUV4MPEG2 stream. Supports 4:2:0 at 8 or 10 bit; anything else
// is rejected. Throws FormatError on malformed headers or truncated
// frame payloads.
VideoClip parse_y4m(std::istream& in);
VideoClip parse_y4m_file(const std::string& path);

// Write a clip back out as YUV4MPEG2 (C420 / C420p10). parse(write(clip))
// is sample-exact.
void write_y4m(const VideoClip& clip, std::ostream& out);
void write_y4m_file(const VideoClip& clip, const std::string& path);

// Signed luma difference planes D_i = F_i - F_{i-1} for i = 1..n-1.
// Throws on clips with fewer than two frames.
std::vector<Plane> luma_differences(const VideoClip& clip);

// Mean absolute sample value of a plane.
double mean_abs(const Plane& plane);

} // namespace shotladder
