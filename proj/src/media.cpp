#include "shotladder/media.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "shotladder/error.hpp"

namespace shotladder {

namespace {

constexpr const char* kStreamMagic = "YUV4MPEG2";
constexpr const char* kFrameMagic = "FRAME";

struct StreamHeader {
    int width = 0;
    int height = 0;
    int fps_num = 25;
    int fps_den = 1;
    int bit_depth = 8;
};

StreamHeader parse_stream_header(const std::string& line) {
    StreamHeader h;
    std::istringstream tokens(line);
    std::string tok;
    tokens >> tok; // magic, already checked
    std::string colorspace = "420";
    while (tokens >> tok) {
        if (tok.empty()) continue;
        switch (tok[0]) {
        case 'W': h.width = std::atoi(tok.c_str() + 1); break;
        case 'H': h.height = std::atoi(tok.c_str() + 1); break;
        case 'F': {
            if (std::sscanf(tok.c_str() + 1, "%d:%d", &h.fps_num, &h.fps_den) != 2 ||
                h.fps_num <= 0 || h.fps_den <= 0)
                throw FormatError("y4m: malformed frame-rate token '" + tok + "'");
            break;
        }
        case 'I':
            if (tok.size() > 1 && tok[1] != 'p')
                throw FormatError("y4m: interlaced content is unsupported");
            break;
        case 'C': colorspace = tok.substr(1); break;
        case 'A':
        case 'X': break; // aspect ratio / extensions: ignored
        default: break;
        }
    }
    if (colorspace == "420" || colorspace == "420jpeg" || colorspace == "420mpeg2" ||
        colorspace == "420paldv") {
        h.bit_depth = 8;
    } else if (colorspace == "420p10") {
        h.bit_depth = 10;
    } else {
        throw FormatError("y4m: unsupported chroma layout 'C" + colorspace +
                          "' (only 4:2:0 at 8 or 10 bit)");
    }
    if (h.width <= 0 || h.height <= 0)
        throw FormatError("y4m: missing or invalid W/H in stream header");
    if (h.width % 2 != 0 || h.height % 2 != 0)
        throw FormatError("y4m: 4:2:0 requires even dimensions");
    return h;
}

bool read_line(std::istream& in, std::string& line) {
    line.clear();
    char c;
    while (in.get(c)) {
        if (c == '\n') return true;
        line.push_back(c);
        if (line.size() > 4096) throw FormatError("y4m: unterminated header line");
    }
    return false;
}

Plane read_plane(std::istream& in, int w, int h, int bit_depth, const char* what) {
    Plane p(w, h);
    const size_t n = p.size();
    if (bit_depth == 8) {
        std::vector<uint8_t> buf(n);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
        if (static_cast<size_t>(in.gcount()) != n)
            throw FormatError(std::string("y4m: truncated ") + what + " plane payload");
        for (size_t i = 0; i < n; ++i) p.samples[i] = static_cast<float>(buf[i]);
    } else {
        std::vector<uint8_t> buf(n * 2);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n * 2));
        if (static_cast<size_t>(in.gcount()) != n * 2)
            throw FormatError(std::string("y4m: truncated ") + what + " plane payload");
        for (size_t i = 0; i < n; ++i) {
            const uint16_t v = static_cast<uint16_t>(buf[2 * i] | (buf[2 * i + 1] << 8));
            p.samples[i] = static_cast<float>(v);
        }
    }
    return p;
}

void write_plane(const Plane& p, int bit_depth, std::ostream& out) {
    const float max_v = static_cast<float>((1u << bit_depth) - 1);
    if (bit_depth == 8) {
        std::vector<uint8_t> buf(p.size());
        for (size_t i = 0; i < p.size(); ++i) {
            const float v = std::clamp(std::round(p.samples[i]), 0.0f, max_v);
            buf[i] = static_cast<uint8_t>(v);
        }
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    } else {
        std::vector<uint8_t> buf(p.size() * 2);
        for (size_t i = 0; i < p.size(); ++i) {
            const float v = std::clamp(std::round(p.samples[i]), 0.0f, max_v);
            const uint16_t u = static_cast<uint16_t>(v);
            buf[2 * i] = static_cast<uint8_t>(u & 0xff);
            buf[2 * i + 1] = static_cast<uint8_t>(u >> 8);
        }
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    }
}

} // namespace

VideoClip parse_y4m(std::istream& in) {
    std::string line;
    if (!read_line(in, line) || line.rfind(kStreamMagic, 0) != 0)
        throw FormatError("y4m: stream does not begin with a YUV4MPEG2 header");
    const StreamHeader h = parse_stream_header(line);

    VideoClip clip;
    clip.width = h.width;
    clip.height = h.height;
    clip.bit_depth = h.bit_depth;
    clip.fps_num = h.fps_num;
    clip.fps_den = h.fps_den;

    const int cw = h.width / 2;
    const int ch = h.height / 2;
    while (true) {
        if (!read_line(in, line)) {
            if (!line.empty()) throw FormatError("y4m: truncated frame header");
            break; // clean EOF before a frame header
        }
        if (line.rfind(kFrameMagic, 0) != 0)
            throw FormatError("y4m: expected FRAME marker, got '" + line.substr(0, 16) + "'");
        Frame f;
        f.luma = read_plane(in, h.width, h.height, h.bit_depth, "luma");
        f.chroma_u = read_plane(in, cw, ch, h.bit_depth, "chroma");
        f.chroma_v = read_plane(in, cw, ch, h.bit_depth, "chroma");
        clip.frames.push_back(std::move(f));
    }
    if (clip.frames.empty()) throw FormatError("y4m: stream contains no frames");
    return clip;
}

VideoClip parse_y4m_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    return parse_y4m(in);
}

void write_y4m(const VideoClip& clip, std::ostream& out) {
    char header[128];
    std::snprintf(header, sizeof(header), "%s W%d H%d F%d:%d Ip A1:1 C%s\n", kStreamMagic,
                  clip.width, clip.height, clip.fps_num, clip.fps_den,
                  clip.bit_depth == 10 ? "420p10" : "420");
    out << header;
    for (const Frame& f : clip.frames) {
        out << kFrameMagic << '\n';
        write_plane(f.luma, clip.bit_depth, out);
        write_plane(f.chroma_u, clip.bit_depth, out);
        write_plane(f.chroma_v, clip.bit_depth, out);
    }
}

void write_y4m_file(const VideoClip& clip, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    write_y4m(clip, out);
}

std::vector<Plane> luma_differences(const VideoClip& clip) {
    if (clip.frame_count() < 2)
        throw ValidationError("luma_differences needs at least 2 frames");
    std::vector<Plane> diffs;
    diffs.reserve(clip.frames.size() - 1);
    for (size_t i = 1; i < clip.frames.size(); ++i) {
        const Plane& a = clip.frames[i - 1].luma;
        const Plane& b = clip.frames[i].luma;
        Plane d(b.width, b.height);
        for (size_t k = 0; k < d.size(); ++k) d.samples[k] = b.samples[k] - a.samples[k];
        diffs.push_back(std::move(d));
    }
    return diffs;
}

double mean_abs(const Plane& plane) {
    if (plane.size() == 0) throw ValidationError("mean_abs of empty plane");
    double sum = 0.0;
    for (float v : plane.samples) sum += std::fabs(static_cast<double>(v));
    return sum / static_cast<double>(plane.size());
}

} // namespace shotladder
