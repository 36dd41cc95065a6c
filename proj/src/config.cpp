#include "shotladder/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

#include "shotladder/error.hpp"

namespace shotladder {

Resolution parse_resolution(const std::string& text) {
    Resolution r;
    char extra;
    if (std::sscanf(text.c_str(), "%dx%d%c", &r.width, &r.height, &extra) != 2 || r.width <= 0 ||
        r.height <= 0)
        throw ValidationError("bad resolution '" + text + "' (expected WxH)");
    return r;
}

Config default_config() {
    Config c;
    c.grid = default_grid_config();
    c.ladder = default_ladder_config();
    c.synth = default_synth_config();
    return c;
}

namespace {

std::string trim(const std::string& s) {
    const size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Value {
    bool is_string = false;
    std::string str;
    double num = 0.0;
    bool is_list = false;
    std::vector<Value> items;
};

Value parse_scalar(const std::string& raw, int line_no) {
    Value v;
    if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') {
        v.is_string = true;
        v.str = raw.substr(1, raw.size() - 2);
        return v;
    }
    if (raw == "true" || raw == "false") {
        v.num = raw == "true" ? 1.0 : 0.0;
        return v;
    }
    char* end = nullptr;
    v.num = std::strtod(raw.c_str(), &end);
    if (end != raw.c_str() + raw.size())
        throw ValidationError("config line " + std::to_string(line_no) + ": bad value '" + raw +
                              "'");
    return v;
}

Value parse_value(const std::string& raw, int line_no) {
    if (raw.empty())
        throw ValidationError("config line " + std::to_string(line_no) + ": empty value");
    if (raw.front() != '[') return parse_scalar(raw, line_no);
    if (raw.back() != ']')
        throw ValidationError("config line " + std::to_string(line_no) + ": unterminated array");

    Value v;
    v.is_list = true;
    std::string body = raw.substr(1, raw.size() - 2);
    std::string cur;
    bool in_string = false;
    for (char ch : body) {
        if (ch == '"') in_string = !in_string;
        if (ch == ',' && !in_string) {
            const std::string t = trim(cur);
            if (!t.empty()) v.items.push_back(parse_scalar(t, line_no));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    const std::string t = trim(cur);
    if (!t.empty()) v.items.push_back(parse_scalar(t, line_no));
    return v;
}

std::vector<double> num_list(const Value& v, const std::string& key) {
    if (!v.is_list) throw ValidationError("config key '" + key + "' expects an array");
    std::vector<double> out;
    for (const Value& e : v.items) {
        if (e.is_string) throw ValidationError("config key '" + key + "' expects numbers");
        out.push_back(e.num);
    }
    return out;
}

std::vector<std::string> str_list(const Value& v, const std::string& key) {
    if (!v.is_list) throw ValidationError("config key '" + key + "' expects an array");
    std::vector<std::string> out;
    for (const Value& e : v.items) {
        if (!e.is_string) throw ValidationError("config key '" + key + "' expects strings");
        out.push_back(e.str);
    }
    return out;
}

std::vector<Resolution> resolution_list(const Value& v, const std::string& key) {
    std::vector<Resolution> out;
    for (const std::string& s : str_list(v, key)) out.push_back(parse_resolution(s));
    return out;
}

void apply(Config& c, const std::string& section, const std::string& key, const Value& v,
           int line_no) {
    auto num = [&]() -> double {
        if (v.is_list || v.is_string)
            throw ValidationError("config key '" + key + "' expects a number");
        return v.num;
    };
    auto str = [&]() -> std::string {
        if (!v.is_string) throw ValidationError("config key '" + key + "' expects a string");
        return v.str;
    };

    if (section == "grid") {
        if (key == "resolutions") c.grid.resolutions = resolution_list(v, key);
        else if (key == "crfs") {
            c.grid.crfs.clear();
            for (double d : num_list(v, key)) c.grid.crfs.push_back(static_cast<int>(d));
        } else if (key == "quality_min") c.grid.quality_min = num();
        else if (key == "quality_max") c.grid.quality_max = num();
        else if (key == "encoder_tag") c.grid.encoder_tag = str();
        else throw ValidationError("unknown config key grid." + key);
    } else if (section == "ladder") {
        if (key == "bitrate_steps") c.ladder.bitrate_steps = num_list(v, key);
        else if (key == "quality_steps") c.ladder.quality_steps = num_list(v, key);
        else throw ValidationError("unknown config key ladder." + key);
    } else if (section == "vif") {
        if (key == "sigma_n_sq") c.vif.sigma_n_sq = num();
        else if (key == "patch_size") c.vif.patch_size = static_cast<int>(num());
        else throw ValidationError("unknown config key vif." + key);
    } else if (section == "llf") {
        if (key == "glcm_levels") c.llf.glcm.levels = static_cast<int>(num());
        else if (key == "glcm_block") c.llf.glcm.block = static_cast<int>(num());
        else if (key == "glcm_symmetric") c.llf.glcm.symmetric = v.num != 0.0;
        else if (key == "glcm_offsets") {
            c.llf.glcm.offsets.clear();
            for (const std::string& s : str_list(v, key)) {
                int dy, dx;
                if (std::sscanf(s.c_str(), "%d,%d", &dy, &dx) != 2)
                    throw ValidationError("bad glcm offset '" + s + "'");
                c.llf.glcm.offsets.emplace_back(dy, dx);
            }
        } else if (key == "coherence_block") c.llf.coherence_block = static_cast<int>(num());
        else if (key == "coherence_epsilon") c.llf.coherence_epsilon = num();
        else if (key == "dct_block") c.llf.dct_block = static_cast<int>(num());
        else if (key == "log_energy_floor") c.llf.log_energy_floor = num();
        else if (key == "chroma_v_weight") c.llf.chroma_v_weight = num();
        else throw ValidationError("unknown config key llf." + key);
    } else if (section == "trees") {
        if (key == "n_trees") c.trees.n_trees = static_cast<int>(num());
        else if (key == "min_samples_split") c.trees.min_samples_split = static_cast<int>(num());
        else if (key == "max_features") c.trees.max_features = static_cast<int>(num());
        else if (key == "max_depth") c.trees.max_depth = static_cast<int>(num());
        else if (key == "rng_seed") c.trees.rng_seed = static_cast<uint64_t>(num());
        else throw ValidationError("unknown config key trees." + key);
    } else if (section == "synth") {
        if (key == "q_ceiling_top") c.synth.q_ceiling_top = num();
        else if (key == "q_ceiling_step") c.synth.q_ceiling_step = num();
        else if (key == "crf_pivot") c.synth.crf_pivot = num();
        else if (key == "crf_octave") c.synth.crf_octave = num();
        else if (key == "bitrate_base_kbps") c.synth.bitrate_base_kbps = num();
        else if (key == "bitrate_pixel_exponent") c.synth.bitrate_pixel_exponent = num();
        else if (key == "bitrate_jitter_octaves") c.synth.bitrate_jitter_octaves = num();
        else if (key == "slope_base") c.synth.slope_base = num();
        else if (key == "slope_step") c.synth.slope_step = num();
        else if (key == "slope_jitter") c.synth.slope_jitter = num();
        else if (key == "midpoint_offset") c.synth.midpoint_offset = num();
        else if (key == "midpoint_jitter") c.synth.midpoint_jitter = num();
        else if (key == "crossing_centers") c.synth.crossing_centers = num_list(v, key);
        else if (key == "crossing_jitters") c.synth.crossing_jitters = num_list(v, key);
        else if (key == "video_shift_min") c.synth.video_shift_min = num();
        else if (key == "video_shift_max") c.synth.video_shift_max = num();
        else if (key == "fixed_ladder_bias_octaves")
            c.synth.fixed_ladder_bias_octaves = num();
        else if (key == "feature_noise") c.synth.feature_noise = num();
        else throw ValidationError("unknown config key synth." + key);
    } else {
        throw ValidationError("config line " + std::to_string(line_no) + ": unknown section [" +
                              section + "]");
    }
}

std::string format_number(double v) {
    char buf[64];
    if (v == std::floor(v) && std::fabs(v) < 1e15) {
        std::snprintf(buf, sizeof(buf), "%.0f", v);
    } else {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
    }
    return buf;
}

template <typename T, typename F>
std::string join_array(const std::vector<T>& items, F fmt) {
    std::string out = "[";
    for (size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += fmt(items[i]);
    }
    return out + "]";
}

} // namespace

Config load_config(std::istream& in) {
    Config c = default_config();
    std::string section;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) {
            // keep '#' inside quoted strings
            size_t quotes = 0;
            for (size_t i = 0; i < hash; ++i)
                if (line[i] == '"') ++quotes;
            if (quotes % 2 == 0) line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("config line " + std::to_string(line_no) +
                                      ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(line_no) +
                                  ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const Value value = parse_value(trim(line.substr(eq + 1)), line_no);
        apply(c, section, key, value, line_no);
    }
    // the grid's resolution set is the single source for downstream modules
    c.ladder.resolutions = c.grid.resolutions;
    c.synth.resolutions = c.grid.resolutions;
    c.synth.crfs = c.grid.crfs;
    return c;
}

Config load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open " + path);
    return load_config(in);
}

std::string config_to_toml(const Config& c) {
    std::ostringstream out;
    auto res_fmt = [](const Resolution& r) {
        return "\"" + std::to_string(r.width) + "x" + std::to_string(r.height) + "\"";
    };
    auto num_fmt = [](double v) { return format_number(v); };
    auto int_fmt = [](int v) { return std::to_string(v); };

    out << "[grid]\n";
    out << "resolutions = " << join_array(c.grid.resolutions, res_fmt) << "\n";
    out << "crfs = " << join_array(c.grid.crfs, int_fmt) << "\n";
    out << "quality_min = " << format_number(c.grid.quality_min) << "\n";
    out << "quality_max = " << format_number(c.grid.quality_max) << "\n";
    out << "encoder_tag = \"" << c.grid.encoder_tag << "\"\n\n";

    out << "[ladder]\n";
    out << "bitrate_steps = " << join_array(c.ladder.bitrate_steps, num_fmt) << "\n";
    out << "quality_steps = " << join_array(c.ladder.quality_steps, num_fmt) << "\n\n";

    out << "[vif]\n";
    out << "sigma_n_sq = " << format_number(c.vif.sigma_n_sq) << "\n";
    out << "patch_size = " << c.vif.patch_size << "\n\n";

    out << "[llf]\n";
    out << "glcm_levels = " << c.llf.glcm.levels << "\n";
    out << "glcm_block = " << c.llf.glcm.block << "\n";
    out << "glcm_symmetric = " << (c.llf.glcm.symmetric ? "true" : "false") << "\n";
    out << "glcm_offsets = "
        << join_array(c.llf.glcm.offsets,
                      [](const std::pair<int, int>& o) {
                          return "\"" + std::to_string(o.first) + "," +
                                 std::to_string(o.second) + "\"";
                      })
        << "\n";
    out << "coherence_block = " << c.llf.coherence_block << "\n";
    out << "coherence_epsilon = " << format_number(c.llf.coherence_epsilon) << "\n";
    out << "dct_block = " << c.llf.dct_block << "\n";
    out << "log_energy_floor = " << format_number(c.llf.log_energy_floor) << "\n";
    out << "chroma_v_weight = " << format_number(c.llf.chroma_v_weight) << "\n\n";

    out << "[trees]\n";
    out << "n_trees = " << c.trees.n_trees << "\n";
    out << "min_samples_split = " << c.trees.min_samples_split << "\n";
    out << "max_features = " << c.trees.max_features << "\n";
    out << "max_depth = " << c.trees.max_depth << "\n";
    out << "rng_seed = " << c.trees.rng_seed << "\n\n";

    out << "[synth]\n";
    out << "q_ceiling_top = " << format_number(c.synth.q_ceiling_top) << "\n";
    out << "q_ceiling_step = " << format_number(c.synth.q_ceiling_step) << "\n";
    out << "crf_pivot = " << format_number(c.synth.crf_pivot) << "\n";
    out << "crf_octave = " << format_number(c.synth.crf_octave) << "\n";
    out << "bitrate_base_kbps = " << format_number(c.synth.bitrate_base_kbps) << "\n";
    out << "bitrate_pixel_exponent = " << format_number(c.synth.bitrate_pixel_exponent) << "\n";
    out << "bitrate_jitter_octaves = " << format_number(c.synth.bitrate_jitter_octaves) << "\n";
    out << "slope_base = " << format_number(c.synth.slope_base) << "\n";
    out << "slope_step = " << format_number(c.synth.slope_step) << "\n";
    out << "slope_jitter = " << format_number(c.synth.slope_jitter) << "\n";
    out << "midpoint_offset = " << format_number(c.synth.midpoint_offset) << "\n";
    out << "midpoint_jitter = " << format_number(c.synth.midpoint_jitter) << "\n";
    out << "crossing_centers = " << join_array(c.synth.crossing_centers, num_fmt) << "\n";
    out << "crossing_jitters = " << join_array(c.synth.crossing_jitters, num_fmt) << "\n";
    out << "video_shift_min = " << format_number(c.synth.video_shift_min) << "\n";
    out << "video_shift_max = " << format_number(c.synth.video_shift_max) << "\n";
    out << "fixed_ladder_bias_octaves = " << format_number(c.synth.fixed_ladder_bias_octaves)
        << "\n";
    out << "feature_noise = " << format_number(c.synth.feature_noise) << "\n";
    return out.str();
}

uint64_t config_hash(const Config& config) { return fnv1a64(config_to_toml(config)); }

} // namespace shotladder
