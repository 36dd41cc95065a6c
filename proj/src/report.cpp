#include "shotladder/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "shotladder/error.hpp"

namespace shotladder {

double pearson(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty())
        throw ValidationError("pearson: size mismatch or empty input");
    const double n = static_cast<double>(a.size());
    double sa = 0, sb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        sa += a[i];
        sb += b[i];
    }
    const double ma = sa / n, mb = sb / n;
    double cov = 0, va = 0, vb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    const double denom = std::sqrt(va * vb);
    return denom > 0.0 ? cov / denom : 0.0;
}

TrainingReport training_report(const TreesModel& model, const RQDataset& eval_points,
                               const std::map<std::string, FeatureVector>& features,
                               PredictionTask task) {
    std::map<Resolution, std::pair<std::vector<double>, std::vector<double>>> by_res;
    for (const RQPoint& p : eval_points.points) {
        auto it = features.find(p.video_id);
        if (it == features.end())
            throw ValidationError("training_report: missing features for '" + p.video_id + "'");
        std::vector<double> row = it->second.values;
        double target;
        if (task == PredictionTask::Quality) {
            row.push_back(p.log2_bitrate());
            target = p.quality / 100.0;
        } else {
            row.push_back(p.quality / 100.0);
            target = p.log2_bitrate();
        }
        row.push_back(p.width / kDimensionNorm);
        row.push_back(p.height / kDimensionNorm);
        auto& [preds, targets] = by_res[p.resolution()];
        preds.push_back(predict(model, row));
        targets.push_back(target);
    }

    TrainingReport report;
    for (auto it = by_res.rbegin(); it != by_res.rend(); ++it) { // high resolution first
        TrainingReport::Row row;
        row.resolution = it->first;
        row.n = static_cast<int>(it->second.first.size());
        row.plcc = row.n > 1 ? pearson(it->second.first, it->second.second) : 0.0;
        report.rows.push_back(row);
    }
    return report;
}

std::string TrainingReport::to_csv() const {
    std::ostringstream out;
    out << "resolution,n,plcc\n";
    char buf[96];
    for (const Row& r : rows) {
        std::snprintf(buf, sizeof(buf), "%dx%d,%d,%.4f\n", r.resolution.width,
                      r.resolution.height, r.n, r.plcc);
        out << buf;
    }
    return out.str();
}

namespace {

struct Bounds {
    double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
};

Bounds series_bounds(const std::vector<PlotSeries>& series) {
    Bounds b;
    bool first = true;
    for (const PlotSeries& s : series) {
        for (const auto& [x, y] : s.xy) {
            if (first) {
                b = {x, x, y, y};
                first = false;
            } else {
                b.x_lo = std::min(b.x_lo, x);
                b.x_hi = std::max(b.x_hi, x);
                b.y_lo = std::min(b.y_lo, y);
                b.y_hi = std::max(b.y_hi, y);
            }
        }
    }
    if (b.x_hi - b.x_lo < 1e-9) b.x_hi = b.x_lo + 1.0;
    if (b.y_hi - b.y_lo < 1e-9) b.y_hi = b.y_lo + 1.0;
    return b;
}

} // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series) {
    const int width = 760, height = 520;
    const double ml = 64, mr = 170, mt = 42, mb = 48;
    const Bounds b = series_bounds(series);

    auto sx = [&](double x) { return ml + (x - b.x_lo) / (b.x_hi - b.x_lo) * (width - ml - mr); };
    auto sy = [&](double y) {
        return height - mb - (y - b.y_lo) / (b.y_hi - b.y_lo) * (height - mt - mb);
    };

    std::ofstream out(path);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    char buf[512];
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\" "
                  "text-anchor=\"middle\">%s</text>\n",
                  width / 2, title.c_str());
    out << buf;

    // axes and ticks
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  ml, height - mb, width - mr, height - mb);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                  ml, mt, ml, height - mb);
    out << buf;
    for (int i = 0; i <= 5; ++i) {
        const double fx = b.x_lo + (b.x_hi - b.x_lo) * i / 5.0;
        const double fy = b.y_lo + (b.y_hi - b.y_lo) * i / 5.0;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" "
                      "text-anchor=\"middle\">%.4g</text>\n",
                      sx(fx), height - mb + 16.0, fx);
        out << buf;
        std::snprintf(buf, sizeof(buf),
                      "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" "
                      "text-anchor=\"end\">%.4g</text>\n",
                      ml - 6.0, sy(fy) + 4.0, fy);
        out << buf;
        std::snprintf(buf, sizeof(buf),
                      "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#dddddd\"/>\n",
                      sx(fx), mt, sx(fx), height - mb);
        out << buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\" "
                  "text-anchor=\"middle\">%s</text>\n",
                  width / 2, height - 10, x_label.c_str());
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"16\" y=\"%d\" font-family=\"sans-serif\" font-size=\"12\" "
                  "text-anchor=\"middle\" transform=\"rotate(-90 16 %d)\">%s</text>\n",
                  height / 2, height / 2, y_label.c_str());
    out << buf;

    int legend_y = static_cast<int>(mt) + 10;
    for (const PlotSeries& s : series) {
        if (s.xy.empty()) continue;
        if (s.line && s.xy.size() > 1) {
            out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.6\" points=\"";
            for (const auto& [x, y] : s.xy) {
                std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", sx(x), sy(y));
                out << buf;
            }
            out << "\"/>\n";
        }
        if (s.markers) {
            for (const auto& [x, y] : s.xy) {
                std::snprintf(buf, sizeof(buf),
                              "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"2.6\" fill=\"%s\"/>\n", sx(x),
                              sy(y), s.color.c_str());
                out << buf;
            }
        }
        std::snprintf(buf, sizeof(buf),
                      "<rect x=\"%d\" y=\"%d\" width=\"14\" height=\"4\" fill=\"%s\"/>"
                      "<text x=\"%d\" y=\"%d\" font-family=\"sans-serif\" font-size=\"11\">%s"
                      "</text>\n",
                      width - static_cast<int>(mr) + 12, legend_y - 4, s.color.c_str(),
                      width - static_cast<int>(mr) + 32, legend_y, s.label.c_str());
        out << buf;
        legend_y += 18;
    }
    out << "</svg>\n";
}

} // namespace shotladder
