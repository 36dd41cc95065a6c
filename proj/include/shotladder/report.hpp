#pragma once

#include <span>
#include <string>
#include <vector>

#include "shotladder/dataset.hpp"
#include "shotladder/rq.hpp"
#include "shotladder/trees.hpp"

namespace shotladder {

double pearson(std::span<const double> a, std::span<const double> b);

// Per-resolution linear correlation between model predictions and targets
// on a held-out point set.
struct TrainingReport {
    struct Row {
        Resolution resolution;
        int n = 0;
        double plcc = 0.0;
    };
    std::vector<Row> rows;
    std::string to_csv() const;
};

TrainingReport training_report(const TreesModel& model, const RQDataset& eval_points,
                               const std::map<std::string, FeatureVector>& features,
                               PredictionTask task);

// Minimal static SVG line plots for RQ curves and hulls.
struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> xy;
    std::string color = "#1f77b4";
    bool markers = false;
    bool line = true;
};

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& x_label, const std::string& y_label,
                    const std::vector<PlotSeries>& series);

} // namespace shotladder
