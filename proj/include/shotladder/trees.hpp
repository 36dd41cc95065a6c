#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace shotladder {

struct TreesParams {
    int n_trees = 100;
    int min_samples_split = 2;
    int max_features = 0; // 0 = use all features
    int max_depth = 0;    // 0 = unlimited
    uint64_t rng_seed = 0;
};

// Binary regression tree stored as a flat node array. feature < 0 marks a
// leaf; `gain` records the impurity decrease of the split for importance
// accounting.
struct TreeNode {
    int32_t feature = -1;
    double threshold = 0.0;
    int32_t left = -1;
    int32_t right = -1;
    double value = 0.0;
    double gain = 0.0;
};

struct Tree {
    std::vector<TreeNode> nodes;
    double predict(std::span<const double> features) const;
};

struct TreesModel {
    std::vector<Tree> trees;
    std::vector<std::string> feature_names;
    std::string target_name;
    TreesParams params;

    size_t dimensionality() const { return feature_names.size(); }
};

struct TrainingMatrix {
    std::vector<std::vector<double>> rows;
    std::vector<double> targets;
    std::vector<std::string> groups; // video id per row
    std::vector<std::string> feature_names;
    std::string target_name;
};

// Extremely randomized trees: every tree sees the full sample set, splits
// draw one uniform threshold per candidate feature and keep the best by
// variance reduction. Deterministic given params.rng_seed; rows are
// canonically re-ordered by (group, row hash) before fitting so ingestion
// order cannot change the model.
TreesModel fit(const TrainingMatrix& data, const TreesParams& params);

double predict(const TreesModel& model, std::span<const double> features);

// Normalized total variance reduction per feature; sums to 1 when the
// model contains at least one split.
std::vector<double> feature_importance(const TreesModel& model);

// Recursive feature elimination down to target_count features. Returns
// the surviving indices in their original order.
std::vector<int> rfe_select(const TrainingMatrix& data, int target_count,
                            const TreesParams& params);

// Versioned little-endian binary model payload. load(save(m)) predicts
// identically to m.
std::vector<uint8_t> save_model(const TreesModel& model);
TreesModel load_model(std::span<const uint8_t> payload);
void save_model_file(const TreesModel& model, const std::string& path);
TreesModel load_model_file(const std::string& path);

} // namespace shotladder
