#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "shotladder/error.hpp"
#include "shotladder/trees.hpp"

using namespace shotladder;

namespace {

TrainingMatrix make_matrix(int n, int dim, uint64_t seed,
                           double (*target)(const std::vector<double>&)) {
    oracles::TestRng rng(seed);
    TrainingMatrix m;
    m.target_name = "y";
    for (int f = 0; f < dim; ++f) m.feature_names.push_back("x" + std::to_string(f));
    for (int i = 0; i < n; ++i) {
        std::vector<double> row(dim);
        for (double& v : row) v = rng.uniform01();
        m.targets.push_back(target(row));
        m.rows.push_back(std::move(row));
        m.groups.push_back("g" + std::to_string(i % 7));
    }
    return m;
}

double traversal_oracle(const TreesModel& model, std::span<const double> x) {
    double acc = 0.0;
    for (const Tree& t : model.trees) {
        size_t i = 0;
        while (t.nodes[i].feature >= 0) {
            i = x[static_cast<size_t>(t.nodes[i].feature)] < t.nodes[i].threshold
                    ? static_cast<size_t>(t.nodes[i].left)
                    : static_cast<size_t>(t.nodes[i].right);
        }
        acc += t.nodes[i].value;
    }
    return acc / static_cast<double>(model.trees.size());
}

} // namespace

TEST_CASE("constant target predicts exactly") {
    TrainingMatrix m = make_matrix(50, 3, 1, [](const std::vector<double>&) { return 7.0; });
    TreesParams p;
    p.n_trees = 20;
    const TreesModel model = fit(m, p);
    oracles::TestRng rng(2);
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> x{rng.uniform01(), rng.uniform01(), rng.uniform01()};
        CHECK(predict(model, x) == 7.0);
    }
}

TEST_CASE("y = x1 regression reaches held-out MAE < 0.05") {
    TrainingMatrix m =
        make_matrix(200, 1, 3, [](const std::vector<double>& r) { return r[0]; });
    TreesParams p;
    p.n_trees = 100;
    p.rng_seed = 11;
    const TreesModel model = fit(m, p);

    oracles::TestRng rng(4);
    double mae = 0.0;
    const int probes = 500;
    for (int i = 0; i < probes; ++i) {
        const double x = rng.uniform(0.1, 0.9);
        mae += std::fabs(predict(model, std::vector<double>{x}) - x);
    }
    mae /= probes;
    CHECK(mae < 0.05);
}

TEST_CASE("fit is seed-deterministic and permutation-invariant") {
    TrainingMatrix m =
        make_matrix(80, 4, 5, [](const std::vector<double>& r) { return r[0] + r[2]; });
    TreesParams p;
    p.n_trees = 12;
    p.rng_seed = 99;
    const auto bytes1 = save_model(fit(m, p));
    const auto bytes2 = save_model(fit(m, p));
    CHECK(bytes1 == bytes2);

    // shuffle row order; the canonical pre-sort must hide it
    TrainingMatrix shuffled = m;
    oracles::TestRng rng(6);
    for (size_t i = shuffled.rows.size(); i-- > 1;) {
        const size_t j = static_cast<size_t>(rng.uniform_int(0, static_cast<int>(i)));
        std::swap(shuffled.rows[i], shuffled.rows[j]);
        std::swap(shuffled.targets[i], shuffled.targets[j]);
        std::swap(shuffled.groups[i], shuffled.groups[j]);
    }
    const auto bytes3 = save_model(fit(shuffled, p));
    CHECK(bytes1 == bytes3);
}

TEST_CASE("predict averages leaves and matches manual traversal") {
    SUBCASE("hand-built models") {
        TreesModel m;
        m.feature_names = {"a"};
        m.target_name = "y";
        Tree leaf3;
        leaf3.nodes.push_back(TreeNode{-1, 0, -1, -1, 3.0, 0});
        m.trees.push_back(leaf3);
        CHECK(predict(m, std::vector<double>{0.5}) == 3.0);

        Tree leaf2 = leaf3;
        leaf2.nodes[0].value = 2.0;
        Tree leaf4 = leaf3;
        leaf4.nodes[0].value = 4.0;
        m.trees = {leaf2, leaf4};
        CHECK(predict(m, std::vector<double>{0.1}) == 3.0);
    }
    SUBCASE("fitted model vs traversal oracle") {
        TrainingMatrix data = make_matrix(120, 3, 8, [](const std::vector<double>& r) {
            return 2.0 * r[0] - r[1] + 0.25 * r[2];
        });
        TreesParams p;
        p.n_trees = 30;
        p.rng_seed = 2;
        const TreesModel model = fit(data, p);
        oracles::TestRng rng(9);
        for (int i = 0; i < 50; ++i) {
            const std::vector<double> x{rng.uniform01(), rng.uniform01(), rng.uniform01()};
            CHECK(predict(model, x) == doctest::Approx(traversal_oracle(model, x)).epsilon(1e-12));
        }
    }
    SUBCASE("dimensionality mismatch") {
        TrainingMatrix data = make_matrix(20, 2, 1, [](const std::vector<double>& r) {
            return r[0];
        });
        const TreesModel model = fit(data, {});
        CHECK_THROWS_AS(predict(model, std::vector<double>{1.0}), ValidationError);
    }
}

TEST_CASE("predictions stay inside the training target range") {
    TrainingMatrix data = make_matrix(100, 2, 10, [](const std::vector<double>& r) {
        return 5.0 * r[0] * r[0] - 2.0 * r[1];
    });
    const double lo = *std::min_element(data.targets.begin(), data.targets.end());
    const double hi = *std::max_element(data.targets.begin(), data.targets.end());
    TreesParams p;
    p.n_trees = 25;
    const TreesModel model = fit(data, p);
    oracles::TestRng rng(3);
    for (int i = 0; i < 100; ++i) {
        const double y = predict(model, std::vector<double>{rng.uniform01(), rng.uniform01()});
        CHECK(y >= lo);
        CHECK(y <= hi);
    }
}

TEST_CASE("feature importance") {
    SUBCASE("informative feature dominates") {
        TrainingMatrix data = make_matrix(300, 5, 12, [](const std::vector<double>& r) {
            return 3.0 * r[0];
        });
        TreesParams p;
        p.n_trees = 40;
        p.rng_seed = 4;
        const auto imp = feature_importance(fit(data, p));
        REQUIRE(imp.size() == 5);
        CHECK(imp[0] > 0.8);
        double sum = 0.0;
        for (double v : imp) sum += v;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("split-free model has all-zero importances") {
        TreesModel m;
        m.feature_names = {"a", "b"};
        Tree leaf;
        leaf.nodes.push_back(TreeNode{-1, 0, -1, -1, 1.0, 0});
        m.trees.push_back(leaf);
        const auto imp = feature_importance(m);
        CHECK(imp == std::vector<double>{0.0, 0.0});
    }
}

TEST_CASE("rfe_select") {
    SUBCASE("identity when nothing must go") {
        TrainingMatrix data = make_matrix(40, 9, 14, [](const std::vector<double>& r) {
            return r[0];
        });
        const auto sel = rfe_select(data, 9, {});
        CHECK(sel == std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7, 8});
    }
    SUBCASE("keeps the planted informative feature among noise") {
        TrainingMatrix data = make_matrix(250, 21, 15, [](const std::vector<double>& r) {
            return 4.0 * r[7];
        });
        TreesParams p;
        p.n_trees = 30;
        p.rng_seed = 21;
        const auto sel = rfe_select(data, 9, p);
        REQUIRE(sel.size() == 9);
        CHECK(std::find(sel.begin(), sel.end(), 7) != sel.end());
        CHECK(std::is_sorted(sel.begin(), sel.end()));
    }
    SUBCASE("demanding more features than exist is an error") {
        TrainingMatrix data = make_matrix(20, 3, 16, [](const std::vector<double>& r) {
            return r[0];
        });
        CHECK_THROWS_AS(rfe_select(data, 9, {}), ValidationError);
    }
}

TEST_CASE("model save/load") {
    TrainingMatrix data = make_matrix(150, 2, 17, [](const std::vector<double>& r) {
        return r[0] - 2.0 * r[1];
    });
    TreesParams p;
    p.n_trees = 15;
    p.rng_seed = 5;
    const TreesModel model = fit(data, p);
    const auto bytes = save_model(model);
    const TreesModel back = load_model(bytes);

    CHECK(back.feature_names == model.feature_names);
    CHECK(back.target_name == model.target_name);
    oracles::TestRng rng(18);
    for (int i = 0; i < 100; ++i) {
        const std::vector<double> x{rng.uniform01(), rng.uniform01()};
        CHECK(predict(back, x) == predict(model, x));
    }

    SUBCASE("truncated payload") {
        auto cut = bytes;
        cut.resize(cut.size() / 2);
        CHECK_THROWS_AS(load_model(cut), FormatError);
    }
    SUBCASE("future version tag") {
        auto v2 = bytes;
        v2[4] = 2; // version field
        CHECK_THROWS_AS(load_model(v2), FormatError);
    }
    SUBCASE("wrong magic") {
        auto bad = bytes;
        bad[0] = 'X';
        CHECK_THROWS_AS(load_model(bad), FormatError);
    }
}

TEST_CASE("fit input validation") {
    TrainingMatrix data = make_matrix(10, 2, 19, [](const std::vector<double>& r) {
        return r[0];
    });
    SUBCASE("non-finite feature") {
        data.rows[3][1] = std::numeric_limits<double>::quiet_NaN();
        CHECK_THROWS_AS(fit(data, {}), ValidationError);
    }
    SUBCASE("non-finite target") {
        data.targets[2] = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(fit(data, {}), ValidationError);
    }
    SUBCASE("too few samples") {
        data.rows.resize(1);
        data.targets.resize(1);
        data.groups.resize(1);
        CHECK_THROWS_AS(fit(data, {}), ValidationError);
    }
}
