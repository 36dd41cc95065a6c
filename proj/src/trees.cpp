#include "shotladder/trees.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "shotladder/error.hpp"

namespace shotladder {

namespace {

// mt19937_64 is fully specified by the standard; thresholds are mapped by
// hand so models serialize identically across standard libraries.
struct Rng {
    std::mt19937_64 engine;
    explicit Rng(uint64_t seed) : engine(seed) {}
    double uniform01() { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }
    size_t below(size_t n) { return static_cast<size_t>(engine() % n); }
};

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

uint64_t row_hash(const std::vector<double>& row, double target) {
    uint64_t h = 0xcbf29ce484222325ULL;
    auto eat = [&h](double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    for (double v : row) eat(v);
    eat(target);
    return h;
}

struct TreeBuilder {
    const std::vector<std::vector<double>>& rows;
    const std::vector<double>& y;
    const TreesParams& params;
    int n_features;
    Rng rng;
    std::vector<TreeNode> nodes;
    std::vector<int> feature_pool;

    TreeBuilder(const std::vector<std::vector<double>>& rows_, const std::vector<double>& y_,
                const TreesParams& params_, uint64_t seed)
        : rows(rows_), y(y_), params(params_),
          n_features(static_cast<int>(rows_.front().size())), rng(seed) {
        feature_pool.resize(static_cast<size_t>(n_features));
        std::iota(feature_pool.begin(), feature_pool.end(), 0);
    }

    int32_t grow(std::span<int> idx, int depth) {
        const double n = static_cast<double>(idx.size());
        double sum = 0.0, sq = 0.0;
        for (int i : idx) {
            sum += y[i];
            sq += y[i] * y[i];
        }
        const double mean = sum / n;
        const double sse = std::max(0.0, sq - n * mean * mean);

        const int32_t id = static_cast<int32_t>(nodes.size());
        nodes.push_back(TreeNode{-1, 0.0, -1, -1, mean, 0.0});

        const bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;
        if (static_cast<int>(idx.size()) < params.min_samples_split || sse <= 0.0 || depth_capped)
            return id;

        // Candidate features: a random subset, one uniform threshold each.
        const int k = params.max_features > 0 ? std::min(params.max_features, n_features)
                                              : n_features;
        for (int i = 0; i < k; ++i) {
            const size_t j = i + rng.below(feature_pool.size() - i);
            std::swap(feature_pool[i], feature_pool[j]);
        }

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = -1.0;
        for (int c = 0; c < k; ++c) {
            const int f = feature_pool[c];
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (int i : idx) {
                lo = std::min(lo, rows[i][f]);
                hi = std::max(hi, rows[i][f]);
            }
            if (!(hi > lo)) continue;
            const double t = lo + rng.uniform01() * (hi - lo);
            if (!(t > lo) || !(t < hi)) continue; // degenerate rounding

            double ls = 0.0, lq = 0.0;
            double ln = 0.0;
            for (int i : idx) {
                if (rows[i][f] < t) {
                    ls += y[i];
                    lq += y[i] * y[i];
                    ln += 1.0;
                }
            }
            const double rn = n - ln;
            if (ln == 0.0 || rn == 0.0) continue;
            const double rs = sum - ls;
            const double rqq = sq - lq;
            const double sse_l = lq - ls * ls / ln;
            const double sse_r = rqq - rs * rs / rn;
            const double score = sse - sse_l - sse_r;
            if (score > best_score) {
                best_score = score;
                best_feature = f;
                best_threshold = t;
            }
        }
        if (best_feature < 0) return id;

        auto mid = std::partition(idx.begin(), idx.end(), [&](int i) {
            return rows[i][best_feature] < best_threshold;
        });
        const size_t left_n = static_cast<size_t>(mid - idx.begin());

        nodes[id].feature = best_feature;
        nodes[id].threshold = best_threshold;
        nodes[id].gain = std::max(0.0, best_score);
        const int32_t left = grow(idx.subspan(0, left_n), depth + 1);
        const int32_t right = grow(idx.subspan(left_n), depth + 1);
        nodes[id].left = left;
        nodes[id].right = right;
        return id;
    }
};

} // namespace

double Tree::predict(std::span<const double> features) const {
    int32_t i = 0;
    while (nodes[i].feature >= 0)
        i = features[nodes[i].feature] < nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return nodes[i].value;
}

TreesModel fit(const TrainingMatrix& data, const TreesParams& params) {
    if (data.rows.size() < 2) throw ValidationError("fit: need at least 2 samples");
    if (data.rows.size() != data.targets.size() || data.rows.size() != data.groups.size())
        throw ValidationError("fit: rows, targets and groups must align");
    if (params.n_trees < 1) throw ValidationError("fit: n_trees must be >= 1");
    const size_t dim = data.rows.front().size();
    if (dim == 0) throw ValidationError("fit: empty feature vectors");
    for (size_t r = 0; r < data.rows.size(); ++r) {
        if (data.rows[r].size() != dim) throw ValidationError("fit: ragged feature matrix");
        for (double v : data.rows[r])
            if (!std::isfinite(v)) throw ValidationError("fit: non-finite feature value");
        if (!std::isfinite(data.targets[r]))
            throw ValidationError("fit: non-finite target value");
    }
    if (!data.feature_names.empty() && data.feature_names.size() != dim)
        throw ValidationError("fit: feature_names length mismatch");

    // Canonical row order: (group, row hash). Ingestion order must not be
    // able to change the model.
    std::vector<int> order(data.rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<uint64_t> hashes(data.rows.size());
    for (size_t i = 0; i < data.rows.size(); ++i)
        hashes[i] = row_hash(data.rows[i], data.targets[i]);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (data.groups[a] != data.groups[b]) return data.groups[a] < data.groups[b];
        if (hashes[a] != hashes[b]) return hashes[a] < hashes[b];
        return a < b;
    });
    std::vector<std::vector<double>> rows(order.size());
    std::vector<double> y(order.size());
    for (size_t i = 0; i < order.size(); ++i) {
        rows[i] = data.rows[order[i]];
        y[i] = data.targets[order[i]];
    }

    TreesModel model;
    model.params = params;
    model.target_name = data.target_name;
    if (data.feature_names.empty()) {
        for (size_t f = 0; f < dim; ++f) model.feature_names.push_back("f" + std::to_string(f));
    } else {
        model.feature_names = data.feature_names;
    }

    // trees are independent given their derived seeds, so growth order is
    // free to parallelize without affecting the result
    model.trees.resize(static_cast<size_t>(params.n_trees));
    std::atomic<int> next{0};
    auto grow_trees = [&]() {
        std::vector<int> idx(rows.size());
        for (int t; (t = next.fetch_add(1)) < params.n_trees;) {
            std::iota(idx.begin(), idx.end(), 0);
            TreeBuilder builder(rows, y, params,
                                mix_seed(params.rng_seed, static_cast<uint64_t>(t)));
            builder.grow(std::span<int>(idx), 0);
            model.trees[static_cast<size_t>(t)].nodes = std::move(builder.nodes);
        }
    };
    const unsigned workers = std::min<unsigned>(
        std::max(1u, std::thread::hardware_concurrency()),
        static_cast<unsigned>(params.n_trees));
    if (workers <= 1) {
        grow_trees();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(grow_trees);
        for (std::thread& th : pool) th.join();
    }
    return model;
}

double predict(const TreesModel& model, std::span<const double> features) {
    if (features.size() != model.dimensionality())
        throw ValidationError("predict: feature vector length mismatch");
    double sum = 0.0;
    for (const Tree& t : model.trees) sum += t.predict(features);
    return sum / static_cast<double>(model.trees.size());
}

std::vector<double> feature_importance(const TreesModel& model) {
    std::vector<double> scores(model.dimensionality(), 0.0);
    double total = 0.0;
    for (const Tree& t : model.trees) {
        for (const TreeNode& n : t.nodes) {
            if (n.feature >= 0) {
                scores[n.feature] += n.gain;
                total += n.gain;
            }
        }
    }
    if (total > 0.0)
        for (double& s : scores) s /= total;
    return scores;
}

std::vector<int> rfe_select(const TrainingMatrix& data, int target_count,
                            const TreesParams& params) {
    const int dim = static_cast<int>(data.rows.empty() ? 0 : data.rows.front().size());
    if (target_count < 1) throw ValidationError("rfe_select: target_count must be >= 1");
    if (target_count > dim)
        throw ValidationError("rfe_select: target_count exceeds dimensionality");

    std::vector<int> active(dim);
    std::iota(active.begin(), active.end(), 0);

    int round = 0;
    while (static_cast<int>(active.size()) > target_count) {
        TrainingMatrix sub;
        sub.targets = data.targets;
        sub.groups = data.groups;
        sub.target_name = data.target_name;
        for (int f : active)
            sub.feature_names.push_back(data.feature_names.empty() ? "f" + std::to_string(f)
                                                                   : data.feature_names[f]);
        sub.rows.reserve(data.rows.size());
        for (const auto& row : data.rows) {
            std::vector<double> r;
            r.reserve(active.size());
            for (int f : active) r.push_back(row[f]);
            sub.rows.push_back(std::move(r));
        }
        TreesParams p = params;
        p.rng_seed = mix_seed(params.rng_seed, 0x52464500ULL + round);
        const std::vector<double> imp = feature_importance(fit(sub, p));

        // Drop the lowest importance; ties drop the later feature.
        size_t drop = 0;
        for (size_t i = 1; i < imp.size(); ++i)
            if (imp[i] <= imp[drop]) drop = i;
        active.erase(active.begin() + static_cast<long>(drop));
        ++round;
    }
    return active;
}

namespace {

constexpr char kMagic[4] = {'S', 'L', 'T', 'M'};
constexpr uint32_t kVersion = 1;

void put_u32(std::vector<uint8_t>& b, uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
void put_u64(std::vector<uint8_t>& b, uint64_t v) {
    for (int i = 0; i < 8; ++i) b.push_back(static_cast<uint8_t>(v >> (8 * i)));
}
void put_i32(std::vector<uint8_t>& b, int32_t v) { put_u32(b, static_cast<uint32_t>(v)); }
void put_f64(std::vector<uint8_t>& b, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    put_u64(b, bits);
}
void put_str(std::vector<uint8_t>& b, const std::string& s) {
    put_u32(b, static_cast<uint32_t>(s.size()));
    b.insert(b.end(), s.begin(), s.end());
}

struct Cursor {
    std::span<const uint8_t> data;
    size_t pos = 0;

    void need(size_t n) const {
        if (pos + n > data.size()) throw FormatError("truncated model payload");
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(data[pos + i]) << (8 * i);
        pos += 4;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(data[pos + i]) << (8 * i);
        pos += 8;
        return v;
    }
    int32_t i32() { return static_cast<int32_t>(u32()); }
    double f64() {
        const uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }
    std::string str() {
        const uint32_t n = u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(data.data() + pos), n);
        pos += n;
        return s;
    }
};

} // namespace

std::vector<uint8_t> save_model(const TreesModel& model) {
    std::vector<uint8_t> b;
    b.insert(b.end(), kMagic, kMagic + 4);
    put_u32(b, kVersion);
    put_u32(b, static_cast<uint32_t>(model.feature_names.size()));
    for (const auto& n : model.feature_names) put_str(b, n);
    put_str(b, model.target_name);
    put_i32(b, model.params.n_trees);
    put_i32(b, model.params.min_samples_split);
    put_i32(b, model.params.max_features);
    put_i32(b, model.params.max_depth);
    put_u64(b, model.params.rng_seed);
    put_u32(b, static_cast<uint32_t>(model.trees.size()));
    for (const Tree& t : model.trees) {
        put_u32(b, static_cast<uint32_t>(t.nodes.size()));
        for (const TreeNode& n : t.nodes) {
            put_i32(b, n.feature);
            put_f64(b, n.threshold);
            put_i32(b, n.left);
            put_i32(b, n.right);
            put_f64(b, n.value);
            put_f64(b, n.gain);
        }
    }
    return b;
}

TreesModel load_model(std::span<const uint8_t> payload) {
    Cursor c{payload};
    c.need(4);
    if (std::memcmp(payload.data(), kMagic, 4) != 0)
        throw FormatError("not a trees model payload");
    c.pos = 4;
    const uint32_t version = c.u32();
    if (version != kVersion)
        throw FormatError("unsupported model format version " + std::to_string(version));

    TreesModel m;
    const uint32_t nf = c.u32();
    for (uint32_t i = 0; i < nf; ++i) m.feature_names.push_back(c.str());
    m.target_name = c.str();
    m.params.n_trees = c.i32();
    m.params.min_samples_split = c.i32();
    m.params.max_features = c.i32();
    m.params.max_depth = c.i32();
    m.params.rng_seed = c.u64();
    const uint32_t ntrees = c.u32();
    for (uint32_t t = 0; t < ntrees; ++t) {
        Tree tree;
        const uint32_t nn = c.u32();
        tree.nodes.reserve(nn);
        for (uint32_t i = 0; i < nn; ++i) {
            TreeNode n;
            n.feature = c.i32();
            n.threshold = c.f64();
            n.left = c.i32();
            n.right = c.i32();
            n.value = c.f64();
            n.gain = c.f64();
            if (n.feature >= static_cast<int32_t>(nf))
                throw FormatError("corrupt model payload: split index out of range");
            if (n.feature >= 0 &&
                (n.left < 0 || n.right < 0 || static_cast<uint32_t>(n.left) >= nn ||
                 static_cast<uint32_t>(n.right) >= nn))
                throw FormatError("corrupt model payload: child index out of range");
            tree.nodes.push_back(n);
        }
        if (tree.nodes.empty()) throw FormatError("corrupt model payload: empty tree");
        m.trees.push_back(std::move(tree));
    }
    if (c.pos != payload.size()) throw FormatError("corrupt model payload: trailing bytes");
    return m;
}

void save_model_file(const TreesModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open " + path + " for writing");
    const std::vector<uint8_t> bytes = save_model(model);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

TreesModel load_model_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
    return load_model(bytes);
}

} // namespace shotladder
