#include "ccs/ml/forest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <thread>

#include "ccs/error.hpp"
#include "ccs/rng.hpp"

namespace ccs::ml {

void ForestConfig::check() const {
    if (n_trees < 1) throw Error(errc::kInvalidArgument, "n_trees must be at least 1");
    if (max_depth < 0) throw Error(errc::kInvalidArgument, "max_depth must be non-negative");
    if (min_leaf < 1) throw Error(errc::kInvalidArgument, "min_leaf must be at least 1");
    if (n_refinement_stages < 0) throw Error(errc::kInvalidArgument, "n_refinement_stages must be non-negative");
    if (folds < 2) throw Error(errc::kInvalidArgument, "folds must be at least 2");
    for (double w : class_weights) {
        if (!(w > 0) || !std::isfinite(w)) throw Error(errc::kInvalidArgument, "class weights must be positive");
    }
}

Json to_json(const ForestConfig& cfg) {
    return {{"n_trees", cfg.n_trees},   {"max_depth", cfg.max_depth},
            {"min_leaf", cfg.min_leaf}, {"seed", cfg.seed},
            {"n_refinement_stages", cfg.n_refinement_stages},
            {"folds", cfg.folds},       {"class_weights", cfg.class_weights}};
}

ForestConfig forest_config_from_json(const JsonCursor& c) {
    c.expect_object();
    ForestConfig cfg;
    if (auto v = c.find("n_trees")) cfg.n_trees = static_cast<int>(v->integer());
    if (auto v = c.find("max_depth")) cfg.max_depth = static_cast<int>(v->integer());
    if (auto v = c.find("min_leaf")) cfg.min_leaf = static_cast<int>(v->integer());
    if (auto v = c.find("seed")) cfg.seed = static_cast<std::uint64_t>(v->integer());
    if (auto v = c.find("n_refinement_stages")) cfg.n_refinement_stages = static_cast<int>(v->integer());
    if (auto v = c.find("folds")) cfg.folds = static_cast<int>(v->integer());
    if (auto v = c.find("threads")) cfg.threads = static_cast<unsigned>(v->integer());
    if (auto v = c.find("class_weights")) {
        for (std::size_t i = 0, n = v->array_size(); i < n; ++i) cfg.class_weights.push_back(v->at(i).number());
    }
    try {
        cfg.check();
    } catch (const Error& e) {
        c.fail(e.detail());
    }
    return cfg;
}

int DecisionTree::predict(const float* row) const {
    int node = 0;
    while (feature[static_cast<std::size_t>(node)] >= 0) {
        const auto n = static_cast<std::size_t>(node);
        node = row[feature[n]] <= threshold[n] ? left[n] : right[n];
    }
    return value[static_cast<std::size_t>(node)];
}

std::size_t DecisionTree::depth() const {
    std::vector<std::size_t> d(feature.size(), 0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < feature.size(); ++i) {
        best = std::max(best, d[i]);
        if (feature[i] >= 0) {
            d[static_cast<std::size_t>(left[i])] = d[i] + 1;
            d[static_cast<std::size_t>(right[i])] = d[i] + 1;
        }
    }
    return best;
}

namespace {

// Column-major copy of the training matrix with order-preserving integer
// keys, so split search sorts plain integers.
struct Columns {
    std::vector<std::vector<float>> value;
    std::vector<std::vector<std::uint32_t>> key;

    explicit Columns(const FeatureMatrix& x) : value(x.cols), key(x.cols) {
        for (std::size_t f = 0; f < x.cols; ++f) {
            value[f].resize(x.rows());
            key[f].resize(x.rows());
            for (std::size_t r = 0; r < x.rows(); ++r) {
                float v = x.at(r, f);
                if (v == 0.0f) v = 0.0f;  // folds -0 into +0
                value[f][r] = v;
                std::uint32_t bits;
                std::memcpy(&bits, &v, sizeof bits);
                key[f][r] = (bits & 0x80000000u) ? ~bits : (bits | 0x80000000u);
            }
        }
    }
};

class TreeBuilder {
public:
    TreeBuilder(const Columns& x, const std::vector<int>& y, std::size_t n_labels, const ForestConfig& cfg,
                const std::vector<double>& weights, std::uint64_t seed)
        : x_(x), y_(y), n_labels_(n_labels), cfg_(cfg), w_(weights), rng_(seed) {
        const auto f = static_cast<double>(x.value.size());
        k_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(std::sqrt(f))));
    }

    DecisionTree build() {
        const std::size_t n = y_.size();
        std::vector<int> sample(n);
        for (auto& s : sample) s = static_cast<int>(rng_.below(n));
        std::sort(sample.begin(), sample.end());

        struct Task {
            int node;
            std::vector<int> idx;
            int depth;
        };
        std::vector<Task> stack;
        stack.push_back({new_node(), std::move(sample), 0});
        while (!stack.empty()) {
            Task t = std::move(stack.back());
            stack.pop_back();
            split(t.node, t.idx, t.depth, stack);
        }
        return std::move(tree_);
    }

private:
    int new_node() {
        tree_.feature.push_back(-1);
        tree_.threshold.push_back(0);
        tree_.left.push_back(-1);
        tree_.right.push_back(-1);
        tree_.value.push_back(0);
        return static_cast<int>(tree_.feature.size() - 1);
    }

    template <class Stack>
    void split(int node, std::vector<int>& idx, int depth, Stack& stack) {
        std::vector<double> counts(n_labels_, 0.0);
        for (int i : idx) counts[static_cast<std::size_t>(y_[static_cast<std::size_t>(i)])] += w_[static_cast<std::size_t>(y_[static_cast<std::size_t>(i)])];
        const auto n = static_cast<std::size_t>(node);
        tree_.value[n] = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
        const std::size_t nonzero = static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }));
        const auto min_leaf = static_cast<std::size_t>(cfg_.min_leaf);
        if (nonzero <= 1 || idx.size() < 2 * min_leaf || (cfg_.max_depth > 0 && depth >= cfg_.max_depth)) return;

        double total = 0, parent_sq = 0;
        for (double c : counts) {
            total += c;
            parent_sq += c * c;
        }
        const double parent_score = parent_sq / total;

        std::vector<std::size_t> order(x_.value.size());
        for (std::size_t f = 0; f < order.size(); ++f) order[f] = f;

        int best_feature = -1;
        float best_threshold = 0;
        double best_score = parent_score + 1e-9 * total;
        std::vector<std::uint64_t> vals(idx.size());
        std::vector<double> left(n_labels_);
        for (std::size_t tried = 0; tried < order.size(); ++tried) {
            // k random candidates; more only while no valid split was found
            if (tried >= k_ && best_feature >= 0) break;
            std::swap(order[tried], order[tried + static_cast<std::size_t>(rng_.below(order.size() - tried))]);
            const std::size_t f = order[tried];
            const auto& key = x_.key[f];
            const auto& value = x_.value[f];
            for (std::size_t i = 0; i < idx.size(); ++i) {
                vals[i] = (static_cast<std::uint64_t>(key[static_cast<std::size_t>(idx[i])]) << 32) | static_cast<std::uint32_t>(idx[i]);
            }
            std::sort(vals.begin(), vals.end());
            auto row_of = [&](std::size_t i) { return static_cast<std::size_t>(vals[i] & 0xFFFFFFFFu); };
            auto key_of = [&](std::size_t i) { return vals[i] >> 32; };
            if (key_of(0) == key_of(vals.size() - 1)) continue;
            std::fill(left.begin(), left.end(), 0.0);
            double wl = 0, sq_l = 0, sq_r = parent_sq;
            std::vector<double> right = counts;
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                const auto c = static_cast<std::size_t>(y_[row_of(i)]);
                const double w = w_[c];
                sq_l += 2 * left[c] * w + w * w;
                sq_r -= 2 * right[c] * w - w * w;
                left[c] += w;
                right[c] -= w;
                wl += w;
                if (key_of(i) == key_of(i + 1)) continue;
                if (i + 1 < min_leaf || vals.size() - (i + 1) < min_leaf) continue;
                const double wr = total - wl;
                if (wl <= 0 || wr <= 0) continue;
                const double score = sq_l / wl + sq_r / wr;
                if (score > best_score) {
                    best_score = score;
                    best_feature = static_cast<int>(f);
                    const float a = value[row_of(i)], b = value[row_of(i + 1)];
                    float mid = static_cast<float>(0.5 * (static_cast<double>(a) + static_cast<double>(b)));
                    if (!(mid >= a && mid < b)) mid = a;
                    best_threshold = mid;
                }
            }
        }
        if (best_feature < 0) return;

        std::vector<int> li, ri;
        for (int i : idx) {
            (x_.value[static_cast<std::size_t>(best_feature)][static_cast<std::size_t>(i)] <= best_threshold ? li : ri).push_back(i);
        }
        idx.clear();
        idx.shrink_to_fit();
        const int l = new_node();
        const int r = new_node();
        tree_.feature[n] = best_feature;
        tree_.threshold[n] = best_threshold;
        tree_.left[n] = l;
        tree_.right[n] = r;
        stack.push_back({r, std::move(ri), depth + 1});
        stack.push_back({l, std::move(li), depth + 1});
    }

    const Columns& x_;
    const std::vector<int>& y_;
    std::size_t n_labels_;
    const ForestConfig& cfg_;
    const std::vector<double>& w_;
    Rng rng_;
    std::size_t k_;
    DecisionTree tree_;
};

}  // namespace

RandomForest RandomForest::train(const FeatureMatrix& x, const std::vector<int>& y, std::size_t n_labels,
                                 const ForestConfig& cfg, std::uint64_t seed) {
    cfg.check();
    if (y.empty()) throw Error(errc::kEmptyDataset, "no training examples");
    if (x.rows() != y.size()) throw Error(errc::kShapeError, "feature rows and labels differ in length");
    for (int label : y) {
        if (label < 0 || static_cast<std::size_t>(label) >= n_labels) {
            throw Error(errc::kUnknownLabel, "label index " + std::to_string(label) + " outside the label set");
        }
    }
    std::vector<double> weights = cfg.class_weights;
    if (weights.empty()) weights.assign(n_labels, 1.0);
    if (weights.size() != n_labels) throw Error(errc::kShapeError, "class_weights must have one entry per label");

    RandomForest forest;
    forest.n_features_ = x.cols;
    forest.n_labels_ = n_labels;
    forest.trees_.resize(static_cast<std::size_t>(cfg.n_trees));
    const Columns columns(x);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t t; (t = next.fetch_add(1)) < forest.trees_.size();) {
            forest.trees_[t] = TreeBuilder(columns, y, n_labels, cfg, weights, derive_seed(seed, t)).build();
        }
    };
    const unsigned threads = std::min<unsigned>(std::max(1u, cfg.threads), static_cast<unsigned>(cfg.n_trees));
    if (threads == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(work);
    }
    return forest;
}

std::vector<int> RandomForest::votes(const float* row) const {
    std::vector<int> counts(n_labels_, 0);
    for (const auto& t : trees_) ++counts[static_cast<std::size_t>(t.predict(row))];
    return counts;
}

std::pair<int, double> RandomForest::predict(const float* row) const {
    const auto counts = votes(row);
    const auto best = std::max_element(counts.begin(), counts.end());
    return {static_cast<int>(best - counts.begin()), static_cast<double>(*best) / static_cast<double>(trees_.size())};
}

Json RandomForest::to_json() const {
    Json trees = Json::array();
    for (const auto& t : trees_) {
        trees.push_back({{"feature", t.feature},
                         {"threshold", t.threshold},
                         {"left", t.left},
                         {"right", t.right},
                         {"value", t.value}});
    }
    return {{"n_features", n_features_}, {"n_labels", n_labels_}, {"trees", std::move(trees)}};
}

RandomForest RandomForest::from_json(const JsonCursor& c) {
    c.expect_object();
    RandomForest f;
    f.n_features_ = static_cast<std::size_t>(c.at("n_features").integer());
    f.n_labels_ = static_cast<std::size_t>(c.at("n_labels").integer());
    auto trees = c.at("trees");
    for (std::size_t i = 0, n = trees.array_size(); i < n; ++i) {
        auto jt = trees.at(i);
        DecisionTree t;
        auto ints = [&](const char* key, std::vector<int>& out) {
            auto a = jt.at(key);
            for (std::size_t k = 0, m = a.array_size(); k < m; ++k) out.push_back(static_cast<int>(a.at(k).integer()));
        };
        ints("feature", t.feature);
        ints("left", t.left);
        ints("right", t.right);
        ints("value", t.value);
        auto th = jt.at("threshold");
        for (std::size_t k = 0, m = th.array_size(); k < m; ++k) t.threshold.push_back(static_cast<float>(th.at(k).number()));
        const std::size_t nodes = t.feature.size();
        if (nodes == 0 || t.threshold.size() != nodes || t.left.size() != nodes || t.right.size() != nodes ||
            t.value.size() != nodes) {
            jt.fail("tree arrays must be non-empty and of equal length");
        }
        for (std::size_t k = 0; k < nodes; ++k) {
            if (t.feature[k] >= 0) {
                // children come after their parent, which also rules out cycles
                const bool ok = static_cast<std::size_t>(t.feature[k]) < f.n_features_ &&
                                t.left[k] > static_cast<int>(k) && t.right[k] > static_cast<int>(k) &&
                                static_cast<std::size_t>(t.left[k]) < nodes && static_cast<std::size_t>(t.right[k]) < nodes;
                if (!ok) jt.fail("node " + std::to_string(k) + " is malformed");
            } else if (t.value[k] < 0 || static_cast<std::size_t>(t.value[k]) >= f.n_labels_) {
                jt.fail("leaf " + std::to_string(k) + " has an out-of-range class");
            }
        }
        f.trees_.push_back(std::move(t));
    }
    if (f.trees_.empty()) c.at("trees").fail("forest has no trees");
    return f;
}

}  // namespace ccs::ml
