#include "tsgp/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "tsgp/error.hpp"
#include "tsgp/rng.hpp"

namespace tsgp {

std::size_t DecisionTree::leaf_for(std::span<const double> x) const
{
    std::size_t i = 0;
    while (feature[i] >= 0) {
        i = static_cast<std::size_t>(x[static_cast<std::size_t>(feature[i])] <= threshold[i] ? left[i] : right[i]);
    }
    return i;
}

std::size_t DecisionTree::max_depth() const
{
    if (feature.empty()) {
        return 0;
    }
    std::vector<std::size_t> depth(feature.size(), 0);
    std::size_t best = 0;
    // children are always stored after their parent
    for (std::size_t i = 0; i < feature.size(); ++i) {
        best = std::max(best, depth[i]);
        if (feature[i] >= 0) {
            depth[static_cast<std::size_t>(left[i])] = depth[i] + 1;
            depth[static_cast<std::size_t>(right[i])] = depth[i] + 1;
        }
    }
    return best;
}

std::size_t extra_trees_candidates(std::size_t n_features)
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features)))));
}

namespace {

/// Gini impurity scaled by node size, n - sum(c^2)/n; lower is purer.
double weighted_gini(std::span<const std::uint32_t> counts, std::size_t n)
{
    if (n == 0) {
        return 0.0;
    }
    double sq = 0.0;
    for (auto c : counts) {
        sq += static_cast<double>(c) * static_cast<double>(c);
    }
    return static_cast<double>(n) - sq / static_cast<double>(n);
}

class TreeGrower {
public:
    TreeGrower(const FeatureMatrix& X, std::span<const int> y, std::size_t n_classes, std::uint64_t seed)
        : X_(X)
        , y_(y)
        , C_(n_classes)
        , k_(extra_trees_candidates(X.cols))
        , rng_(seed)
        , order_(X.cols)
    {
        std::iota(order_.begin(), order_.end(), 0);
    }

    DecisionTree grow()
    {
        std::vector<std::size_t> idx(X_.rows);
        std::iota(idx.begin(), idx.end(), 0);
        build(idx);
        return std::move(tree_);
    }

private:
    std::vector<std::uint32_t> class_counts(std::span<const std::size_t> idx) const
    {
        std::vector<std::uint32_t> c(C_, 0);
        for (auto i : idx) {
            ++c[static_cast<std::size_t>(y_[i])];
        }
        return c;
    }

    std::size_t add_node()
    {
        tree_.feature.push_back(-1);
        tree_.threshold.push_back(0.0);
        tree_.left.push_back(-1);
        tree_.right.push_back(-1);
        tree_.counts.emplace_back();
        return tree_.feature.size() - 1;
    }

    std::size_t build(std::span<std::size_t> idx)
    {
        const std::size_t node = add_node();
        auto counts = class_counts(idx);
        const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
        if (idx.size() < 2 || pure) {
            tree_.counts[node] = std::move(counts);
            return node;
        }

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = std::numeric_limits<double>::infinity();
        std::size_t evaluated = 0;
        std::vector<std::uint32_t> lc(C_), rc(C_);
        for (std::size_t drawn = 0; drawn < order_.size() && evaluated < k_; ++drawn) {
            std::swap(order_[drawn], order_[drawn + rng_.uniform_index(order_.size() - drawn)]);
            const std::size_t f = order_[drawn];
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (auto i : idx) {
                lo = std::min(lo, X_(i, f));
                hi = std::max(hi, X_(i, f));
            }
            if (!(hi > lo)) {
                continue; // constant here; does not use up a candidate slot
            }
            ++evaluated;
            double thr = lo + rng_.uniform01() * (hi - lo);
            if (thr >= hi) {
                thr = std::nextafter(hi, lo);
            }
            std::fill(lc.begin(), lc.end(), 0);
            std::fill(rc.begin(), rc.end(), 0);
            std::size_t nl = 0;
            for (auto i : idx) {
                if (X_(i, f) <= thr) {
                    ++lc[static_cast<std::size_t>(y_[i])];
                    ++nl;
                } else {
                    ++rc[static_cast<std::size_t>(y_[i])];
                }
            }
            const double score = weighted_gini(lc, nl) + weighted_gini(rc, idx.size() - nl);
            if (score < best_score || (score == best_score && static_cast<int>(f) < best_feature)) {
                best_score = score;
                best_feature = static_cast<int>(f);
                best_threshold = thr;
            }
        }
        if (best_feature < 0) {
            tree_.counts[node] = std::move(counts);
            return node;
        }

        const auto f = static_cast<std::size_t>(best_feature);
        auto mid = std::stable_partition(idx.begin(), idx.end(), [&](std::size_t i) { return X_(i, f) <= best_threshold; });
        const auto split = static_cast<std::size_t>(mid - idx.begin());
        tree_.feature[node] = best_feature;
        tree_.threshold[node] = best_threshold;
        const std::size_t l = build(idx.subspan(0, split));
        const std::size_t r = build(idx.subspan(split));
        tree_.left[node] = static_cast<int>(l);
        tree_.right[node] = static_cast<int>(r);
        return node;
    }

    const FeatureMatrix& X_;
    std::span<const int> y_;
    std::size_t C_;
    std::size_t k_;
    Rng rng_;
    std::vector<std::size_t> order_;
    DecisionTree tree_;
};

} // namespace

ExtraTreesModel fit_extra_trees(const FeatureMatrix& X, std::span<const int> y, std::size_t n_trees, std::uint64_t seed,
    std::size_t n_classes, Exec exec)
{
    if (X.rows == 0 || X.cols == 0) {
        throw Error(ErrorKind::DegenerateInput, "empty training matrix");
    }
    if (y.size() != X.rows) {
        throw Error(ErrorKind::LengthMismatch, "label count does not match the number of rows");
    }
    if (n_trees == 0) {
        throw Error(ErrorKind::InvalidConfig, "extra trees need at least one tree");
    }
    if (std::any_of(y.begin(), y.end(), [](int v) { return v < 0; })) {
        throw Error(ErrorKind::DegenerateInput, "training labels must be class indices");
    }
    if (!std::all_of(X.values.begin(), X.values.end(), [](double v) { return std::isfinite(v); })) {
        throw Error(ErrorKind::DegenerateInput, "non-finite feature value");
    }
    const auto top = static_cast<std::size_t>(*std::max_element(y.begin(), y.end()));
    if (n_classes == 0) {
        n_classes = top + 1;
    } else if (top >= n_classes) {
        throw Error(ErrorKind::DegenerateInput, "label outside the declared class range");
    }
    if (std::all_of(y.begin(), y.end(), [&](int v) { return v == y.front(); })) {
        throw Error(ErrorKind::DegenerateInput, "training labels contain a single class");
    }

    ExtraTreesModel m;
    m.n_classes = n_classes;
    m.n_features = X.cols;
    m.seed = seed;
    m.trees.resize(n_trees);
    parallel_for(exec, n_trees, [&](std::size_t t) { m.trees[t] = TreeGrower(X, y, n_classes, derive_seed(seed, t)).grow(); });
    return m;
}

std::vector<std::vector<double>> predict_proba(const ExtraTreesModel& m, const FeatureMatrix& X, Exec exec)
{
    if (X.rows > 0 && X.cols != m.n_features) {
        throw Error(ErrorKind::LengthMismatch,
            "feature count " + std::to_string(X.cols) + " != model feature count " + std::to_string(m.n_features));
    }
    std::vector<std::vector<double>> out(X.rows, std::vector<double>(m.n_classes, 0.0));
    parallel_for(exec, X.rows, [&](std::size_t r) {
        auto& p = out[r];
        for (const auto& tree : m.trees) {
            const auto& c = tree.counts[tree.leaf_for(X.row(r))];
            const double total = std::accumulate(c.begin(), c.end(), 0.0);
            for (std::size_t k = 0; k < m.n_classes; ++k) {
                p[k] += static_cast<double>(c[k]) / total;
            }
        }
        for (auto& v : p) {
            v /= static_cast<double>(m.trees.size());
        }
    });
    return out;
}

std::size_t argmax(std::span<const double> v)
{
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (v[i] > v[best]) {
            best = i;
        }
    }
    return best;
}

std::vector<int> predict(const ExtraTreesModel& m, const FeatureMatrix& X, Exec exec)
{
    const auto proba = predict_proba(m, X, exec);
    std::vector<int> out(proba.size());
    for (std::size_t i = 0; i < proba.size(); ++i) {
        out[i] = static_cast<int>(argmax(proba[i]));
    }
    return out;
}

std::vector<int> predict_1nn(const FeatureMatrix& train, const FeatureMatrix& test, Exec exec)
{
    if (train.rows == 0) {
        throw Error(ErrorKind::DegenerateInput, "1-NN needs at least one training instance");
    }
    if (test.rows > 0 && test.cols != train.cols) {
        throw Error(ErrorKind::LengthMismatch, "train and test widths differ");
    }
    if (train.labels.size() != train.rows) {
        throw Error(ErrorKind::DegenerateInput, "1-NN training rows need labels");
    }
    std::vector<int> out(test.rows);
    parallel_for(exec, test.rows, [&](std::size_t q) {
        const auto x = test.row(q);
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t i = 0; i < train.rows; ++i) {
            const auto t = train.row(i);
            double d = 0.0;
            for (std::size_t j = 0; j < t.size(); ++j) {
                const double diff = x[j] - t[j];
                d += diff * diff;
            }
            if (d < best) {
                best = d;
                arg = i;
            }
        }
        out[q] = train.labels[arg];
    });
    return out;
}

FeatureMatrix to_matrix(const Dataset& d)
{
    FeatureMatrix m(d.size(), d.length());
    for (std::size_t i = 0; i < d.size(); ++i) {
        std::copy(d.series[i].values.begin(), d.series[i].values.end(), m.row(i).begin());
    }
    m.labels = d.labels();
    return m;
}

std::vector<int> predict_1nn(const Dataset& train, const Dataset& test, Exec exec)
{
    return predict_1nn(to_matrix(train), to_matrix(test), exec);
}

double accuracy(std::span<const int> predicted, std::span<const int> truth)
{
    if (predicted.size() != truth.size()) {
        throw Error(ErrorKind::LengthMismatch, "prediction and label counts differ");
    }
    if (truth.empty()) {
        throw Error(ErrorKind::DegenerateInput, "accuracy of an empty set");
    }
    std::size_t hit = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        hit += predicted[i] == truth[i] ? 1 : 0;
    }
    return static_cast<double>(hit) / static_cast<double>(truth.size());
}

nlohmann::json to_json(const ExtraTreesModel& m)
{
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : m.trees) {
        trees.push_back({
            {"feature", t.feature},
            {"threshold", t.threshold},
            {"left", t.left},
            {"right", t.right},
            {"counts", t.counts},
        });
    }
    return {{"n_classes", m.n_classes}, {"n_features", m.n_features}, {"seed", m.seed}, {"trees", std::move(trees)}};
}

ExtraTreesModel extra_trees_from_json(const nlohmann::json& j)
{
    ExtraTreesModel m;
    try {
        m.n_classes = j.at("n_classes").get<std::size_t>();
        m.n_features = j.at("n_features").get<std::size_t>();
        m.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& tj : j.at("trees")) {
            DecisionTree t;
            t.feature = tj.at("feature").get<std::vector<int>>();
            t.threshold = tj.at("threshold").get<std::vector<double>>();
            t.left = tj.at("left").get<std::vector<int>>();
            t.right = tj.at("right").get<std::vector<int>>();
            t.counts = tj.at("counts").get<std::vector<std::vector<std::uint32_t>>>();
            const std::size_t n = t.feature.size();
            if (n == 0 || t.threshold.size() != n || t.left.size() != n || t.right.size() != n || t.counts.size() != n) {
                throw Error(ErrorKind::MalformedModel, "inconsistent tree arrays");
            }
            for (std::size_t i = 0; i < n; ++i) {
                if (t.feature[i] >= 0) {
                    const bool ok = static_cast<std::size_t>(t.feature[i]) < m.n_features && t.left[i] > static_cast<int>(i)
                        && t.right[i] > static_cast<int>(i) && static_cast<std::size_t>(t.left[i]) < n
                        && static_cast<std::size_t>(t.right[i]) < n;
                    if (!ok) {
                        throw Error(ErrorKind::MalformedModel, "bad split node");
                    }
                } else if (t.counts[i].size() != m.n_classes
                    || std::accumulate(t.counts[i].begin(), t.counts[i].end(), 0ULL) == 0) {
                    throw Error(ErrorKind::MalformedModel, "bad leaf counts");
                }
            }
            m.trees.push_back(std::move(t));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::MalformedModel, std::string("classifier: ") + e.what());
    }
    if (m.trees.empty()) {
        throw Error(ErrorKind::MalformedModel, "classifier has no trees");
    }
    return m;
}

} // namespace tsgp
