#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsgp/dataset.hpp"
#include "tsgp/feature_matrix.hpp"
#include "tsgp/parallel.hpp"

namespace tsgp {

/// One randomized decision tree in flat storage. Node i is a leaf when
/// feature[i] < 0; leaves keep the training class counts that reached them.
struct DecisionTree {
    std::vector<int> feature;
    std::vector<double> threshold;
    std::vector<int> left;
    std::vector<int> right;
    std::vector<std::vector<std::uint32_t>> counts; ///< empty for split nodes

    std::size_t node_count() const noexcept { return feature.size(); }
    /// Index of the leaf reached by `x` (left when x[f] <= threshold).
    std::size_t leaf_for(std::span<const double> x) const;
    /// Edges on the longest root-to-leaf path.
    std::size_t max_depth() const;
};

struct ExtraTreesModel {
    std::vector<DecisionTree> trees;
    std::size_t n_classes = 0;
    std::size_t n_features = 0;
    std::uint64_t seed = 0;
};

/// Candidate features tried per split: max(1, floor(sqrt(d))).
std::size_t extra_trees_candidates(std::size_t n_features);

/// Trees are grown on the full training set without bootstrapping; tree t
/// draws from its own stream derive_seed(seed, t), so the result does not
/// depend on the execution policy. `n_classes` = 0 infers max(y) + 1.
ExtraTreesModel fit_extra_trees(const FeatureMatrix& X, std::span<const int> y, std::size_t n_trees, std::uint64_t seed,
    std::size_t n_classes = 0, Exec exec = Exec::Parallel);

/// Mean over trees of the leaf class frequencies; each row sums to 1.
std::vector<std::vector<double>> predict_proba(const ExtraTreesModel& m, const FeatureMatrix& X, Exec exec = Exec::Parallel);
std::vector<int> predict(const ExtraTreesModel& m, const FeatureMatrix& X, Exec exec = Exec::Parallel);

/// Index of the largest entry, lowest index on ties.
std::size_t argmax(std::span<const double> v);

/// Nearest training row under Euclidean distance, lowest index on ties.
std::vector<int> predict_1nn(const FeatureMatrix& train, const FeatureMatrix& test, Exec exec = Exec::Parallel);
std::vector<int> predict_1nn(const Dataset& train, const Dataset& test, Exec exec = Exec::Parallel);

/// Dataset as an N x L matrix with its labels.
FeatureMatrix to_matrix(const Dataset& d);

double accuracy(std::span<const int> predicted, std::span<const int> truth);

nlohmann::json to_json(const ExtraTreesModel& m);
ExtraTreesModel extra_trees_from_json(const nlohmann::json& j);

} // namespace tsgp
