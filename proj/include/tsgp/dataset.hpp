#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tsgp {

struct TimeSeries {
    std::vector<double> values;
    int label = -1; ///< class index 0..C-1, or -1 when the data is unlabeled
};

/// Labeled, equal-length univariate series.
///
/// Labels are remapped at load time to 0..C-1 in ascending order of their
/// original values; `original_labels[c]` keeps the value class c came from.
struct Dataset {
    std::string name;
    std::vector<TimeSeries> series;
    std::vector<int> class_labels;
    std::vector<double> original_labels;

    std::size_t size() const noexcept { return series.size(); }
    std::size_t length() const noexcept { return series.empty() ? 0 : series.front().values.size(); }
    std::size_t n_classes() const noexcept { return class_labels.size(); }
    bool labeled() const noexcept { return !class_labels.empty(); }

    std::vector<int> labels() const;
    std::vector<std::size_t> class_counts() const;
};

struct LoadOptions {
    bool has_labels = true;
    /// Field separator; 0 picks ',' for `.csv` files and '\t' otherwise.
    char separator = 0;
    /// SingleClass is raised when fewer distinct labels are present.
    std::size_t min_classes = 2;
};

Dataset load_ucr_tsv(const std::filesystem::path& path, const LoadOptions& options = {});
Dataset parse_ucr(std::istream& in, const std::string& name, char separator, const LoadOptions& options = {});

/// Writes label-first rows with the original label values, 17 significant digits.
void write_ucr_tsv(const Dataset& d, std::ostream& out);

/// Re-expresses `d`'s labels in the class indexing given by `original_labels`
/// (typically a training set's table). Unknown labels raise UnknownLabel.
Dataset relabel_with(const Dataset& d, std::span<const double> original_labels);

/// Per-series z-normalization; constant series become all zeros.
Dataset z_normalize(Dataset d);

/// Checks the Dataset invariants (equal length >= 2, finite values, labels).
void validate_dataset(const Dataset& d, std::size_t min_classes = 2);

struct Fold {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

struct FoldPlan {
    std::vector<Fold> folds;
    std::uint64_t seed = 0;
    /// Classes with fewer than k instances; some folds lack them.
    std::vector<int> shortfall_classes;

    std::size_t k() const noexcept { return folds.size(); }
};

/// Stratified, deterministic k-fold split.
///
/// Each class's indices are shuffled by an Rng seeded from `seed`, then dealt
/// round-robin to folds with a single counter that runs across classes, so
/// per-class fold counts differ by at most one and so do fold sizes.
FoldPlan stratified_kfold(const Dataset& d, int k, std::uint64_t seed);

} // namespace tsgp
