#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace tsgp {

/// Dense row-major N x d matrix with the instance labels carried alongside.
struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;
    std::vector<int> labels;

    FeatureMatrix() = default;
    FeatureMatrix(std::size_t n_rows, std::size_t n_cols)
        : rows(n_rows)
        , cols(n_cols)
        , values(n_rows * n_cols, 0.0)
    {
    }

    std::span<double> row(std::size_t i)
    {
        assert(i < rows);
        return {values.data() + i * cols, cols};
    }
    std::span<const double> row(std::size_t i) const
    {
        assert(i < rows);
        return {values.data() + i * cols, cols};
    }
    double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }

    /// Rows at the given indices, in that order, with their labels.
    FeatureMatrix select_rows(std::span<const std::size_t> indices) const
    {
        FeatureMatrix out(indices.size(), cols);
        for (std::size_t r = 0; r < indices.size(); ++r) {
            auto src = row(indices[r]);
            std::copy(src.begin(), src.end(), out.row(r).begin());
            if (!labels.empty()) {
                out.labels.push_back(labels[indices[r]]);
            }
        }
        return out;
    }
};

} // namespace tsgp
