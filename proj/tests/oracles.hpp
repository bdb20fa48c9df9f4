#pragma once

// Reference implementations written directly from the defining formulas,
// deliberately naive and independent of the library code they check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "tsgp/evolution.hpp"
#include "tsgp/feature_matrix.hpp"

namespace oracle {

inline std::vector<double> dft_magnitude(const std::vector<double>& x)
{
    const std::size_t n = x.size();
    std::vector<double> out(n);
    for (std::size_t u = 0; u < n; ++u) {
        std::complex<double> acc = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(u) * static_cast<double>(t) / static_cast<double>(n);
            acc += x[t] * std::polar(1.0, angle);
        }
        out[u] = std::abs(acc);
    }
    return out;
}

/// Order statistics with std::round (half away from zero) on the real quotient.
inline std::vector<double> statis_dist(std::vector<double> p, double tau)
{
    std::sort(p.begin(), p.end());
    const auto l = static_cast<double>(p.size());
    const int m = std::max(2, static_cast<int>(std::floor(tau * l)));
    std::vector<double> out;
    for (int j = 0; j < m; ++j) {
        const auto idx = 1 + static_cast<std::size_t>(std::round((l - 1.0) * j / (m - 1)));
        out.push_back(p[idx - 1]);
    }
    return out;
}

inline std::vector<int> nearest_neighbor(const tsgp::FeatureMatrix& train, const tsgp::FeatureMatrix& test)
{
    std::vector<int> out;
    for (std::size_t q = 0; q < test.rows; ++q) {
        std::vector<double> dist;
        for (std::size_t i = 0; i < train.rows; ++i) {
            double d = 0.0;
            for (std::size_t j = 0; j < train.cols; ++j) {
                d += std::pow(test(q, j) - train(i, j), 2);
            }
            dist.push_back(std::sqrt(d));
        }
        const auto best = std::min_element(dist.begin(), dist.end()) - dist.begin();
        out.push_back(train.labels[static_cast<std::size_t>(best)]);
    }
    return out;
}

inline bool dominates(const std::vector<double>& a, const std::vector<double>& b)
{
    bool all_ge = true;
    bool any_gt = false;
    for (std::size_t j = 0; j < a.size(); ++j) {
        all_ge = all_ge && a[j] >= b[j];
        any_gt = any_gt || a[j] > b[j];
    }
    return all_ge && any_gt;
}

/// Members of `sample` not dominated by another member.
inline std::vector<std::size_t> nondominated(const std::vector<std::vector<double>>& pop, const std::vector<std::size_t>& sample)
{
    std::vector<std::size_t> out;
    for (std::size_t a : sample) {
        bool beaten = false;
        for (std::size_t b : sample) {
            beaten = beaten || dominates(pop[b], pop[a]);
        }
        if (!beaten) {
            out.push_back(a);
        }
    }
    return out;
}

} // namespace oracle
