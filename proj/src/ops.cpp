#include "tsgp/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "tsgp/error.hpp"

namespace tsgp::ops {

bool is_divisor(int divisor) noexcept
{
    return std::find(kDivisors.begin(), kDivisors.end(), divisor) != kDivisors.end();
}

bool is_fraction(double value) noexcept
{
    return std::find(kFractions.begin(), kFractions.end(), value) != kFractions.end();
}

Series seg_detect(std::span<const double> x, std::size_t length, std::size_t start)
{
    const std::size_t n = x.size();
    if (length < 1 || length >= n || start < 1 || start > n - length + 1) {
        throw Error(ErrorKind::OutOfRange, "segment (length " + std::to_string(length) + ", start " + std::to_string(start)
                + ") does not fit a series of length " + std::to_string(n));
    }
    auto first = x.begin() + static_cast<std::ptrdiff_t>(start - 1);
    return Series(first, first + static_cast<std::ptrdiff_t>(length));
}

Series dom_freq(std::span<const double> x)
{
    const std::size_t n = x.size();
    Series out(n, 0.0);
    if (n == 0) {
        return out;
    }
    // twiddles indexed by (u*t) mod n keep the phase exact for long inputs
    std::vector<double> cos_table(n);
    std::vector<double> sin_table(n);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t m = 0; m < n; ++m) {
        if ((4 * m) % n == 0) {
            // quarter turns are exact, so DC and Nyquist-aligned inputs give exact zeros
            static constexpr double kCos[] = {1.0, 0.0, -1.0, 0.0};
            static constexpr double kSin[] = {0.0, 1.0, 0.0, -1.0};
            cos_table[m] = kCos[4 * m / n];
            sin_table[m] = kSin[4 * m / n];
            continue;
        }
        cos_table[m] = std::cos(step * static_cast<double>(m));
        sin_table[m] = std::sin(step * static_cast<double>(m));
    }
    // real input: |X[u]| == |X[n-u]|, so only the lower half is summed
    for (std::size_t u = 0; u <= n / 2; ++u) {
        double re = 0.0;
        double im = 0.0;
        std::size_t phase = 0;
        for (std::size_t t = 0; t < n; ++t) {
            re += x[t] * cos_table[phase];
            im -= x[t] * sin_table[phase];
            phase += u;
            if (phase >= n) {
                phase -= n;
            }
        }
        out[u] = std::sqrt(re * re + im * im);
    }
    for (std::size_t u = n / 2 + 1; u < n; ++u) {
        out[u] = out[n - u];
    }
    return out;
}

Series dom_diff(std::span<const double> x)
{
    if (x.size() < 2) {
        throw Error(ErrorKind::TooShort, "differencing needs at least 2 samples");
    }
    Series out(x.size() - 1);
    for (std::size_t j = 0; j + 1 < x.size(); ++j) {
        out[j] = x[j + 1] - x[j];
    }
    return out;
}

PatchGeometry patch_geometry(std::size_t source_length, int divisor)
{
    if (!is_divisor(divisor)) {
        throw Error(ErrorKind::InvalidTerminal, "patch divisor " + std::to_string(divisor) + " is not in {2,4,...,64}");
    }
    const std::size_t patch = source_length / static_cast<std::size_t>(divisor);
    if (patch < 2) {
        throw Error(ErrorKind::PatchTooSmall, "floor(" + std::to_string(source_length) + "/" + std::to_string(divisor) + ") < 2");
    }
    const std::size_t stride = patch / 2;
    return {patch, stride, (source_length - patch) / stride + 1};
}

PatchSet ada_patch(std::span<const double> x, int divisor)
{
    const PatchGeometry g = patch_geometry(x.size(), divisor);
    PatchSet set;
    set.patch_length = g.patch_length;
    set.stride = g.stride;
    set.source_length = x.size();
    set.patches.reserve(g.count);
    for (std::size_t i = 0; i < g.count; ++i) {
        auto first = x.begin() + static_cast<std::ptrdiff_t>(i * g.stride);
        set.patches.emplace_back(first, first + static_cast<std::ptrdiff_t>(g.patch_length));
    }
    return set;
}

ShapeKernel make_shape_kernel(ShapeKind kind, std::size_t length)
{
    if (length < 2 || (kind == ShapeKind::Peak && length < 3)) {
        throw Error(ErrorKind::KernelTooShort, "kernel length " + std::to_string(length) + " is too short");
    }
    std::vector<double> w(length);
    const double c = static_cast<double>(length);
    switch (kind) {
    case ShapeKind::Inc:
    case ShapeKind::Dec:
        for (std::size_t i = 0; i < length; ++i) {
            w[i] = static_cast<double>(i) - (c - 1.0) / 2.0;
        }
        break;
    case ShapeKind::Peak:
        for (std::size_t i = 0; i < length; ++i) {
            w[i] = std::cos(2.0 * std::numbers::pi * (static_cast<double>(i) / (c - 1.0)) - std::numbers::pi);
        }
        break;
    }
    const double mean = std::accumulate(w.begin(), w.end(), 0.0) / c;
    for (double& v : w) {
        v -= mean;
    }
    const double norm = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
    for (double& v : w) {
        v /= norm;
    }
    if (kind == ShapeKind::Dec) {
        for (double& v : w) {
            v = -v;
        }
    }
    return {kind, std::move(w)};
}

Series convolve_valid(std::span<const double> p, std::span<const double> w)
{
    if (w.size() > p.size()) {
        throw Error(ErrorKind::KernelLongerThanPatch,
            "kernel of length " + std::to_string(w.size()) + " on a patch of length " + std::to_string(p.size()));
    }
    const std::size_t m = p.size() - w.size() + 1;
    Series r(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            acc += p[j + i] * w[i];
        }
        r[j] = acc;
    }
    return r;
}

Series convolve_valid(std::span<const double> p, const ShapeKernel& kernel)
{
    return convolve_valid(p, std::span<const double>(kernel.weights));
}

Pooled pool(std::span<const double> r)
{
    if (r.empty()) {
        throw Error(ErrorKind::EmptyMap, "cannot pool an empty activation map");
    }
    std::size_t positive = 0;
    double max = r[0];
    double sum = 0.0;
    for (double v : r) {
        positive += v > 0.0 ? 1 : 0;
        max = std::max(max, v);
        sum += v;
    }
    const double n = static_cast<double>(r.size());
    return {static_cast<double>(positive) / n, max, sum / n};
}

std::size_t shape_min_patch_length(ShapeKind kind) noexcept
{
    return kind == ShapeKind::Peak ? 3 : 2;
}

std::vector<std::size_t> shape_kernel_lengths(ShapeKind kind, std::size_t patch_length, double lambda)
{
    if (!is_fraction(lambda)) {
        throw Error(ErrorKind::InvalidTerminal, "lambda must be one of 0.25, 0.5, 0.75");
    }
    if (patch_length < shape_min_patch_length(kind)) {
        throw Error(ErrorKind::PatchTooShort, "patch of length " + std::to_string(patch_length) + " is too short for shape extraction");
    }
    const auto c_max = static_cast<std::size_t>(std::floor(lambda * static_cast<double>(patch_length)));
    std::vector<std::size_t> lengths;
    for (std::size_t c = 2; c <= c_max; c *= 2) {
        lengths.push_back(c);
    }
    if (lengths.empty()) {
        lengths.push_back(2);
    }
    if (kind == ShapeKind::Peak && lengths.front() == 2) {
        lengths.front() = 3;
    }
    return lengths;
}

Series extract_shape(std::span<const double> p, ShapeKind kind, double lambda)
{
    const auto lengths = shape_kernel_lengths(kind, p.size(), lambda);
    Series out;
    out.reserve(3 * lengths.size());
    for (std::size_t c : lengths) {
        const Pooled pooled = pool(convolve_valid(p, make_shape_kernel(kind, c)));
        out.push_back(pooled.ppv);
        out.push_back(pooled.max);
        out.push_back(pooled.mean);
    }
    return out;
}

std::size_t statis_dist_size(std::size_t patch_length, double tau)
{
    if (!is_fraction(tau)) {
        throw Error(ErrorKind::InvalidTerminal, "tau must be one of 0.25, 0.5, 0.75");
    }
    const auto m = static_cast<std::size_t>(std::floor(tau * static_cast<double>(patch_length)));
    return std::max<std::size_t>(m, 2);
}

std::vector<std::size_t> statis_dist_indices(std::size_t patch_length, double tau)
{
    if (patch_length < 2) {
        throw Error(ErrorKind::PatchTooShort, "order statistics need a patch of at least 2 samples");
    }
    const std::size_t m = statis_dist_size(patch_length, tau);
    std::vector<std::size_t> idx(m);
    const std::size_t den = m - 1;
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t num = (patch_length - 1) * j;
        // exact rational rounding, half away from zero
        idx[j] = 1 + (2 * num + den) / (2 * den);
    }
    return idx;
}

Series extract_statis_dist(std::span<const double> p, double tau)
{
    const auto idx = statis_dist_indices(p.size(), tau);
    Series sorted(p.begin(), p.end());
    std::sort(sorted.begin(), sorted.end());
    Series out;
    out.reserve(idx.size());
    for (std::size_t i : idx) {
        out.push_back(sorted[i - 1]);
    }
    return out;
}

namespace {

ShapeKind shape_kind_of(Extractor::Kind kind)
{
    switch (kind) {
    case Extractor::Kind::ShapeInc: return ShapeKind::Inc;
    case Extractor::Kind::ShapeDec: return ShapeKind::Dec;
    default: return ShapeKind::Peak;
    }
}

} // namespace

Series Extractor::operator()(std::span<const double> patch) const
{
    if (kind == Kind::StatisDist) {
        return extract_statis_dist(patch, parameter);
    }
    return extract_shape(patch, shape_kind_of(kind), parameter);
}

std::size_t Extractor::dimension(std::size_t patch_length) const
{
    if (kind == Kind::StatisDist) {
        return statis_dist_size(patch_length, parameter);
    }
    return 3 * shape_kernel_lengths(shape_kind_of(kind), patch_length, parameter).size();
}

std::size_t Extractor::min_patch_length() const noexcept
{
    return kind == Kind::StatisDist ? 2 : shape_min_patch_length(shape_kind_of(kind));
}

Series extract_over_patches(const PatchSet& patches, const Extractor& extractor)
{
    Series out;
    if (!patches.patches.empty()) {
        out.reserve(patches.count() * extractor.dimension(patches.patch_length));
    }
    for (const auto& patch : patches.patches) {
        Series part = extractor(patch);
        out.insert(out.end(), part.begin(), part.end());
    }
    return out;
}

} // namespace tsgp::ops
