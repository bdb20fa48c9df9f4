#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace tsgp::ops {

using Series = std::vector<double>;

/// Overlapping fixed-length windows of a source segment.
struct PatchSet {
    std::vector<Series> patches;
    std::size_t patch_length = 0;
    std::size_t stride = 0;
    std::size_t source_length = 0;

    std::size_t count() const noexcept { return patches.size(); }
};

inline constexpr std::array<int, 6> kDivisors{2, 4, 8, 16, 32, 64};
inline constexpr std::array<double, 3> kFractions{0.25, 0.5, 0.75};

bool is_divisor(int divisor) noexcept;
bool is_fraction(double value) noexcept;

/// Contiguous slice of `length` samples starting at 1-based `start`.
Series seg_detect(std::span<const double> x, std::size_t length, std::size_t start);

/// Full-length DFT magnitude spectrum; bin 0 is the DC term.
Series dom_freq(std::span<const double> x);

/// First-order differences, length n-1.
Series dom_diff(std::span<const double> x);

/// Geometry of ada_patch without materializing the patches.
struct PatchGeometry {
    std::size_t patch_length;
    std::size_t stride;
    std::size_t count;
};
PatchGeometry patch_geometry(std::size_t source_length, int divisor);

/// Windows of floor(n/divisor) samples with stride floor(patch/2); the
/// trailing samples not covered by a full window are dropped.
PatchSet ada_patch(std::span<const double> x, int divisor);

enum class ShapeKind { Inc, Dec, Peak };

struct ShapeKernel {
    ShapeKind kind;
    std::vector<double> weights;

    std::size_t size() const noexcept { return weights.size(); }
};

/// Zero-mean, unit-norm templates. Inc is a linear ramp, Dec its negation,
/// Peak a raised-cosine bump (negative edges, positive center). Swapping in
/// other templates only requires changing this function.
ShapeKernel make_shape_kernel(ShapeKind kind, std::size_t length);

/// Valid cross-correlation: r[j] = sum_i p[j+i] * w[i].
Series convolve_valid(std::span<const double> p, std::span<const double> w);
Series convolve_valid(std::span<const double> p, const ShapeKernel& kernel);

struct Pooled {
    double ppv;
    double max;
    double mean;
};

/// PPV counts strictly positive entries.
Pooled pool(std::span<const double> r);

/// Smallest patch a shape extractor of this kind accepts.
std::size_t shape_min_patch_length(ShapeKind kind) noexcept;

/// Kernel lengths used for one patch, ascending: powers of two in
/// [2, floor(lambda*patch_length)], falling back to {2} when that range is
/// empty. Peak templates need a center sample, so a length-2 entry becomes 3.
std::vector<std::size_t> shape_kernel_lengths(ShapeKind kind, std::size_t patch_length, double lambda);

/// (PPV, MAX, MEAN) per kernel length, concatenated.
Series extract_shape(std::span<const double> p, ShapeKind kind, double lambda);

/// Number of order statistics kept: max(2, floor(tau*n)).
std::size_t statis_dist_size(std::size_t patch_length, double tau);

/// 1-based indices into the sorted patch, rounded half away from zero.
std::vector<std::size_t> statis_dist_indices(std::size_t patch_length, double tau);

/// Uniformly subsampled order statistics of the patch.
Series extract_statis_dist(std::span<const double> p, double tau);

/// A configured feature-extraction operator.
struct Extractor {
    enum class Kind { ShapeInc, ShapeDec, ShapePeak, StatisDist };

    Kind kind;
    double parameter; ///< lambda for shape kinds, tau for StatisDist

    Series operator()(std::span<const double> patch) const;
    std::size_t dimension(std::size_t patch_length) const;
    std::size_t min_patch_length() const noexcept;
};

/// Applies the extractor to every patch and concatenates in patch order.
Series extract_over_patches(const PatchSet& patches, const Extractor& extractor);

} // namespace tsgp::ops
