#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tsgp/dataset.hpp"
#include "tsgp/feature_matrix.hpp"
#include "tsgp/ops.hpp"
#include "tsgp/parallel.hpp"
#include "tsgp/rng.hpp"

namespace tsgp {

enum class Op : std::uint8_t {
    SegDect,
    DomFreq,
    DomDiff,
    AdaPatch,
    ShapeInc,
    ShapeDec,
    ShapePeak,
    StatisDist,
    FeaCon2,
    FeaCon3,
    FeaCon4,
    FeaConH,
    InputSeries,
    TermLenSeg,
    TermStartSeg,
    TermDivisor,
    TermTau,
    TermLambda,
};

inline constexpr std::size_t kOpCount = 18;

/// Output types of the layer lattice. The last five are terminal kinds;
/// crossover only swaps nodes whose tags match.
enum class TypeTag : std::uint8_t {
    SeriesRaw,
    SegmentLocated,
    SegmentTransformed,
    Patches,
    Vector,
    Vectors,
    LenSeg,
    StartSeg,
    Divisor,
    Tau,
    Lambda,
};

std::string_view op_name(Op op) noexcept;
std::optional<Op> op_from_name(std::string_view name) noexcept;
TypeTag output_type(Op op) noexcept;
std::string_view type_name(TypeTag tag) noexcept;

bool is_terminal(Op op) noexcept;        ///< leaf ops, InputSeries included
bool is_value_terminal(Op op) noexcept;  ///< leaf ops carrying a value
bool is_extractor(Op op) noexcept;
bool is_concat(Op op) noexcept;
bool is_integer_terminal(Op op) noexcept;

/// Expected child types for `op`, in order.
std::vector<std::vector<TypeTag>> child_signature(Op op);

struct Node {
    Op op = Op::InputSeries;
    double value = 0.0; ///< terminal value; unused for function nodes
    std::vector<Node> children;

    friend bool operator==(const Node&, const Node&) = default;
};

/// A typed feature-learning program built for series of one fixed length.
struct ProgramTree {
    Node root;
    std::size_t series_length = 0;

    std::size_t depth() const;
    std::size_t size() const;

    friend bool operator==(const ProgramTree&, const ProgramTree&) = default;
};

// -- node construction helpers ------------------------------------------------

Node make_input();
Node make_terminal(Op kind, double value);
Node make_seg_dect(Node input, std::size_t length, std::size_t start);
Node make_domain(Op transform, Node input);
Node make_patch(Node input, int divisor);
Node make_extractor(Op kind, Node input, double parameter);
Node make_concat(std::vector<Node> children);
Node make_concat_h(Node vector, Node vectors);

// -- traversal ----------------------------------------------------------------

/// Child-index path from the root; empty for the root itself.
using NodePath = std::vector<std::size_t>;

std::string path_string(const NodePath& path);
std::size_t node_depth(const Node& node);
std::size_t node_count(const Node& node);
/// Preorder list of (path, depth-from-root) for every node.
std::vector<std::pair<NodePath, std::size_t>> preorder_paths(const Node& root);
const Node& node_at(const Node& root, const NodePath& path);
Node& node_at(Node& root, const NodePath& path);

// -- static shape analysis ----------------------------------------------------

/// Statically inferred output of one node for a fixed series length.
struct NodeShape {
    TypeTag type = TypeTag::SeriesRaw;
    std::size_t length = 0;      ///< series/segment length, Vector(s) dimension, or ell_patch
    std::size_t patch_count = 0; ///< n_patch for Patches
    std::size_t patch_stride = 0;
};

/// Shapes of every node in preorder, or nullopt if the tree cannot be typed
/// or sized for its series length.
std::optional<std::vector<NodeShape>> analyze_shapes(const ProgramTree& tree);

/// Feature dimension predicted from the structure alone.
std::size_t output_dimension(const ProgramTree& tree);

// -- validation ---------------------------------------------------------------

struct Violation {
    enum class Category { Type, Arity, Terminal, Depth, Length };

    Category category;
    std::string path;
    std::string message;
};

using ValidationReport = std::vector<Violation>;

inline constexpr int kMinTreeDepth = 2;
inline constexpr int kMaxTreeDepth = 6;

/// Empty iff every ProgramTree invariant holds (types, arity, terminal
/// ranges, depth bounds and statically discharged length preconditions).
ValidationReport validate_tree(const ProgramTree& tree, int min_depth = kMinTreeDepth, int max_depth = kMaxTreeDepth);
bool is_valid(const ProgramTree& tree, int min_depth = kMinTreeDepth, int max_depth = kMaxTreeDepth);
std::string format_report(const ValidationReport& report);

// -- evaluation ---------------------------------------------------------------

/// Observed per-node output sizes in preorder (length for series, ell_patch
/// and count for patches, dimension for vectors).
struct EvalTrace {
    std::vector<NodeShape> observed;
};

ops::Series evaluate_tree(const ProgramTree& tree, std::span<const double> x, EvalTrace* trace = nullptr);

/// Row i is evaluate_tree(tree, series i); labels carried unchanged.
FeatureMatrix transform_dataset(const ProgramTree& tree, const Dataset& d, Exec exec = Exec::Parallel);
/// Serial reference of transform_dataset.
FeatureMatrix transform_dataset_serial(const ProgramTree& tree, const Dataset& d);

// -- generation ---------------------------------------------------------------

enum class GrowMethod { Grow, Full };

/// Random valid tree for series of length L with depth <= depth_limit.
ProgramTree generate_tree(Rng& rng, GrowMethod method, int depth_limit, std::size_t series_length);

/// Random subtree producing `type`, with at most `depth_budget` edges below
/// its root, and (for series-like types) an output length >= `min_length`
/// (ell_patch for Patches). Throws InfeasibleDepth when none exists.
Node generate_subtree(Rng& rng, GrowMethod method, TypeTag type, int depth_budget, std::size_t min_length,
    std::size_t series_length);

/// Smallest output length (ell_patch for Patches) the node at `path` must
/// produce for its ancestors' length preconditions to hold.
std::size_t required_output_length(const ProgramTree& tree, const NodePath& path);

/// Re-samples one terminal in place from its (context-dependent) feasible
/// range. `path` must address a value terminal whose parent is in `tree`.
void resample_terminal(Rng& rng, ProgramTree& tree, const NodePath& path);

} // namespace tsgp
