#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "tsgp/program.hpp"

namespace tsgp {

/// Nested one-line expression, e.g.
/// `ShapePeak(AdaPatch(DomFreq(SegDect(x, 21, 103)), /16), λ=0.5)`.
std::string render_tree(const ProgramTree& tree);
std::string render_node(const Node& node);

/// Inverse of render_tree (debugging aid). Throws MalformedModel.
ProgramTree parse_rendered(std::string_view text, std::size_t series_length);

/// Layer summary of one feature-learning branch (an extractor subtree).
struct BranchSummary {
    NodePath path;
    bool has_segment = false;
    std::size_t segment_start = 0; ///< 1-based
    std::size_t segment_length = 0;
    Op domain = Op::InputSeries; ///< DomFreq, DomDiff, or InputSeries for raw
    int divisor = 0;             ///< 0 when the branch is not patched
    Op extractor = Op::StatisDist;
    double parameter = 0.0;

    /// `SegDect[103..123] → Freq → Patch/16 → ShapePeak`
    std::string describe() const;
};

/// Branches in preorder.
std::vector<BranchSummary> branch_summaries(const ProgramTree& tree);

} // namespace tsgp
