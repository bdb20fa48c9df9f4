#include "tsgp/cost.hpp"

#include <algorithm>
#include <bit>

#include "tsgp/error.hpp"

namespace tsgp {

namespace {

std::uint64_t ceil_log2(std::uint64_t n) { return n <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(n - 1)); }

constexpr std::uint64_t kValueBytes = 8;

ops::ShapeKind shape_kind(Op op)
{
    return op == Op::ShapeInc ? ops::ShapeKind::Inc : (op == Op::ShapeDec ? ops::ShapeKind::Dec : ops::ShapeKind::Peak);
}

struct Step {
    std::uint64_t flops = 0;
    std::uint64_t scratch = 0;
};

/// FLOPs and scratch bytes of one extractor application over all patches.
Step extractor_step(const Node& n, const NodeShape& in)
{
    const std::uint64_t lp = in.length;
    const std::uint64_t patches = in.type == TypeTag::Patches ? in.patch_count : 1;
    Step s;
    if (n.op == Op::StatisDist) {
        s.flops = patches * lp * ceil_log2(lp);
        s.scratch = lp * kValueBytes;
        return s;
    }
    std::uint64_t per_patch = 0;
    std::uint64_t widest = 0;
    for (std::size_t c : ops::shape_kernel_lengths(shape_kind(n.op), in.length, n.children.at(1).value)) {
        const std::uint64_t m = lp - c + 1;
        per_patch += m * (2 * c - 1) + m + m + (m - 1);
        widest = std::max(widest, m);
    }
    s.flops = patches * per_patch;
    s.scratch = widest * kValueBytes;
    return s;
}

std::uint64_t output_bytes(const NodeShape& s)
{
    if (s.type == TypeTag::Patches) {
        return s.patch_count * s.length * kValueBytes;
    }
    return s.length * kValueBytes;
}

class Simulator {
public:
    Simulator(const std::vector<NodeShape>& shapes, std::uint64_t input_bytes, CostReport& report)
        : shapes_(shapes)
        , report_(report)
        , live_(input_bytes)
    {
        report_.peak_bytes = live_;
    }

    /// Returns the bytes the node's output keeps alive after it returns.
    std::uint64_t run(const Node& node, NodePath& path)
    {
        const std::size_t me = cursor_++;
        if (is_terminal(node.op)) {
            // the input series is already resident; value terminals are constants
            return 0;
        }
        std::uint64_t held = 0;
        std::vector<std::size_t> child_index;
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            child_index.push_back(cursor_);
            path.push_back(i);
            held += run(node.children[i], path);
            path.pop_back();
        }

        const NodeShape& out = shapes_[me];
        const NodeShape& in = shapes_[child_index.front()];
        Step step;
        switch (node.op) {
        case Op::DomDiff: step.flops = in.length - 1; break;
        case Op::DomFreq: step.flops = 8 * in.length * in.length + 4 * in.length; break;
        case Op::ShapeInc:
        case Op::ShapeDec:
        case Op::ShapePeak:
        case Op::StatisDist: step = extractor_step(node, in); break;
        default: break;
        }
        const std::uint64_t mine = output_bytes(out);
        live_ += mine + step.scratch;
        report_.peak_bytes = std::max(report_.peak_bytes, live_);
        report_.breakdown.push_back({path_string(path), std::string(op_name(node.op)), step.flops, live_});
        report_.flops += step.flops;
        live_ -= step.scratch + held;
        return mine;
    }

private:
    const std::vector<NodeShape>& shapes_;
    CostReport& report_;
    std::uint64_t live_;
    std::size_t cursor_ = 0;
};

} // namespace

std::uint64_t classifier_flops(const ExtraTreesModel& m)
{
    std::uint64_t total = 0;
    for (const auto& t : m.trees) {
        total += t.max_depth();
    }
    return total;
}

CostReport cost_report(const ProgramTree& tree, std::size_t series_length, const ExtraTreesModel* classifier)
{
    ProgramTree sized{tree.root, series_length};
    const auto shapes = analyze_shapes(sized);
    if (!shapes) {
        throw Error(ErrorKind::InvalidTree, "tree cannot run on series of length " + std::to_string(series_length));
    }
    CostReport r;
    Simulator sim(*shapes, series_length * kValueBytes, r);
    NodePath path;
    sim.run(sized.root, path);
    if (classifier) {
        r.classifier_flops = classifier_flops(*classifier);
        r.flops += r.classifier_flops;
        r.breakdown.push_back({"classifier", "ExtraTrees", r.classifier_flops, 0});
    }
    return r;
}

CostReport cost_report(const ProgramTree& tree, const ExtraTreesModel* classifier)
{
    return cost_report(tree, tree.series_length, classifier);
}

std::uint64_t count_flops(const ProgramTree& tree, std::size_t series_length) { return cost_report(tree, series_length).flops; }

std::uint64_t peak_memory_bytes(const ProgramTree& tree, std::size_t series_length)
{
    return cost_report(tree, series_length).peak_bytes;
}

bool fits(const CostReport& r, const DeviceEnvelope& device)
{
    return r.peak_bytes <= device.sram_bytes && r.flops <= device.flop_budget;
}

nlohmann::json to_json(const CostReport& r)
{
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : r.breakdown) {
        nodes.push_back({{"path", n.path}, {"op", n.op}, {"flops", n.flops}, {"live_bytes", n.live_bytes}});
    }
    return {
        {"flops", r.flops},
        {"peak_bytes", r.peak_bytes},
        {"classifier_flops", r.classifier_flops},
        {std::string("fits_") + std::string(kStm32F446RE.name), fits(r, kStm32F446RE)},
        {std::string("fits_") + std::string(kStm32L552ZE.name), fits(r, kStm32L552ZE)},
        {"breakdown", std::move(nodes)},
    };
}

std::string cost_summary_line(const CostReport& r)
{
    auto b = [](bool v) { return v ? "true" : "false"; };
    return "flops=" + std::to_string(r.flops) + " peak_bytes=" + std::to_string(r.peak_bytes)
        + " fits_stm32f446re=" + b(fits(r, kStm32F446RE)) + " fits_stm32l552ze=" + b(fits(r, kStm32L552ZE));
}

} // namespace tsgp
