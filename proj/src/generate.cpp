#include <algorithm>
#include <vector>

#include "tsgp/error.hpp"
#include "tsgp/program.hpp"

namespace tsgp {

namespace {

constexpr int kInfeasible = -1;

std::vector<Op> producers(TypeTag type)
{
    std::vector<Op> out;
    for (std::size_t i = 0; i < kOpCount; ++i) {
        const auto op = static_cast<Op>(i);
        if (output_type(op) == type && (!is_terminal(op) || op == Op::InputSeries)) {
            out.push_back(op);
        }
    }
    return out;
}

std::size_t min_extractor_length(Op op)
{
    return op == Op::ShapePeak ? ops::shape_min_patch_length(ops::ShapeKind::Peak) : 2;
}

/// Search over the lattice for how deep a subtree can be made while still
/// meeting a minimum output length. Patches lengths refer to ell_patch.
class Planner {
public:
    explicit Planner(std::size_t series_length)
        : L_(series_length)
    {
    }

    std::size_t series_length() const { return L_; }

    int reach(Op op, std::size_t need, int budget) const
    {
        if (budget < 0) {
            return kInfeasible;
        }
        switch (op) {
        case Op::InputSeries: return need <= L_ ? 0 : kInfeasible;
        case Op::SegDect: return (budget >= 1 && L_ >= 2 && need <= L_ - 1) ? 1 : kInfeasible;
        case Op::DomFreq: return lift(reach_any(signature_types(op), need, budget - 1));
        case Op::DomDiff: return lift(reach_any(signature_types(op), std::max<std::size_t>(need, 1) + 1, budget - 1));
        case Op::AdaPatch:
            return lift(reach_any(signature_types(op), 2 * std::max<std::size_t>(need, 2), budget - 1));
        case Op::ShapeInc:
        case Op::ShapeDec:
        case Op::ShapePeak:
        case Op::StatisDist: return lift(reach_any(signature_types(op), min_extractor_length(op), budget - 1));
        case Op::FeaCon2:
        case Op::FeaCon3:
        case Op::FeaCon4: return lift(reach_type(TypeTag::Vector, 0, budget - 1));
        case Op::FeaConH: {
            const int v = reach_type(TypeTag::Vector, 0, budget - 1);
            const int vs = reach_type(TypeTag::Vectors, 0, budget - 1);
            return (v < 0 || vs < 0) ? kInfeasible : 1 + std::max(v, vs);
        }
        default: return kInfeasible;
        }
    }

    int reach_type(TypeTag type, std::size_t need, int budget) const
    {
        int best = kInfeasible;
        for (Op op : producers(type)) {
            best = std::max(best, reach(op, need, budget));
        }
        return best;
    }

    int reach_any(const std::vector<TypeTag>& types, std::size_t need, int budget) const
    {
        int best = kInfeasible;
        for (TypeTag t : types) {
            best = std::max(best, reach_type(t, need, budget));
        }
        return best;
    }

    static std::vector<TypeTag> signature_types(Op op) { return child_signature(op).front(); }

private:
    static int lift(int r) { return r < 0 ? kInfeasible : r + 1; }

    std::size_t L_;
};

/// Output length of a series-valued subtree.
std::size_t series_length_of(const Node& node, std::size_t L)
{
    switch (node.op) {
    case Op::InputSeries: return L;
    case Op::SegDect: return static_cast<std::size_t>(node.children[1].value);
    case Op::DomFreq: return series_length_of(node.children[0], L);
    case Op::DomDiff: return series_length_of(node.children[0], L) - 1;
    default: throw Error(ErrorKind::InvalidTree, "not a series-valued node: " + std::string(op_name(node.op)));
    }
}

std::vector<int> feasible_divisors(std::size_t input_length, std::size_t need)
{
    std::vector<int> out;
    for (int d : ops::kDivisors) {
        if (input_length / static_cast<std::size_t>(d) >= std::max<std::size_t>(need, 2)) {
            out.push_back(d);
        }
    }
    return out;
}

double pick_fraction(Rng& rng) { return ops::kFractions[rng.uniform_index(ops::kFractions.size())]; }

class Builder {
public:
    Builder(Rng& rng, GrowMethod method, std::size_t L)
        : rng_(rng)
        , method_(method)
        , plan_(L)
    {
    }

    Node slot(const std::vector<TypeTag>& accepted, std::size_t need, int budget)
    {
        std::vector<std::pair<Op, int>> candidates;
        int best = kInfeasible;
        for (TypeTag t : accepted) {
            for (Op op : producers(t)) {
                const int r = plan_.reach(op, need, budget);
                if (r >= 0) {
                    candidates.emplace_back(op, r);
                    best = std::max(best, r);
                }
            }
        }
        if (candidates.empty()) {
            throw Error(ErrorKind::InfeasibleDepth, "no subtree fits depth budget " + std::to_string(budget) + " with length >= "
                    + std::to_string(need) + " for series length " + std::to_string(plan_.series_length()));
        }
        if (method_ == GrowMethod::Full) {
            std::erase_if(candidates, [best](const auto& c) { return c.second != best; });
        }
        const Op op = candidates[rng_.uniform_index(candidates.size())].first;
        return build(op, need, budget);
    }

private:
    Node build(Op op, std::size_t need, int budget)
    {
        const std::size_t L = plan_.series_length();
        switch (op) {
        case Op::InputSeries: return make_input();
        case Op::SegDect: {
            const auto lo = static_cast<long long>(std::max<std::size_t>(need, 1));
            const auto len = rng_.uniform_int(lo, static_cast<long long>(L) - 1);
            const auto start = rng_.uniform_int(1, static_cast<long long>(L) - len + 1);
            return make_seg_dect(make_input(), static_cast<std::size_t>(len), static_cast<std::size_t>(start));
        }
        case Op::DomFreq: return make_domain(op, slot(Planner::signature_types(op), need, budget - 1));
        case Op::DomDiff:
            return make_domain(op, slot(Planner::signature_types(op), std::max<std::size_t>(need, 1) + 1, budget - 1));
        case Op::AdaPatch: {
            const std::size_t patch_need = std::max<std::size_t>(need, 2);
            Node input = slot(Planner::signature_types(op), 2 * patch_need, budget - 1);
            const auto divisors = feasible_divisors(series_length_of(input, L), patch_need);
            return make_patch(std::move(input), divisors[rng_.uniform_index(divisors.size())]);
        }
        case Op::ShapeInc:
        case Op::ShapeDec:
        case Op::ShapePeak:
        case Op::StatisDist: {
            Node input = slot(Planner::signature_types(op), min_extractor_length(op), budget - 1);
            return make_extractor(op, std::move(input), pick_fraction(rng_));
        }
        case Op::FeaCon2:
        case Op::FeaCon3:
        case Op::FeaCon4: {
            const std::size_t k = op == Op::FeaCon2 ? 2 : (op == Op::FeaCon3 ? 3 : 4);
            std::vector<Node> kids;
            for (std::size_t i = 0; i < k; ++i) {
                kids.push_back(slot({TypeTag::Vector}, 0, budget - 1));
            }
            return make_concat(std::move(kids));
        }
        case Op::FeaConH: {
            Node v = slot({TypeTag::Vector}, 0, budget - 1);
            Node vs = slot({TypeTag::Vectors}, 0, budget - 1);
            return make_concat_h(std::move(v), std::move(vs));
        }
        default: throw Error(ErrorKind::InvalidTree, "cannot generate " + std::string(op_name(op)));
        }
    }

    Rng& rng_;
    GrowMethod method_;
    Planner plan_;
};

} // namespace

ProgramTree generate_tree(Rng& rng, GrowMethod method, int depth_limit, std::size_t series_length)
{
    if (depth_limit < kMinTreeDepth) {
        throw Error(ErrorKind::InfeasibleDepth, "depth limit " + std::to_string(depth_limit) + " below the minimum tree depth");
    }
    Builder b(rng, method, series_length);
    return ProgramTree{b.slot({TypeTag::Vectors}, 0, std::min(depth_limit, kMaxTreeDepth)), series_length};
}

Node generate_subtree(Rng& rng, GrowMethod method, TypeTag type, int depth_budget, std::size_t min_length,
    std::size_t series_length)
{
    Builder b(rng, method, series_length);
    return b.slot({type}, min_length, depth_budget);
}

std::size_t required_output_length(const ProgramTree& tree, const NodePath& path)
{
    std::size_t need = 0;
    const Node* node = &tree.root;
    for (std::size_t idx : path) {
        switch (node->op) {
        case Op::DomFreq: break;
        case Op::DomDiff: need = std::max<std::size_t>(need, 1) + 1; break;
        case Op::AdaPatch:
            if (idx == 0) {
                need = static_cast<std::size_t>(node->children[1].value) * std::max<std::size_t>(need, 2);
            }
            break;
        case Op::ShapeInc:
        case Op::ShapeDec:
        case Op::ShapePeak:
        case Op::StatisDist: need = min_extractor_length(node->op); break;
        default: need = 0; break;
        }
        node = &node->children.at(idx);
    }
    return need;
}

void resample_terminal(Rng& rng, ProgramTree& tree, const NodePath& path)
{
    if (path.empty()) {
        throw Error(ErrorKind::InvalidTree, "the root is not a terminal");
    }
    NodePath parent_path(path.begin(), path.end() - 1);
    Node& parent = node_at(tree.root, parent_path);
    Node& term = node_at(tree.root, path);
    const std::size_t L = tree.series_length;
    switch (term.op) {
    case Op::TermLenSeg: {
        const auto lo = static_cast<long long>(std::max<std::size_t>(required_output_length(tree, parent_path), 1));
        term.value = static_cast<double>(rng.uniform_int(lo, static_cast<long long>(L) - 1));
        Node& start = parent.children[2];
        if (start.value > static_cast<double>(L) - term.value + 1) {
            start.value = static_cast<double>(rng.uniform_int(1, static_cast<long long>(L - static_cast<std::size_t>(term.value) + 1)));
        }
        break;
    }
    case Op::TermStartSeg: {
        const auto len = static_cast<long long>(parent.children[1].value);
        term.value = static_cast<double>(rng.uniform_int(1, static_cast<long long>(L) - len + 1));
        break;
    }
    case Op::TermDivisor: {
        const std::size_t need = std::max<std::size_t>(required_output_length(tree, parent_path), 2);
        const auto divisors = feasible_divisors(series_length_of(parent.children[0], L), need);
        if (divisors.empty()) {
            throw Error(ErrorKind::InfeasibleDepth, "no patch divisor fits this input");
        }
        term.value = divisors[rng.uniform_index(divisors.size())];
        break;
    }
    case Op::TermTau:
    case Op::TermLambda: term.value = pick_fraction(rng); break;
    default: throw Error(ErrorKind::InvalidTree, "not a value terminal: " + std::string(op_name(term.op)));
    }
}

} // namespace tsgp
