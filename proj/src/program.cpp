#include "tsgp/program.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <variant>

#include "tsgp/error.hpp"

namespace tsgp {

namespace {

constexpr std::array<std::string_view, kOpCount> kOpNames{
    "SegDect",
    "DomFreq",
    "DomDiff",
    "AdaPatch",
    "ShapeInc",
    "ShapeDec",
    "ShapePeak",
    "StatisDist",
    "FeaCon2",
    "FeaCon3",
    "FeaCon4",
    "FeaConH",
    "InputSeries",
    "TermLenSeg",
    "TermStartSeg",
    "TermDivisor",
    "TermTau",
    "TermLambda",
};

constexpr std::array<TypeTag, 4> kExtractorInputs{
    TypeTag::SeriesRaw, TypeTag::SegmentLocated, TypeTag::SegmentTransformed, TypeTag::Patches};

ops::Extractor extractor_for(Op op, double parameter)
{
    switch (op) {
    case Op::ShapeInc: return {ops::Extractor::Kind::ShapeInc, parameter};
    case Op::ShapeDec: return {ops::Extractor::Kind::ShapeDec, parameter};
    case Op::ShapePeak: return {ops::Extractor::Kind::ShapePeak, parameter};
    default: return {ops::Extractor::Kind::StatisDist, parameter};
    }
}

bool is_integral(double v) { return std::isfinite(v) && v == std::floor(v); }

} // namespace

std::string_view op_name(Op op) noexcept { return kOpNames[static_cast<std::size_t>(op)]; }

std::optional<Op> op_from_name(std::string_view name) noexcept
{
    for (std::size_t i = 0; i < kOpNames.size(); ++i) {
        if (kOpNames[i] == name) {
            return static_cast<Op>(i);
        }
    }
    return std::nullopt;
}

TypeTag output_type(Op op) noexcept
{
    switch (op) {
    case Op::SegDect: return TypeTag::SegmentLocated;
    case Op::DomFreq:
    case Op::DomDiff: return TypeTag::SegmentTransformed;
    case Op::AdaPatch: return TypeTag::Patches;
    case Op::ShapeInc:
    case Op::ShapeDec:
    case Op::ShapePeak:
    case Op::StatisDist: return TypeTag::Vector;
    case Op::FeaCon2:
    case Op::FeaCon3:
    case Op::FeaCon4:
    case Op::FeaConH: return TypeTag::Vectors;
    case Op::InputSeries: return TypeTag::SeriesRaw;
    case Op::TermLenSeg: return TypeTag::LenSeg;
    case Op::TermStartSeg: return TypeTag::StartSeg;
    case Op::TermDivisor: return TypeTag::Divisor;
    case Op::TermTau: return TypeTag::Tau;
    case Op::TermLambda: return TypeTag::Lambda;
    }
    return TypeTag::SeriesRaw;
}

std::string_view type_name(TypeTag tag) noexcept
{
    switch (tag) {
    case TypeTag::SeriesRaw: return "Series";
    case TypeTag::SegmentLocated: return "SegmentLocated";
    case TypeTag::SegmentTransformed: return "SegmentTransformed";
    case TypeTag::Patches: return "Patches";
    case TypeTag::Vector: return "Vector";
    case TypeTag::Vectors: return "Vectors";
    case TypeTag::LenSeg: return "LenSeg";
    case TypeTag::StartSeg: return "StartSeg";
    case TypeTag::Divisor: return "Divisor";
    case TypeTag::Tau: return "Tau";
    case TypeTag::Lambda: return "Lambda";
    }
    return "?";
}

bool is_terminal(Op op) noexcept { return static_cast<std::size_t>(op) >= static_cast<std::size_t>(Op::InputSeries); }
bool is_value_terminal(Op op) noexcept { return is_terminal(op) && op != Op::InputSeries; }
bool is_extractor(Op op) noexcept { return output_type(op) == TypeTag::Vector; }
bool is_concat(Op op) noexcept { return output_type(op) == TypeTag::Vectors; }
bool is_integer_terminal(Op op) noexcept
{
    return op == Op::TermLenSeg || op == Op::TermStartSeg || op == Op::TermDivisor;
}

std::vector<std::vector<TypeTag>> child_signature(Op op)
{
    const std::vector<TypeTag> extractor_input(kExtractorInputs.begin(), kExtractorInputs.end());
    switch (op) {
    case Op::SegDect: return {{TypeTag::SeriesRaw}, {TypeTag::LenSeg}, {TypeTag::StartSeg}};
    case Op::DomFreq:
    case Op::DomDiff: return {{TypeTag::SeriesRaw, TypeTag::SegmentLocated}};
    case Op::AdaPatch:
        return {{TypeTag::SeriesRaw, TypeTag::SegmentLocated, TypeTag::SegmentTransformed}, {TypeTag::Divisor}};
    case Op::ShapeInc:
    case Op::ShapeDec:
    case Op::ShapePeak: return {extractor_input, {TypeTag::Lambda}};
    case Op::StatisDist: return {extractor_input, {TypeTag::Tau}};
    case Op::FeaCon2: return {{TypeTag::Vector}, {TypeTag::Vector}};
    case Op::FeaCon3: return {{TypeTag::Vector}, {TypeTag::Vector}, {TypeTag::Vector}};
    case Op::FeaCon4: return {{TypeTag::Vector}, {TypeTag::Vector}, {TypeTag::Vector}, {TypeTag::Vector}};
    case Op::FeaConH: return {{TypeTag::Vector}, {TypeTag::Vectors}};
    default: return {};
    }
}

// -- construction -------------------------------------------------------------

Node make_input() { return Node{Op::InputSeries, 0.0, {}}; }

Node make_terminal(Op kind, double value) { return Node{kind, value, {}}; }

Node make_seg_dect(Node input, std::size_t length, std::size_t start)
{
    Node n{Op::SegDect, 0.0, {}};
    n.children.push_back(std::move(input));
    n.children.push_back(make_terminal(Op::TermLenSeg, static_cast<double>(length)));
    n.children.push_back(make_terminal(Op::TermStartSeg, static_cast<double>(start)));
    return n;
}

Node make_domain(Op transform, Node input)
{
    Node n{transform, 0.0, {}};
    n.children.push_back(std::move(input));
    return n;
}

Node make_patch(Node input, int divisor)
{
    Node n{Op::AdaPatch, 0.0, {}};
    n.children.push_back(std::move(input));
    n.children.push_back(make_terminal(Op::TermDivisor, divisor));
    return n;
}

Node make_extractor(Op kind, Node input, double parameter)
{
    Node n{kind, 0.0, {}};
    n.children.push_back(std::move(input));
    n.children.push_back(make_terminal(kind == Op::StatisDist ? Op::TermTau : Op::TermLambda, parameter));
    return n;
}

Node make_concat(std::vector<Node> children)
{
    Op op = Op::FeaCon2;
    if (children.size() == 3) {
        op = Op::FeaCon3;
    } else if (children.size() == 4) {
        op = Op::FeaCon4;
    }
    return Node{op, 0.0, std::move(children)};
}

Node make_concat_h(Node vector, Node vectors)
{
    Node n{Op::FeaConH, 0.0, {}};
    n.children.push_back(std::move(vector));
    n.children.push_back(std::move(vectors));
    return n;
}

// -- traversal ----------------------------------------------------------------

std::string path_string(const NodePath& path)
{
    std::string s = "root";
    for (std::size_t i : path) {
        s += '/';
        s += std::to_string(i);
    }
    return s;
}

std::size_t node_depth(const Node& node)
{
    std::size_t d = 0;
    for (const auto& c : node.children) {
        d = std::max(d, 1 + node_depth(c));
    }
    return d;
}

std::size_t node_count(const Node& node)
{
    std::size_t n = 1;
    for (const auto& c : node.children) {
        n += node_count(c);
    }
    return n;
}

std::size_t ProgramTree::depth() const { return node_depth(root); }
std::size_t ProgramTree::size() const { return node_count(root); }

namespace {

void collect_paths(const Node& node, NodePath& path, std::vector<std::pair<NodePath, std::size_t>>& out)
{
    out.emplace_back(path, path.size());
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        path.push_back(i);
        collect_paths(node.children[i], path, out);
        path.pop_back();
    }
}

} // namespace

std::vector<std::pair<NodePath, std::size_t>> preorder_paths(const Node& root)
{
    std::vector<std::pair<NodePath, std::size_t>> out;
    NodePath path;
    collect_paths(root, path, out);
    return out;
}

const Node& node_at(const Node& root, const NodePath& path)
{
    const Node* n = &root;
    for (std::size_t i : path) {
        n = &n->children.at(i);
    }
    return *n;
}

Node& node_at(Node& root, const NodePath& path)
{
    Node* n = &root;
    for (std::size_t i : path) {
        n = &n->children.at(i);
    }
    return *n;
}

// -- checking -----------------------------------------------------------------

namespace {

/// Walks a tree computing static shapes; records every broken invariant.
class Checker {
public:
    Checker(std::size_t series_length, ValidationReport* report)
        : L_(series_length)
        , report_(report)
    {
    }

    std::vector<NodeShape> shapes;
    bool failed = false;

    std::optional<NodeShape> visit(const Node& node, NodePath& path)
    {
        const std::size_t slot = shapes.size();
        shapes.push_back({output_type(node.op), 0, 0, 0});

        const auto signature = child_signature(node.op);
        if (node.children.size() != signature.size()) {
            flag(Violation::Category::Arity, path,
                std::string(op_name(node.op)) + " takes " + std::to_string(signature.size()) + " children, has "
                    + std::to_string(node.children.size()));
            // still descend so nested problems surface
            for (std::size_t i = 0; i < node.children.size(); ++i) {
                path.push_back(i);
                visit(node.children[i], path);
                path.pop_back();
            }
            return std::nullopt;
        }

        std::vector<std::optional<NodeShape>> kids;
        bool typed = true;
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            path.push_back(i);
            const TypeTag got = output_type(node.children[i].op);
            const auto& allowed = signature[i];
            if (std::find(allowed.begin(), allowed.end(), got) == allowed.end()) {
                flag(Violation::Category::Type, path,
                    std::string(op_name(node.op)) + " cannot take " + std::string(type_name(got)) + " as argument "
                        + std::to_string(i));
                typed = false;
            }
            kids.push_back(visit(node.children[i], path));
            path.pop_back();
        }
        if (!typed || std::any_of(kids.begin(), kids.end(), [](const auto& k) { return !k.has_value(); })) {
            return std::nullopt;
        }

        auto out = shape_of(node, kids, path);
        if (out) {
            shapes[slot] = *out;
        }
        return out;
    }

private:
    void flag(Violation::Category category, const NodePath& path, std::string message)
    {
        failed = true;
        if (report_) {
            report_->push_back({category, path_string(path), std::move(message)});
        }
    }

    std::optional<NodeShape> shape_of(const Node& node, const std::vector<std::optional<NodeShape>>& kids, const NodePath& path)
    {
        using Cat = Violation::Category;
        const TypeTag type = output_type(node.op);
        switch (node.op) {
        case Op::InputSeries: return NodeShape{type, L_, 0, 0};
        case Op::TermLenSeg:
        case Op::TermStartSeg:
        case Op::TermDivisor:
            if (!is_integral(node.value)) {
                flag(Cat::Terminal, path, std::string(op_name(node.op)) + " must be an integer");
                return std::nullopt;
            }
            return NodeShape{type, 0, 0, 0};
        case Op::TermTau:
        case Op::TermLambda:
            if (!ops::is_fraction(node.value)) {
                flag(Cat::Terminal, path, std::string(op_name(node.op)) + " must be one of 0.25, 0.5, 0.75");
                return std::nullopt;
            }
            return NodeShape{type, 0, 0, 0};
        case Op::SegDect: {
            const double len = node.children[1].value;
            const double start = node.children[2].value;
            if (len < 1 || len > static_cast<double>(L_) - 1) {
                flag(Cat::Terminal, path, "l_seg out of range [1, " + std::to_string(L_ - 1) + "]");
                return std::nullopt;
            }
            if (start < 1 || start > static_cast<double>(L_) - len + 1) {
                flag(Cat::Terminal, path, "s_seg out of range [1, " + std::to_string(L_ - static_cast<std::size_t>(len) + 1) + "]");
                return std::nullopt;
            }
            return NodeShape{type, static_cast<std::size_t>(len), 0, 0};
        }
        case Op::DomFreq: return NodeShape{type, kids[0]->length, 0, 0};
        case Op::DomDiff:
            if (kids[0]->length < 2) {
                flag(Cat::Length, path, "DomDiff needs an input of length >= 2");
                return std::nullopt;
            }
            return NodeShape{type, kids[0]->length - 1, 0, 0};
        case Op::AdaPatch: {
            const double divisor = node.children[1].value;
            if (!ops::is_divisor(static_cast<int>(divisor)) || divisor != std::floor(divisor)) {
                flag(Cat::Terminal, path, "patch divisor must be one of 2, 4, 8, 16, 32, 64");
                return std::nullopt;
            }
            const std::size_t in = kids[0]->length;
            if (in / static_cast<std::size_t>(divisor) < 2) {
                flag(Cat::Length, path,
                    "patch length floor(" + std::to_string(in) + "/" + std::to_string(static_cast<int>(divisor)) + ") < 2");
                return std::nullopt;
            }
            const auto g = ops::patch_geometry(in, static_cast<int>(divisor));
            return NodeShape{type, g.patch_length, g.count, g.stride};
        }
        case Op::ShapeInc:
        case Op::ShapeDec:
        case Op::ShapePeak:
        case Op::StatisDist: {
            const auto ex = extractor_for(node.op, node.children[1].value);
            const NodeShape& in = *kids[0];
            if (in.length < ex.min_patch_length()) {
                flag(Cat::Length, path,
                    std::string(op_name(node.op)) + " needs input length >= " + std::to_string(ex.min_patch_length()) + ", got "
                        + std::to_string(in.length));
                return std::nullopt;
            }
            const std::size_t per = ex.dimension(in.length);
            const std::size_t count = in.type == TypeTag::Patches ? in.patch_count : 1;
            return NodeShape{type, per * count, 0, 0};
        }
        case Op::FeaCon2:
        case Op::FeaCon3:
        case Op::FeaCon4:
        case Op::FeaConH: {
            std::size_t dim = 0;
            for (const auto& k : kids) {
                dim += k->length;
            }
            return NodeShape{type, dim, 0, 0};
        }
        }
        return std::nullopt;
    }

    std::size_t L_;
    ValidationReport* report_;
};

} // namespace

std::optional<std::vector<NodeShape>> analyze_shapes(const ProgramTree& tree)
{
    Checker checker(tree.series_length, nullptr);
    NodePath path;
    auto top = checker.visit(tree.root, path);
    if (!top || checker.failed) {
        return std::nullopt;
    }
    return std::move(checker.shapes);
}

std::size_t output_dimension(const ProgramTree& tree)
{
    auto shapes = analyze_shapes(tree);
    if (!shapes) {
        throw Error(ErrorKind::InvalidTree, "cannot infer the output dimension of an invalid tree");
    }
    return shapes->front().length;
}

ValidationReport validate_tree(const ProgramTree& tree, int min_depth, int max_depth)
{
    ValidationReport report;
    if (tree.series_length < 2) {
        report.push_back({Violation::Category::Length, "root", "series length must be >= 2"});
        return report;
    }
    if (output_type(tree.root.op) != TypeTag::Vectors) {
        report.push_back({Violation::Category::Type, "root",
            "root must be a concatenation (Vectors), got " + std::string(op_name(tree.root.op))});
    }
    Checker checker(tree.series_length, &report);
    NodePath path;
    checker.visit(tree.root, path);
    const auto depth = static_cast<int>(tree.depth());
    if (depth < min_depth || depth > max_depth) {
        report.push_back({Violation::Category::Depth, "root",
            "depth " + std::to_string(depth) + " outside [" + std::to_string(min_depth) + ", " + std::to_string(max_depth) + "]"});
    }
    return report;
}

bool is_valid(const ProgramTree& tree, int min_depth, int max_depth)
{
    return validate_tree(tree, min_depth, max_depth).empty();
}

std::string format_report(const ValidationReport& report)
{
    std::ostringstream os;
    for (const auto& v : report) {
        os << v.path << ": " << v.message << '\n';
    }
    return os.str();
}

// -- evaluation ---------------------------------------------------------------

namespace {

using Value = std::variant<ops::Series, ops::PatchSet>;

const ops::Series& as_series(const Value& v)
{
    if (const auto* s = std::get_if<ops::Series>(&v)) {
        return *s;
    }
    throw Error(ErrorKind::InvalidTree, "expected a series-valued argument");
}

class Evaluator {
public:
    Evaluator(std::span<const double> x, EvalTrace* trace)
        : x_(x)
        , trace_(trace)
    {
    }

    Value eval(const Node& node)
    {
        std::size_t slot = 0;
        if (trace_) {
            slot = trace_->observed.size();
            trace_->observed.push_back({output_type(node.op), 0, 0, 0});
        }
        Value v = compute(node);
        if (trace_) {
            NodeShape& s = trace_->observed[slot];
            if (const auto* p = std::get_if<ops::PatchSet>(&v)) {
                s.length = p->patch_length;
                s.patch_count = p->count();
                s.patch_stride = p->stride;
            } else {
                s.length = std::get<ops::Series>(v).size();
            }
        }
        return v;
    }

private:
    void trace_terminal(const Node& node)
    {
        if (trace_) {
            trace_->observed.push_back({output_type(node.op), 0, 0, 0});
        }
    }

    Value compute(const Node& node)
    {
        switch (node.op) {
        case Op::InputSeries: return ops::Series(x_.begin(), x_.end());
        case Op::SegDect: {
            Value in = eval(node.children[0]);
            trace_terminal(node.children[1]);
            trace_terminal(node.children[2]);
            return ops::seg_detect(as_series(in), static_cast<std::size_t>(node.children[1].value),
                static_cast<std::size_t>(node.children[2].value));
        }
        case Op::DomFreq: return ops::dom_freq(as_series(eval(node.children[0])));
        case Op::DomDiff: return ops::dom_diff(as_series(eval(node.children[0])));
        case Op::AdaPatch: {
            Value in = eval(node.children[0]);
            trace_terminal(node.children[1]);
            return ops::ada_patch(as_series(in), static_cast<int>(node.children[1].value));
        }
        case Op::ShapeInc:
        case Op::ShapeDec:
        case Op::ShapePeak:
        case Op::StatisDist: {
            Value in = eval(node.children[0]);
            trace_terminal(node.children[1]);
            const auto ex = extractor_for(node.op, node.children[1].value);
            if (const auto* patches = std::get_if<ops::PatchSet>(&in)) {
                return ops::extract_over_patches(*patches, ex);
            }
            return ex(std::get<ops::Series>(in));
        }
        case Op::FeaCon2:
        case Op::FeaCon3:
        case Op::FeaCon4:
        case Op::FeaConH: {
            ops::Series out;
            for (const auto& c : node.children) {
                Value part = eval(c);
                const auto& s = as_series(part);
                out.insert(out.end(), s.begin(), s.end());
            }
            return out;
        }
        default: throw Error(ErrorKind::InvalidTree, "terminal " + std::string(op_name(node.op)) + " evaluated as a function");
        }
    }

    std::span<const double> x_;
    EvalTrace* trace_;
};

void require_valid(const ProgramTree& tree)
{
    auto report = validate_tree(tree);
    if (!report.empty()) {
        throw Error(ErrorKind::InvalidTree, format_report(report));
    }
}

} // namespace

ops::Series evaluate_tree(const ProgramTree& tree, std::span<const double> x, EvalTrace* trace)
{
    if (x.size() != tree.series_length) {
        throw Error(ErrorKind::LengthMismatch, "series of length " + std::to_string(x.size()) + " given to a tree built for length "
                + std::to_string(tree.series_length));
    }
    Evaluator ev(x, trace);
    return as_series(ev.eval(tree.root));
}

FeatureMatrix transform_dataset(const ProgramTree& tree, const Dataset& d, Exec exec)
{
    require_valid(tree);
    if (d.length() != tree.series_length) {
        throw Error(ErrorKind::LengthMismatch, "dataset series length " + std::to_string(d.length()) + " != model length "
                + std::to_string(tree.series_length));
    }
    FeatureMatrix m(d.size(), output_dimension(tree));
    m.labels = d.labels();
    parallel_for(exec, d.size(), [&](std::size_t i) {
        const ops::Series z = evaluate_tree(tree, d.series[i].values);
        std::copy(z.begin(), z.end(), m.row(i).begin());
    });
    return m;
}

FeatureMatrix transform_dataset_serial(const ProgramTree& tree, const Dataset& d)
{
    require_valid(tree);
    if (d.length() != tree.series_length) {
        throw Error(ErrorKind::LengthMismatch, "dataset series length does not match the model");
    }
    FeatureMatrix m;
    m.rows = d.size();
    for (const auto& s : d.series) {
        const ops::Series z = evaluate_tree(tree, s.values);
        if (m.cols == 0) {
            m.cols = z.size();
        }
        m.values.insert(m.values.end(), z.begin(), z.end());
        m.labels.push_back(s.label);
    }
    return m;
}

} // namespace tsgp
