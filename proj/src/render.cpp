#include "tsgp/render.hpp"

#include <cctype>
#include <charconv>

#include "tsgp/error.hpp"

namespace tsgp {

namespace {

std::string format_value(double v)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void render_into(const Node& node, std::string& out)
{
    switch (node.op) {
    case Op::InputSeries: out += 'x'; return;
    case Op::TermLenSeg:
    case Op::TermStartSeg: out += format_value(node.value); return;
    case Op::TermDivisor: out += '/' + format_value(node.value); return;
    case Op::TermTau: out += "τ=" + format_value(node.value); return;
    case Op::TermLambda: out += "λ=" + format_value(node.value); return;
    default: break;
    }
    out += op_name(node.op);
    out += '(';
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i > 0) {
            out += ", ";
        }
        render_into(node.children[i], out);
    }
    out += ')';
}

class Parser {
public:
    explicit Parser(std::string_view text)
        : s_(text)
    {
    }

    Node parse_top()
    {
        Node n = expr(std::nullopt);
        skip_ws();
        if (pos_ != s_.size()) {
            fail("trailing characters");
        }
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw Error(ErrorKind::MalformedModel, "render parse error at offset " + std::to_string(pos_) + ": " + what);
    }

    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
            ++pos_;
        }
    }

    bool eat(std::string_view token)
    {
        skip_ws();
        if (s_.substr(pos_, token.size()) == token) {
            pos_ += token.size();
            return true;
        }
        return false;
    }

    double number()
    {
        skip_ws();
        double v = 0.0;
        const auto res = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
        if (res.ec != std::errc()) {
            fail("expected a number");
        }
        pos_ = static_cast<std::size_t>(res.ptr - s_.data());
        return v;
    }

    /// `expected` names the terminal kind a bare number stands for.
    Node expr(std::optional<Op> expected)
    {
        skip_ws();
        if (eat("x")) {
            if (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) {
                fail("unexpected identifier");
            }
            return make_input();
        }
        if (eat("/")) {
            return make_terminal(Op::TermDivisor, number());
        }
        if (eat("τ=")) {
            return make_terminal(Op::TermTau, number());
        }
        if (eat("λ=")) {
            return make_terminal(Op::TermLambda, number());
        }
        if (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-')) {
            if (!expected) {
                fail("unexpected number");
            }
            return make_terminal(*expected, number());
        }
        std::size_t end = pos_;
        while (end < s_.size() && std::isalnum(static_cast<unsigned char>(s_[end]))) {
            ++end;
        }
        const auto name = s_.substr(pos_, end - pos_);
        const auto op = op_from_name(name);
        if (!op || is_terminal(*op)) {
            fail("unknown operator '" + std::string(name) + "'");
        }
        pos_ = end;
        if (!eat("(")) {
            fail("expected '('");
        }
        Node n{*op, 0.0, {}};
        std::size_t index = 0;
        do {
            std::optional<Op> hint;
            if (*op == Op::SegDect) {
                hint = index == 1 ? Op::TermLenSeg : Op::TermStartSeg;
            }
            n.children.push_back(expr(hint));
            ++index;
        } while (eat(","));
        if (!eat(")")) {
            fail("expected ')'");
        }
        return n;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

} // namespace

std::string render_node(const Node& node)
{
    std::string out;
    render_into(node, out);
    return out;
}

std::string render_tree(const ProgramTree& tree) { return render_node(tree.root); }

ProgramTree parse_rendered(std::string_view text, std::size_t series_length)
{
    Parser p(text);
    return ProgramTree{p.parse_top(), series_length};
}

std::string BranchSummary::describe() const
{
    std::string s;
    if (has_segment) {
        s += "SegDect[" + std::to_string(segment_start) + ".." + std::to_string(segment_start + segment_length - 1) + "]";
    } else {
        s += "NoSeg";
    }
    s += " → ";
    s += domain == Op::DomFreq ? "Freq" : (domain == Op::DomDiff ? "Diff" : "Raw");
    s += " → ";
    s += divisor > 0 ? "Patch/" + std::to_string(divisor) : "NoPatch";
    s += " → ";
    s += op_name(extractor);
    return s;
}

std::vector<BranchSummary> branch_summaries(const ProgramTree& tree)
{
    std::vector<BranchSummary> out;
    for (const auto& [path, depth] : preorder_paths(tree.root)) {
        const Node& ex = node_at(tree.root, path);
        if (!is_extractor(ex.op)) {
            continue;
        }
        BranchSummary b;
        b.path = path;
        b.extractor = ex.op;
        b.parameter = ex.children.at(1).value;
        const Node* cur = &ex.children.at(0);
        while (cur->op != Op::InputSeries) {
            switch (cur->op) {
            case Op::AdaPatch: b.divisor = static_cast<int>(cur->children.at(1).value); break;
            case Op::DomFreq:
            case Op::DomDiff: b.domain = cur->op; break;
            case Op::SegDect:
                b.has_segment = true;
                b.segment_length = static_cast<std::size_t>(cur->children.at(1).value);
                b.segment_start = static_cast<std::size_t>(cur->children.at(2).value);
                break;
            default: throw Error(ErrorKind::InvalidTree, "unexpected node inside a branch");
            }
            cur = &cur->children.at(0);
        }
        out.push_back(b);
    }
    return out;
}

} // namespace tsgp
