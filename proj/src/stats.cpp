#include "tsgp/stats.hpp"

#include <iomanip>
#include <map>

#include "tsgp/render.hpp"

namespace tsgp {

const StatsRow* StatsTable::find(std::string_view category, std::string_view item) const
{
    for (const auto& r : rows) {
        if (r.category == category && r.item == item) {
            return &r;
        }
    }
    return nullptr;
}

StatsTable structural_stats(std::span<const ProgramTree> trees)
{
    std::map<std::string, std::size_t> counts;
    StatsTable table;
    table.trees = trees.size();
    for (const auto& tree : trees) {
        for (const auto& [path, depth] : preorder_paths(tree.root)) {
            const Op op = node_at(tree.root, path).op;
            if (is_concat(op)) {
                ++table.concat_nodes;
                ++counts["concat/" + std::string(op_name(op))];
            }
        }
        for (const auto& b : branch_summaries(tree)) {
            ++table.branches;
            ++counts[b.has_segment ? "segment/SegDect" : "segment/NoSeg"];
            ++counts[b.domain == Op::DomFreq ? "domain/Freq" : (b.domain == Op::DomDiff ? "domain/Diff" : "domain/Raw")];
            ++counts[b.divisor > 0 ? "patch/D=" + std::to_string(b.divisor) : "patch/NoPatch"];
            ++counts[b.extractor == Op::StatisDist ? "extraction/StatisDist" : "extraction/Shape"];
            ++counts["extraction_detail/" + std::string(op_name(b.extractor))];
        }
    }

    auto add = [&](const std::string& category, const std::string& item, std::size_t denominator) {
        StatsRow r;
        r.category = category;
        r.item = item;
        r.count = counts[category + "/" + item];
        r.denominator = denominator;
        r.defined = denominator > 0;
        r.proportion = r.defined ? static_cast<double>(r.count) / static_cast<double>(denominator) : 0.0;
        table.rows.push_back(r);
    };
    add("segment", "SegDect", table.branches);
    add("segment", "NoSeg", table.branches);
    for (const char* d : {"Raw", "Freq", "Diff"}) {
        add("domain", d, table.branches);
    }
    for (int d : ops::kDivisors) {
        add("patch", "D=" + std::to_string(d), table.branches);
    }
    add("patch", "NoPatch", table.branches);
    add("extraction", "Shape", table.branches);
    add("extraction", "StatisDist", table.branches);
    for (Op op : {Op::ShapeInc, Op::ShapeDec, Op::ShapePeak, Op::StatisDist}) {
        add("extraction_detail", std::string(op_name(op)), table.branches);
    }
    for (Op op : {Op::FeaCon2, Op::FeaCon3, Op::FeaCon4, Op::FeaConH}) {
        add("concat", std::string(op_name(op)), table.concat_nodes);
    }
    return table;
}

void write_stats_csv(std::ostream& os, const StatsTable& table)
{
    os << "category,item,count,denominator,proportion,defined\n";
    for (const auto& r : table.rows) {
        os << r.category << ',' << r.item << ',' << r.count << ',' << r.denominator << ',' << std::setprecision(12)
           << r.proportion << ',' << (r.defined ? "true" : "false") << '\n';
    }
}

} // namespace tsgp
