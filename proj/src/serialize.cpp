#include "tsgp/serialize.hpp"

#include <cmath>

#include "tsgp/error.hpp"

namespace tsgp {

using nlohmann::json;

std::string_view tool_version() noexcept { return TSGP_VERSION; }

json node_to_json(const Node& node)
{
    json j;
    j["op"] = op_name(node.op);
    if (is_value_terminal(node.op)) {
        if (is_integer_terminal(node.op)) {
            j["value"] = static_cast<long long>(node.value);
        } else {
            j["value"] = node.value;
        }
    }
    json kids = json::array();
    for (const auto& c : node.children) {
        kids.push_back(node_to_json(c));
    }
    j["children"] = std::move(kids);
    return j;
}

Node node_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("op") || !j["op"].is_string()) {
        throw Error(ErrorKind::MalformedModel, "tree node without a string \"op\"");
    }
    const auto name = j["op"].get<std::string>();
    const auto op = op_from_name(name);
    if (!op) {
        throw Error(ErrorKind::MalformedModel, "unknown op \"" + name + "\"");
    }
    Node n{*op, 0.0, {}};
    if (is_value_terminal(*op)) {
        if (!j.contains("value") || !j["value"].is_number()) {
            throw Error(ErrorKind::MalformedModel, name + " needs a numeric \"value\"");
        }
        n.value = j["value"].get<double>();
    }
    if (j.contains("children")) {
        if (!j["children"].is_array()) {
            throw Error(ErrorKind::MalformedModel, "\"children\" must be an array");
        }
        for (const auto& c : j["children"]) {
            n.children.push_back(node_from_json(c));
        }
    }
    return n;
}

json tree_document(const ProgramTree& tree, const ModelMeta& meta)
{
    json doc;
    doc["format_version"] = kModelFormatVersion;
    doc["series_length"] = tree.series_length;
    doc["tree"] = node_to_json(tree.root);
    doc["meta"] = {
        {"seed", meta.seed},
        {"dataset", meta.dataset},
        {"created", meta.created.empty() ? "tsgp " + std::string(tool_version()) : meta.created},
    };
    return doc;
}

std::string serialize_tree(const ProgramTree& tree, const ModelMeta& meta) { return tree_document(tree, meta).dump(2); }

ProgramTree tree_from_document(const json& doc)
{
    if (!doc.is_object()) {
        throw Error(ErrorKind::MalformedModel, "model document must be a JSON object");
    }
    if (!doc.contains("format_version") || doc["format_version"] != kModelFormatVersion) {
        throw Error(ErrorKind::MalformedModel, "unsupported or missing format_version");
    }
    if (!doc.contains("series_length") || !doc["series_length"].is_number_unsigned()) {
        throw Error(ErrorKind::MalformedModel, "missing series_length");
    }
    if (!doc.contains("tree")) {
        throw Error(ErrorKind::MalformedModel, "missing tree");
    }
    ProgramTree t{node_from_json(doc["tree"]), doc["series_length"].get<std::size_t>()};
    const auto report = validate_tree(t);
    if (!report.empty()) {
        throw Error(ErrorKind::MalformedModel, "tree does not validate:\n" + format_report(report));
    }
    return t;
}

ProgramTree deserialize_tree(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::MalformedModel, e.what());
    }
    return tree_from_document(doc);
}

std::string canonical_tree_key(const ProgramTree& tree)
{
    return std::to_string(tree.series_length) + ":" + node_to_json(tree.root).dump();
}

} // namespace tsgp
