#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "tsgp/program.hpp"

namespace tsgp {

inline constexpr int kModelFormatVersion = 1;

/// Version string recorded in artifacts.
std::string_view tool_version() noexcept;

struct ModelMeta {
    std::uint64_t seed = 0;
    std::string dataset;
    std::string created; ///< producing tool and version; no timestamp, so outputs stay reproducible
};

nlohmann::json node_to_json(const Node& node);
/// Throws MalformedModel on unknown ops or missing fields (no validation).
Node node_from_json(const nlohmann::json& j);

/// Minimal model document: format_version, series_length, tree, meta.
nlohmann::json tree_document(const ProgramTree& tree, const ModelMeta& meta);

std::string serialize_tree(const ProgramTree& tree, const ModelMeta& meta = {});

/// Reads the tree out of any model document (extra fields are ignored).
/// Throws MalformedModel on parse failure or if the tree does not validate.
ProgramTree deserialize_tree(std::string_view text);
ProgramTree tree_from_document(const nlohmann::json& doc);

/// Compact single-line form of the tree alone; used as a cache key and hash input.
std::string canonical_tree_key(const ProgramTree& tree);

} // namespace tsgp
