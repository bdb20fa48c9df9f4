#pragma once

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tsgp/program.hpp"

namespace tsgp {

/// One proportion. Branch categories (segment, domain, patch, extraction,
/// extraction_detail) divide by the number of branches; concat divides by
/// the number of concatenation nodes.
struct StatsRow {
    std::string category;
    std::string item;
    std::size_t count = 0;
    std::size_t denominator = 0;
    double proportion = 0.0;
    bool defined = false; ///< false when the denominator is zero
};

struct StatsTable {
    std::size_t trees = 0;
    std::size_t branches = 0;
    std::size_t concat_nodes = 0;
    std::vector<StatsRow> rows;

    const StatsRow* find(std::string_view category, std::string_view item) const;
};

StatsTable structural_stats(std::span<const ProgramTree> trees);

/// `category,item,count,denominator,proportion,defined`
void write_stats_csv(std::ostream& os, const StatsTable& table);

} // namespace tsgp
