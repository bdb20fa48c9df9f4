#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsgp/classifier.hpp"
#include "tsgp/program.hpp"

namespace tsgp {

/// Counting convention (one inference, 8-byte values):
///   SegDect, AdaPatch, concatenation     0
///   DomDiff on length l                  l - 1
///   DomFreq on length l                  8 l^2 + 4 l
///   shape kernel c on a patch of l_p     m (2c - 1) conv + m PPV + m MEAN + (m - 1) MAX, m = l_p - c + 1
///   StatisDist on a patch of l_p         l_p * ceil(log2 l_p) (sort comparisons, one FLOP each)
/// Extractor costs are per patch and per kernel length. Classifier cost, when
/// requested, is one comparison per level of each tree's deepest path.
struct NodeCost {
    std::string path;
    std::string op;
    std::uint64_t flops = 0;
    std::uint64_t live_bytes = 0; ///< total live memory while this node runs
};

struct CostReport {
    std::uint64_t flops = 0;
    std::uint64_t peak_bytes = 0;
    std::uint64_t classifier_flops = 0; ///< included in flops only when requested
    std::vector<NodeCost> breakdown;
};

/// Evaluation memory is simulated bottom-up: the input buffer is live
/// throughout, children run left to right and keep their outputs until the
/// parent has allocated its own output and finished, and extractors also hold
/// one scratch buffer (the largest activation map, or a sorted patch copy).
CostReport cost_report(const ProgramTree& tree, std::size_t series_length, const ExtraTreesModel* classifier = nullptr);
CostReport cost_report(const ProgramTree& tree, const ExtraTreesModel* classifier = nullptr);

std::uint64_t count_flops(const ProgramTree& tree, std::size_t series_length);
std::uint64_t peak_memory_bytes(const ProgramTree& tree, std::size_t series_length);

/// Worst-case comparisons for one prediction: sum over trees of the depth.
std::uint64_t classifier_flops(const ExtraTreesModel& m);

/// A microcontroller budget: SRAM and the FLOPs affordable in 100 ms at max clock.
struct DeviceEnvelope {
    std::string_view name;
    std::uint64_t sram_bytes;
    std::uint64_t flop_budget;
};

inline constexpr DeviceEnvelope kStm32F446RE{"stm32f446re", 128 * 1024, 18'000'000};
inline constexpr DeviceEnvelope kStm32L552ZE{"stm32l552ze", 256 * 1024, 11'000'000};

bool fits(const CostReport& r, const DeviceEnvelope& device);

nlohmann::json to_json(const CostReport& r);

/// `flops=<n> peak_bytes=<n> fits_stm32f446re=<bool> fits_stm32l552ze=<bool>`
std::string cost_summary_line(const CostReport& r);

} // namespace tsgp
