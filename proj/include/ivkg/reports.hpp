#pragma once

#include "ivkg/miner.hpp"

#include <string>

namespace ivkg::report {

// JSON documents emitted by `ivkg mine` / `ivkg compare`. All carry
// tool_version and format_version; key order is fixed.
std::string stats_json(const MiningStats& s, const MineOptions& opts);
std::string quality_json(const QualityCounts& q, double threshold);
std::string overlap_json(const OverlapReport& r);
// {"stats": ..., "quality": ...} for single-stream output.
std::string mine_summary_json(const MiningStats& s, const QualityCounts& q, const MineOptions& opts, double threshold);

}  // namespace ivkg::report
