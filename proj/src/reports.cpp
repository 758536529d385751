#include "ivkg/reports.hpp"

#include "ivkg/version.hpp"

#include <json.hpp>

namespace ivkg::report {

using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json header() {
    ordered_json j;
    j["tool_version"] = kToolVersion;
    j["format_version"] = kFormatVersion;
    return j;
}

ordered_json dist(const Distribution& d) {
    return {{"min", d.min}, {"mean", d.mean}, {"std", d.std}, {"max", d.max}};
}

ordered_json stats_obj(const MiningStats& s, const MineOptions& opts) {
    auto j = header();
    j["hops"] = opts.reach.max_hops;
    j["direction"] = opts.reach.direction == Direction::directed ? "directed" : "undirected";
    j["exclusion"] = std::string(to_string(opts.exclusion));
    j["n_nodes"] = s.n_nodes;
    j["n_za_pairs"] = s.n_za_pairs;
    j["n_zab_triples"] = s.n_zab_triples;
    j["per_z"] = dist(s.per_z_triples);
    j["per_z_pairs"] = dist(s.per_z_pairs);
    return j;
}

ordered_json quality_obj(const QualityCounts& q, double threshold) {
    auto j = header();
    j["weight_threshold"] = threshold;
    j["n_triples"] = q.total();
    j["low"] = q.low;
    j["middle"] = q.middle;
    j["high"] = q.high;
    j["edge_node_triples"] = q.triples_with_edge_node_z;
    j["edge_node_z"] = q.distinct_edge_node_z;
    return j;
}

}  // namespace

std::string stats_json(const MiningStats& s, const MineOptions& opts) { return stats_obj(s, opts).dump(2) + "\n"; }

std::string quality_json(const QualityCounts& q, double threshold) { return quality_obj(q, threshold).dump(2) + "\n"; }

std::string overlap_json(const OverlapReport& r) {
    auto j = header();
    j["n_exclusive_left"] = r.exclusive_left.size();
    j["n_exclusive_right"] = r.exclusive_right.size();
    j["n_shared"] = r.shared.size();
    j["exclusive_left"] = r.exclusive_left;
    j["exclusive_right"] = r.exclusive_right;
    j["shared"] = r.shared;
    return j.dump(2) + "\n";
}

std::string mine_summary_json(const MiningStats& s, const QualityCounts& q, const MineOptions& opts, double threshold) {
    auto j = header();
    j["stats"] = stats_obj(s, opts);
    j["quality"] = quality_obj(q, threshold);
    return j.dump(2) + "\n";
}

}  // namespace ivkg::report
