#pragma once

#include "ivkg/graph.hpp"

#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string_view>
#include <vector>

namespace ivkg {

// How the exclusion restriction is checked for a candidate (z, a, b).
//
// a_removed: a within k hops of z; b within k hops of a with z deleted (the
//   a -> b chain may not route back through the instrument); b does not reach
//   z within k hops once a is deleted; and z has no direct edge to b.
// literal: the search as printed, every test on the full graph; b must not
//   reach z and z must not reach b within k hops. Any chain z -> a -> b that
//   fits in k hops is therefore rejected.
enum class ExclusionMode { a_removed, literal };

enum class Quality { low, middle, high };

std::string_view to_string(Quality q);
std::string_view to_string(ExclusionMode m);
Quality quality_from_score(int score);

struct Triple {
    NodeId z = 0;
    NodeId a = 0;
    NodeId b = 0;
    auto operator<=>(const Triple&) const = default;
};

struct IvTriple {
    NodeId z = 0;
    NodeId a = 0;
    NodeId b = 0;
    bool z_is_edge_node = false;
    std::optional<double> w_za;
    std::optional<double> w_ab;
    int score = 0;
    Quality quality = Quality::low;

    Triple key() const { return {z, a, b}; }
};

struct MineOptions {
    ReachabilitySpec reach;  // excluded_node is ignored
    ExclusionMode exclusion = ExclusionMode::a_removed;
    unsigned workers = 1;
    // Restrict the Z loop to these candidates (all nodes when empty).
    std::vector<NodeId> z_candidates;
};

// Sorted ascending by (z, a, b). Output is independent of `workers`.
std::vector<Triple> enumerate_iv_triples(const CausalGraph& g, const MineOptions& opts);

IvTriple score_triple(const CausalGraph& g, const Triple& t, const ReachabilitySpec& reach,
                      double threshold = 5.0);

std::vector<IvTriple> score_triples(const CausalGraph& g, const std::vector<Triple>& ts,
                                    const ReachabilitySpec& reach, double threshold = 5.0);

struct Distribution {
    double min = 0, mean = 0, std = 0, max = 0;
};

struct MiningStats {
    std::size_t n_nodes = 0;
    std::size_t n_za_pairs = 0;
    std::size_t n_zab_triples = 0;
    Distribution per_z_pairs;    // distinct a per z
    Distribution per_z_triples;  // triples per z
};

// Per-Z distributions range over every node of g (zero-count nodes included)
// and use the population standard deviation. n_za_pairs counts distinct
// ordered (z, a) with a in reach(z).
MiningStats summarize(const std::vector<Triple>& triples, const CausalGraph& g, const ReachabilitySpec& reach);

struct QualityCounts {
    std::size_t low = 0;
    std::size_t middle = 0;
    std::size_t high = 0;
    std::size_t triples_with_edge_node_z = 0;
    std::size_t distinct_edge_node_z = 0;
    std::size_t total() const { return low + middle + high; }
};

QualityCounts quality_partition(const std::vector<IvTriple>& triples);

struct OverlapReport {
    std::vector<NodeId> exclusive_left;
    std::vector<NodeId> exclusive_right;
    std::vector<NodeId> shared;
};

// Compares the sets of distinct Z ids.
OverlapReport compare_subgraphs(const std::vector<Triple>& left, const std::vector<Triple>& right);

// Triples TSV: z a b z_term a_term b_term edge_node w_za w_ab score quality.
void write_triples_tsv(std::ostream& out, const CausalGraph& g, const std::vector<IvTriple>& triples);
// Reads the (z, a, b) columns of a triples TSV; other columns are ignored.
std::vector<Triple> read_triples_tsv(std::istream& in, std::string_view source = "triples");

}  // namespace ivkg
