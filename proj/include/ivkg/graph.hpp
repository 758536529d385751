#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ivkg {

using NodeId = std::uint64_t;

enum class Direction { directed, undirected };

struct ReachabilitySpec {
    int max_hops = 3;
    Direction direction = Direction::directed;
    std::optional<NodeId> excluded_node;
};

struct Edge {
    NodeId src = 0;
    NodeId dst = 0;
    double weight = 1.0;
};

// Weighted directed cause -> effect concept graph. Immutable once built; all
// queries are const and safe to call from several threads.
//
// Node ids are external (sparse, arbitrary); internally every node gets a dense
// index in ascending id order so that traversal order is deterministic.
class CausalGraph {
public:
    struct Arc {
        std::size_t to;  // dense index
        double weight;
    };

    CausalGraph() = default;

    // Validates and builds. Throws IntegrityError on dangling endpoints,
    // duplicate ordered pairs, self-loops, non-positive/non-finite weights,
    // duplicate node ids or empty terms.
    static CausalGraph build(std::map<NodeId, std::string> nodes, const std::vector<Edge>& edges);

    std::size_t node_count() const noexcept { return ids_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }

    bool contains(NodeId id) const;
    std::size_t index_of(NodeId id) const;  // throws LookupError
    NodeId id_at(std::size_t index) const { return ids_.at(index); }
    const std::string& term(NodeId id) const;
    const std::vector<NodeId>& node_ids() const noexcept { return ids_; }
    const std::vector<std::string>& terms() const noexcept { return terms_; }

    const std::vector<Arc>& out_arcs(std::size_t index) const { return out_.at(index); }
    const std::vector<Arc>& in_arcs(std::size_t index) const { return in_.at(index); }

    std::optional<double> edge_weight(NodeId src, NodeId dst) const;
    bool has_edge(NodeId src, NodeId dst) const { return edge_weight(src, dst).has_value(); }

    // Edges in (src, dst) ascending id order.
    std::vector<Edge> edges() const;

private:
    std::vector<NodeId> ids_;
    std::vector<std::string> terms_;
    std::vector<std::vector<Arc>> out_;
    std::vector<std::vector<Arc>> in_;
    std::size_t edge_count_ = 0;
};

struct Degree {
    std::size_t in = 0;
    std::size_t out = 0;
    bool operator==(const Degree&) const = default;
};

// TSV readers. `source_name` only labels error messages.
CausalGraph load_graph(std::istream& nodes, std::istream& edges,
                       std::string_view nodes_name = "nodes", std::string_view edges_name = "edges");
CausalGraph load_graph_files(const std::string& nodes_path, const std::string& edges_path);

void write_nodes_tsv(std::ostream& out, const CausalGraph& g);
void write_edges_tsv(std::ostream& out, const CausalGraph& g);

// All y != start reachable in at most spec.max_hops hops, with spec.excluded_node
// deleted from the graph. Sorted ascending.
std::vector<NodeId> khop_reachable(const CausalGraph& g, NodeId start, const ReachabilitySpec& spec);

Degree degree(const CausalGraph& g, NodeId n);

// Exactly one incident edge (in + out == 1).
bool is_edge_node(const CausalGraph& g, NodeId n);

// Widest path value (max over paths of the min edge weight) over paths of at
// most spec.max_hops hops. Empty when y is not reachable.
std::optional<double> bottleneck_weight(const CausalGraph& g, NodeId x, NodeId y, const ReachabilitySpec& spec);

namespace detail {

// Hop-bounded BFS over dense indices. `blocked` (may be npos) is treated as deleted.
// When `reverse` is set, arcs are followed against their orientation (who reaches start).
// Returns a membership mask; start itself is never marked.
std::vector<char> reach_mask(const CausalGraph& g, std::size_t start, int max_hops, Direction dir,
                             std::size_t blocked, bool reverse = false);

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

}  // namespace detail

}  // namespace ivkg
