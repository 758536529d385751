#include "ivkg/graph.hpp"

#include "ivkg/error.hpp"
#include "ivkg/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <utility>

namespace ivkg {

CausalGraph CausalGraph::build(std::map<NodeId, std::string> nodes, const std::vector<Edge>& edges) {
    CausalGraph g;
    g.ids_.reserve(nodes.size());
    g.terms_.reserve(nodes.size());
    for (auto& [id, term] : nodes) {
        if (term.empty()) throw IntegrityError("node " + std::to_string(id) + " has an empty term");
        g.ids_.push_back(id);
        g.terms_.push_back(std::move(term));
    }
    g.out_.resize(g.ids_.size());
    g.in_.resize(g.ids_.size());

    std::set<std::pair<NodeId, NodeId>> seen;
    for (const Edge& e : edges) {
        if (!g.contains(e.src))
            throw IntegrityError("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                                 " references unknown node " + std::to_string(e.src));
        if (!g.contains(e.dst))
            throw IntegrityError("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                                 " references unknown node " + std::to_string(e.dst));
        if (e.src == e.dst) throw IntegrityError("self-loop on node " + std::to_string(e.src));
        if (!std::isfinite(e.weight) || e.weight <= 0.0)
            throw IntegrityError("edge " + std::to_string(e.src) + "->" + std::to_string(e.dst) +
                                 " has non-positive or non-finite weight");
        if (!seen.emplace(e.src, e.dst).second)
            throw IntegrityError("duplicate edge " + std::to_string(e.src) + "->" + std::to_string(e.dst));
        const auto s = g.index_of(e.src);
        const auto d = g.index_of(e.dst);
        g.out_[s].push_back({d, e.weight});
        g.in_[d].push_back({s, e.weight});
    }
    auto by_target = [](const Arc& a, const Arc& b) { return a.to < b.to; };
    for (auto& v : g.out_) std::sort(v.begin(), v.end(), by_target);
    for (auto& v : g.in_) std::sort(v.begin(), v.end(), by_target);
    g.edge_count_ = seen.size();
    return g;
}

bool CausalGraph::contains(NodeId id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }

std::size_t CausalGraph::index_of(NodeId id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
    if (it == ids_.end() || *it != id) throw LookupError("unknown node " + std::to_string(id));
    return static_cast<std::size_t>(it - ids_.begin());
}

const std::string& CausalGraph::term(NodeId id) const { return terms_[index_of(id)]; }

std::optional<double> CausalGraph::edge_weight(NodeId src, NodeId dst) const {
    const auto& arcs = out_[index_of(src)];
    const auto d = index_of(dst);
    auto it = std::lower_bound(arcs.begin(), arcs.end(), d, [](const Arc& a, std::size_t v) { return a.to < v; });
    if (it == arcs.end() || it->to != d) return std::nullopt;
    return it->weight;
}

std::vector<Edge> CausalGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count_);
    for (std::size_t s = 0; s < out_.size(); ++s)
        for (const Arc& a : out_[s]) out.push_back({ids_[s], ids_[a.to], a.weight});
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string_view> expect_columns(std::string_view raw, std::size_t n, const std::string& source,
                                             std::size_t line_no) {
    auto cols = io::split(io::chomp(raw), '\t');
    if (cols.size() != n)
        throw ParseError(source, line_no,
                         "expected " + std::to_string(n) + " columns, got " + std::to_string(cols.size()));
    return cols;
}

}  // namespace

CausalGraph load_graph(std::istream& nodes_in, std::istream& edges_in, std::string_view nodes_name,
                       std::string_view edges_name) {
    const std::string nsrc{nodes_name};
    const std::string esrc{edges_name};

    std::map<NodeId, std::string> nodes;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(nodes_in, line)) throw ParseError(nsrc, 1, "missing header `id\tterm`");
    ++line_no;
    if (io::chomp(line) != "id\tterm") throw ParseError(nsrc, line_no, "expected header `id\tterm`");
    while (std::getline(nodes_in, line)) {
        ++line_no;
        if (io::chomp(line).empty()) continue;
        auto cols = expect_columns(line, 2, nsrc, line_no);
        auto id = io::parse_uint(cols[0]);
        if (!id) throw ParseError(nsrc, line_no, "non-numeric node id '" + std::string(cols[0]) + "'");
        if (!nodes.emplace(*id, std::string(cols[1])).second)
            throw IntegrityError(nsrc + ":" + std::to_string(line_no) + ": duplicate node id " + std::to_string(*id));
    }

    std::vector<Edge> edges;
    line_no = 0;
    if (!std::getline(edges_in, line)) throw ParseError(esrc, 1, "missing header `src\tdst\tweight`");
    ++line_no;
    if (io::chomp(line) != "src\tdst\tweight") throw ParseError(esrc, line_no, "expected header `src\tdst\tweight`");
    while (std::getline(edges_in, line)) {
        ++line_no;
        if (io::chomp(line).empty()) continue;
        auto cols = expect_columns(line, 3, esrc, line_no);
        auto s = io::parse_uint(cols[0]);
        auto d = io::parse_uint(cols[1]);
        auto w = io::parse_double(cols[2]);
        if (!s || !d) throw ParseError(esrc, line_no, "non-numeric node id");
        if (!w) throw ParseError(esrc, line_no, "non-numeric weight '" + std::string(cols[2]) + "'");
        edges.push_back({*s, *d, *w});
    }
    return CausalGraph::build(std::move(nodes), edges);
}

CausalGraph load_graph_files(const std::string& nodes_path, const std::string& edges_path) {
    std::ifstream n(nodes_path);
    if (!n) throw InvalidArgument("cannot open " + nodes_path);
    std::ifstream e(edges_path);
    if (!e) throw InvalidArgument("cannot open " + edges_path);
    return load_graph(n, e, nodes_path, edges_path);
}

void write_nodes_tsv(std::ostream& out, const CausalGraph& g) {
    out << "id\tterm\n";
    for (std::size_t i = 0; i < g.node_count(); ++i) out << g.node_ids()[i] << '\t' << g.terms()[i] << '\n';
}

void write_edges_tsv(std::ostream& out, const CausalGraph& g) {
    out << "src\tdst\tweight\n";
    for (const Edge& e : g.edges()) out << e.src << '\t' << e.dst << '\t' << io::format_double(e.weight) << '\n';
}

// ---------------------------------------------------------------------------

namespace detail {

std::vector<char> reach_mask(const CausalGraph& g, std::size_t start, int max_hops, Direction dir,
                             std::size_t blocked, bool reverse) {
    const std::size_t n = g.node_count();
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> frontier{start};
    std::vector<std::size_t> next;
    seen[start] = 1;
    auto visit = [&](const std::vector<CausalGraph::Arc>& arcs) {
        for (const auto& a : arcs) {
            if (a.to == blocked || seen[a.to]) continue;
            seen[a.to] = 1;
            next.push_back(a.to);
        }
    };
    for (int hop = 0; hop < max_hops && !frontier.empty(); ++hop) {
        next.clear();
        for (std::size_t u : frontier) {
            if (dir == Direction::undirected) {
                visit(g.out_arcs(u));
                visit(g.in_arcs(u));
            } else {
                visit(reverse ? g.in_arcs(u) : g.out_arcs(u));
            }
        }
        frontier.swap(next);
    }
    seen[start] = 0;
    return seen;
}

}  // namespace detail

namespace {

std::size_t blocked_index(const CausalGraph& g, const ReachabilitySpec& spec) {
    if (spec.max_hops < 1) throw InvalidArgument("max_hops must be >= 1");
    return spec.excluded_node ? g.index_of(*spec.excluded_node) : detail::npos;
}

}  // namespace

std::vector<NodeId> khop_reachable(const CausalGraph& g, NodeId start, const ReachabilitySpec& spec) {
    const auto s = g.index_of(start);
    const auto blocked = blocked_index(g, spec);
    if (s == blocked) throw InvalidArgument("start node equals the excluded node");
    const auto mask = detail::reach_mask(g, s, spec.max_hops, spec.direction, blocked);
    std::vector<NodeId> out;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) out.push_back(g.id_at(i));
    return out;
}

Degree degree(const CausalGraph& g, NodeId n) {
    const auto i = g.index_of(n);
    return {g.in_arcs(i).size(), g.out_arcs(i).size()};
}

bool is_edge_node(const CausalGraph& g, NodeId n) {
    const auto d = degree(g, n);
    return d.in + d.out == 1;
}

std::optional<double> bottleneck_weight(const CausalGraph& g, NodeId x, NodeId y, const ReachabilitySpec& spec) {
    const auto xs = g.index_of(x);
    const auto ys = g.index_of(y);
    if (xs == ys) throw InvalidArgument("bottleneck_weight needs two distinct nodes");
    const auto blocked = blocked_index(g, spec);
    if (xs == blocked) throw InvalidArgument("source node equals the excluded node");
    if (ys == blocked) return std::nullopt;

    // best[v]: widest value over walks of <= h hops from x. Walks with cycles
    // never beat the simple path they contain, so this equals the path maximum.
    constexpr double kUnreached = -1.0;
    std::vector<double> best(g.node_count(), kUnreached);
    best[xs] = std::numeric_limits<double>::infinity();
    for (int hop = 0; hop < spec.max_hops; ++hop) {
        auto next = best;
        auto relax = [&](std::size_t u, const std::vector<CausalGraph::Arc>& arcs) {
            for (const auto& a : arcs) {
                if (a.to == blocked) continue;
                next[a.to] = std::max(next[a.to], std::min(best[u], a.weight));
            }
        };
        for (std::size_t u = 0; u < best.size(); ++u) {
            if (best[u] == kUnreached) continue;
            relax(u, g.out_arcs(u));
            if (spec.direction == Direction::undirected) relax(u, g.in_arcs(u));
        }
        best.swap(next);
    }
    if (best[ys] == kUnreached) return std::nullopt;
    return best[ys];
}

}  // namespace ivkg
