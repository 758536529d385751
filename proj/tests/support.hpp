#pragma once

// Independent reference implementations used as test oracles. Nothing here
// calls into the library's traversal code: paths are enumerated explicitly.

#include "ivkg/graph.hpp"
#include "ivkg/miner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

namespace testsupport {

using ivkg::NodeId;

struct PathOracle {
    std::map<NodeId, std::vector<std::pair<NodeId, double>>> adj;

    PathOracle(const ivkg::CausalGraph& g, ivkg::Direction dir) {
        for (NodeId id : g.node_ids()) adj[id];
        for (const auto& e : g.edges()) {
            adj[e.src].push_back({e.dst, e.weight});
            if (dir == ivkg::Direction::undirected) adj[e.dst].push_back({e.src, e.weight});
        }
    }

    // Calls visit(end, bottleneck) for every simple path from x of 1..k arcs avoiding `deleted`.
    void paths(NodeId x, int k, std::optional<NodeId> deleted,
               const std::function<void(NodeId, double)>& visit) const {
        std::set<NodeId> on_path{x};
        std::function<void(NodeId, int, double)> dfs = [&](NodeId u, int depth, double bottleneck) {
            if (depth == k) return;
            for (const auto& [v, w] : adj.at(u)) {
                if (on_path.count(v) || (deleted && v == *deleted)) continue;
                const double b = std::min(bottleneck, w);
                visit(v, b);
                on_path.insert(v);
                dfs(v, depth + 1, b);
                on_path.erase(v);
            }
        };
        dfs(x, 0, 1e300);
    }

    std::set<NodeId> reach(NodeId x, int k, std::optional<NodeId> deleted = std::nullopt) const {
        std::set<NodeId> out;
        paths(x, k, deleted, [&](NodeId v, double) { out.insert(v); });
        return out;
    }

    std::optional<double> widest(NodeId x, NodeId y, int k) const {
        std::optional<double> best;
        paths(x, k, std::nullopt, [&](NodeId v, double b) {
            if (v == y && (!best || b > *best)) best = b;
        });
        return best;
    }

    bool has_arc(NodeId u, NodeId v) const {
        const auto& row = adj.at(u);
        return std::any_of(row.begin(), row.end(), [&](const auto& p) { return p.first == v; });
    }

    // The two exclusion predicates, written straight from their definitions.
    std::vector<ivkg::Triple> triples(int k, ivkg::ExclusionMode mode) const {
        std::vector<ivkg::Triple> out;
        for (const auto& [z, row] : adj) {
            (void)row;
            for (NodeId a : reach(z, k)) {
                const auto ab = mode == ivkg::ExclusionMode::literal ? reach(a, k) : reach(a, k, z);
                for (NodeId b : ab) {
                    if (b == z || b == a) continue;
                    bool ok;
                    if (mode == ivkg::ExclusionMode::literal)
                        ok = !reach(b, k).count(z) && !reach(z, k).count(b);
                    else
                        ok = !reach(b, k, a).count(z) && !has_arc(z, b);
                    if (ok) out.push_back({z, a, b});
                }
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

// Simpson's rule on the chi-square density, substituting x = t^2 near zero to remove the singularity.
inline double simpson_chi2_sf(double x, int df) {
    const double k = df / 2.0;
    auto pdf = [&](double u) { return std::exp((k - 1) * std::log(u) - u / 2 - k * std::log(2.0) - std::lgamma(k)); };
    auto simpson = [](auto f, double a, double b, int n) {
        const double h = (b - a) / n;
        double s = f(a) + f(b);
        for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4 : 2);
        return s * h / 3;
    };
    // CDF = integral_0^x pdf(u) du = integral_0^sqrt(x) pdf(t^2) 2t dt
    const double at_zero = df == 1 ? 2 * std::exp(-k * std::log(2.0) - std::lgamma(k)) : 0.0;
    const double cdf = simpson([&](double t) { return t == 0 ? at_zero : pdf(t * t) * 2 * t; }, 0.0, std::sqrt(x), 20000);
    return 1 - cdf;
}

// Scratch directory removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("ivkg_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline ivkg::CausalGraph graph_from(const std::string& nodes_tsv, const std::string& edges_tsv) {
    std::istringstream n(nodes_tsv), e(edges_tsv);
    return ivkg::load_graph(n, e);
}

}  // namespace testsupport
