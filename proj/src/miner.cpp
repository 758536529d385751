#include "ivkg/miner.hpp"

#include "ivkg/error.hpp"
#include "ivkg/text_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iterator>
#include <string>
#include <thread>

namespace ivkg {

std::string_view to_string(Quality q) {
    switch (q) {
        case Quality::low: return "low";
        case Quality::middle: return "middle";
        case Quality::high: return "high";
    }
    return "low";
}

std::string_view to_string(ExclusionMode m) { return m == ExclusionMode::literal ? "literal" : "a-removed"; }

Quality quality_from_score(int score) {
    if (score < 0 || score > 3) throw InvalidArgument("score must be in 0..3");
    if (score == 3) return Quality::high;
    return score == 0 ? Quality::low : Quality::middle;
}

namespace {

using detail::npos;
using detail::reach_mask;

void mine_one_z(const CausalGraph& g, std::size_t z, const MineOptions& opts, std::vector<Triple>& out) {
    const int k = opts.reach.max_hops;
    const Direction dir = opts.reach.direction;
    const std::size_t n = g.node_count();
    const auto a_set = reach_mask(g, z, k, dir, npos);

    if (opts.exclusion == ExclusionMode::literal) {
        const auto z_reaches = a_set;
        const auto reaches_z = reach_mask(g, z, k, dir, npos, /*reverse=*/true);
        for (std::size_t a = 0; a < n; ++a) {
            if (!a_set[a]) continue;
            const auto b_set = reach_mask(g, a, k, dir, npos);
            for (std::size_t b = 0; b < n; ++b) {
                if (!b_set[b] || b == z || reaches_z[b] || z_reaches[b]) continue;
                out.push_back({g.id_at(z), g.id_at(a), g.id_at(b)});
            }
        }
        return;
    }

    // Direct effect z -> b (either orientation when undirected).
    const auto direct = reach_mask(g, z, 1, dir, npos);

    for (std::size_t a = 0; a < n; ++a) {
        if (!a_set[a]) continue;
        const auto b_set = reach_mask(g, a, k, dir, z);
        const auto reaches_z = reach_mask(g, z, k, dir, a, /*reverse=*/true);
        for (std::size_t b = 0; b < n; ++b) {
            if (!b_set[b] || reaches_z[b] || direct[b]) continue;
            out.push_back({g.id_at(z), g.id_at(a), g.id_at(b)});
        }
    }
}

}  // namespace

std::vector<Triple> enumerate_iv_triples(const CausalGraph& g, const MineOptions& opts) {
    if (opts.reach.max_hops < 1) throw InvalidArgument("max_hops must be >= 1");
    std::vector<std::size_t> zs;
    if (opts.z_candidates.empty()) {
        zs.resize(g.node_count());
        for (std::size_t i = 0; i < zs.size(); ++i) zs[i] = i;
    } else {
        for (NodeId id : opts.z_candidates) zs.push_back(g.index_of(id));
        std::sort(zs.begin(), zs.end());
        zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
    }

    // One bucket per z keeps the merge independent of scheduling.
    std::vector<std::vector<Triple>> buckets(zs.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(opts.workers, static_cast<unsigned>(zs.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < zs.size(); ++i) mine_one_z(g, zs[i], opts, buckets[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < zs.size(); i = next++) mine_one_z(g, zs[i], opts, buckets[i]);
            });
    }

    std::vector<Triple> out;
    for (auto& b : buckets) out.insert(out.end(), b.begin(), b.end());
    std::sort(out.begin(), out.end());
    return out;
}

IvTriple score_triple(const CausalGraph& g, const Triple& t, const ReachabilitySpec& reach, double threshold) {
    if (t.z == t.a || t.a == t.b || t.z == t.b) throw InvalidArgument("triple nodes must be pairwise distinct");
    ReachabilitySpec open = reach;
    open.excluded_node.reset();

    IvTriple r;
    r.z = t.z;
    r.a = t.a;
    r.b = t.b;
    r.z_is_edge_node = is_edge_node(g, t.z);
    r.w_za = bottleneck_weight(g, t.z, t.a, open);
    r.w_ab = bottleneck_weight(g, t.a, t.b, open);
    r.score = int(r.z_is_edge_node) + int(r.w_za && *r.w_za >= threshold) + int(r.w_ab && *r.w_ab >= threshold);
    r.quality = quality_from_score(r.score);
    return r;
}

std::vector<IvTriple> score_triples(const CausalGraph& g, const std::vector<Triple>& ts,
                                    const ReachabilitySpec& reach, double threshold) {
    std::vector<IvTriple> out;
    out.reserve(ts.size());
    for (const auto& t : ts) out.push_back(score_triple(g, t, reach, threshold));
    return out;
}

namespace {

Distribution describe(const std::vector<double>& xs) {
    Distribution d;
    if (xs.empty()) return d;
    d.min = *std::min_element(xs.begin(), xs.end());
    d.max = *std::max_element(xs.begin(), xs.end());
    double sum = 0;
    for (double x : xs) sum += x;
    d.mean = sum / double(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - d.mean) * (x - d.mean);
    d.std = std::sqrt(ss / double(xs.size()));
    return d;
}

}  // namespace

MiningStats summarize(const std::vector<Triple>& triples, const CausalGraph& g, const ReachabilitySpec& reach) {
    MiningStats s;
    s.n_nodes = g.node_count();
    s.n_zab_triples = triples.size();

    std::vector<double> pairs(g.node_count(), 0.0);
    for (std::size_t z = 0; z < g.node_count(); ++z) {
        const auto mask = reach_mask(g, z, reach.max_hops, reach.direction, npos);
        pairs[z] = double(std::count(mask.begin(), mask.end(), char{1}));
        s.n_za_pairs += static_cast<std::size_t>(pairs[z]);
    }
    std::vector<double> per_z(g.node_count(), 0.0);
    for (const auto& t : triples) per_z[g.index_of(t.z)] += 1.0;

    s.per_z_pairs = describe(pairs);
    s.per_z_triples = describe(per_z);
    return s;
}

QualityCounts quality_partition(const std::vector<IvTriple>& triples) {
    QualityCounts c;
    std::set<NodeId> edge_z;
    for (const auto& t : triples) {
        switch (quality_from_score(t.score)) {
            case Quality::low: ++c.low; break;
            case Quality::middle: ++c.middle; break;
            case Quality::high: ++c.high; break;
        }
        if (t.z_is_edge_node) {
            ++c.triples_with_edge_node_z;
            edge_z.insert(t.z);
        }
    }
    c.distinct_edge_node_z = edge_z.size();
    return c;
}

OverlapReport compare_subgraphs(const std::vector<Triple>& left, const std::vector<Triple>& right) {
    std::set<NodeId> l, r;
    for (const auto& t : left) l.insert(t.z);
    for (const auto& t : right) r.insert(t.z);
    OverlapReport rep;
    std::set_difference(l.begin(), l.end(), r.begin(), r.end(), std::back_inserter(rep.exclusive_left));
    std::set_difference(r.begin(), r.end(), l.begin(), l.end(), std::back_inserter(rep.exclusive_right));
    std::set_intersection(l.begin(), l.end(), r.begin(), r.end(), std::back_inserter(rep.shared));
    return rep;
}

void write_triples_tsv(std::ostream& out, const CausalGraph& g, const std::vector<IvTriple>& triples) {
    out << "z\ta\tb\tz_term\ta_term\tb_term\tedge_node\tw_za\tw_ab\tscore\tquality\n";
    auto w = [](const std::optional<double>& v) { return v ? io::format_double(*v) : std::string("NA"); };
    for (const auto& t : triples) {
        out << t.z << '\t' << t.a << '\t' << t.b << '\t' << g.term(t.z) << '\t' << g.term(t.a) << '\t'
            << g.term(t.b) << '\t' << (t.z_is_edge_node ? "true" : "false") << '\t' << w(t.w_za) << '\t'
            << w(t.w_ab) << '\t' << t.score << '\t' << to_string(t.quality) << '\n';
    }
}

std::vector<Triple> read_triples_tsv(std::istream& in, std::string_view source) {
    const std::string src{source};
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw ParseError(src, 1, "missing header");
    auto header = io::split(io::chomp(line), '\t');
    if (header.size() < 3 || header[0] != "z" || header[1] != "a" || header[2] != "b")
        throw ParseError(src, 1, "header must start with z\ta\tb");
    std::vector<Triple> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (io::chomp(line).empty()) continue;
        auto cols = io::split(io::chomp(line), '\t');
        if (cols.size() != header.size())
            throw ParseError(src, line_no, "expected " + std::to_string(header.size()) + " columns");
        auto z = io::parse_uint(cols[0]);
        auto a = io::parse_uint(cols[1]);
        auto b = io::parse_uint(cols[2]);
        if (!z || !a || !b) throw ParseError(src, line_no, "non-numeric node id");
        out.push_back({*z, *a, *b});
    }
    return out;
}

}  // namespace ivkg
