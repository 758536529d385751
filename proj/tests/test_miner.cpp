#include "support.hpp"

#include "ivkg/error.hpp"
#include "ivkg/miner.hpp"
#include "ivkg/random.hpp"
#include "ivkg/synth.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace ivkg;
using testsupport::PathOracle;

namespace {

MineOptions opts(ExclusionMode mode = ExclusionMode::a_removed, unsigned workers = 1) {
    MineOptions o;
    o.exclusion = mode;
    o.workers = workers;
    return o;
}

std::vector<Triple> with_z(const std::vector<Triple>& ts, NodeId z) {
    std::vector<Triple> out;
    for (const auto& t : ts)
        if (t.z == z) out.push_back(t);
    return out;
}

CausalGraph chain(std::initializer_list<NodeId> ids) {
    std::map<NodeId, std::string> nodes;
    for (NodeId id : ids) nodes[id] = "c" + std::to_string(id);
    std::vector<Edge> edges;
    for (auto it = ids.begin(); std::next(it) != ids.end(); ++it) edges.push_back({*it, *std::next(it), 6.0});
    return CausalGraph::build(nodes, edges);
}

}  // namespace

TEST_SUITE("miner") {

TEST_CASE("fig3 instrument 368") {
    const auto g = synth::fig3_graph();
    const auto all = enumerate_iv_triples(g, opts());
    const std::vector<Triple> expected{
        {368, 1308, 322}, {368, 1308, 1630}, {368, 1308, 2000}, {368, 1402, 322}, {368, 1402, 2000}};
    CHECK(with_z(all, 368) == expected);
    CHECK(std::find(all.begin(), all.end(), Triple{368, 1308, 2179}) == all.end());

    auto only = opts();
    only.z_candidates = {368};
    CHECK(enumerate_iv_triples(g, only) == expected);
    CHECK(std::is_sorted(all.begin(), all.end()));
    CHECK(all == PathOracle(g, Direction::directed).triples(3, ExclusionMode::a_removed));
}

TEST_CASE("literal mode rejects short chains") {
    const auto g = chain({1, 2, 3});
    CHECK(enumerate_iv_triples(g, opts(ExclusionMode::literal)).empty());
    CHECK(enumerate_iv_triples(g, opts()) == std::vector<Triple>{{1, 2, 3}});

    // A 5-hop chain: only triples whose z->b distance exceeds k survive literal mode.
    const auto long_chain = chain({1, 2, 3, 4, 5, 6});
    for (const auto& t : enumerate_iv_triples(long_chain, opts(ExclusionMode::literal)))
        CHECK((t.b - t.z) > 3);
}

TEST_CASE("a direct z->b edge disqualifies the triple") {
    std::map<NodeId, std::string> nodes{{1, "z"}, {2, "a"}, {3, "b"}};
    const auto g = CausalGraph::build(nodes, {{1, 2, 1}, {2, 3, 1}, {1, 3, 1}});
    const auto ts = enumerate_iv_triples(g, opts());
    CHECK(std::find(ts.begin(), ts.end(), Triple{1, 2, 3}) == ts.end());
}

TEST_CASE("undirected mode matches the oracle") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto g = synth::gen_random_graph(12, 0.1, 1.0, 9.0, seed);
        auto o = opts();
        o.reach.direction = Direction::undirected;
        CHECK(enumerate_iv_triples(g, o) == PathOracle(g, Direction::undirected).triples(3, ExclusionMode::a_removed));
        o.exclusion = ExclusionMode::literal;
        CHECK(enumerate_iv_triples(g, o) == PathOracle(g, Direction::undirected).triples(3, ExclusionMode::literal));
    }
}

TEST_CASE("miner, dense oracle and path oracle agree on random graphs") {
    for (std::uint64_t seed = 100; seed < 130; ++seed) {
        const auto g = synth::gen_random_graph(16, 0.12, 1.0, 10.0, seed);
        const PathOracle paths(g, Direction::directed);
        for (auto mode : {ExclusionMode::a_removed, ExclusionMode::literal}) {
            const auto mined = enumerate_iv_triples(g, opts(mode));
            CHECK(mined == synth::brute_force_iv_oracle(g, {}, mode));
            CHECK(mined == paths.triples(3, mode));
        }
    }
}

TEST_CASE("worker count never changes output") {
    const auto g = synth::gen_random_graph(80, 0.05, 1.0, 10.0, 9);
    const auto one = enumerate_iv_triples(g, opts(ExclusionMode::a_removed, 1));
    CHECK(one == enumerate_iv_triples(g, opts(ExclusionMode::a_removed, 4)));
    CHECK(one == enumerate_iv_triples(g, opts(ExclusionMode::a_removed, 13)));
}

TEST_CASE("scoring rubric") {
    // 1 -> 2 -> 3 with 1 an edge node.
    auto build = [](double wza, double wab, bool extra) {
        std::map<NodeId, std::string> nodes{{1, "z"}, {2, "a"}, {3, "b"}, {4, "x"}};
        std::vector<Edge> edges{{1, 2, wza}, {2, 3, wab}};
        if (extra) edges.push_back({4, 1, 1.0});
        return CausalGraph::build(nodes, edges);
    };
    SUBCASE("edge node, 6.1 and 5.0 -> high") {
        const auto t = score_triple(build(6.1, 5.0, false), {1, 2, 3}, {});
        CHECK(t.z_is_edge_node);
        CHECK(t.score == 3);
        CHECK(t.quality == Quality::high);
    }
    SUBCASE("non-edge, 4.9 and 12 -> middle") {
        const auto t = score_triple(build(4.9, 12.0, true), {1, 2, 3}, {});
        CHECK_FALSE(t.z_is_edge_node);
        CHECK(t.score == 1);
        CHECK(t.quality == Quality::middle);
    }
    SUBCASE("non-edge, both weak -> low") {
        const auto t = score_triple(build(1.0, 2.0, true), {1, 2, 3}, {});
        CHECK(t.score == 0);
        CHECK(t.quality == Quality::low);
    }
    SUBCASE("threshold is configurable") {
        CHECK(score_triple(build(4.9, 12.0, true), {1, 2, 3}, {}, 4.0).score == 2);
    }
    SUBCASE("unreachable weight counts zero") {
        const auto t = score_triple(build(6.0, 6.0, true), {3, 2, 1}, {});
        CHECK_FALSE(t.w_za.has_value());
        CHECK_FALSE(t.w_ab.has_value());
        CHECK(t.z_is_edge_node);  // node 3 has a single incident edge
        CHECK(t.score == 1);
    }
    SUBCASE("unknown nodes") {
        CHECK_THROWS_AS(score_triple(build(1, 1, false), {1, 2, 99}, {}), LookupError);
    }
    CHECK(quality_from_score(0) == Quality::low);
    CHECK(quality_from_score(1) == Quality::middle);
    CHECK(quality_from_score(2) == Quality::middle);
    CHECK(quality_from_score(3) == Quality::high);
    CHECK_THROWS_AS(quality_from_score(4), InvalidArgument);
}

TEST_CASE("summarize") {
    SUBCASE("fig3 counts") {
        const auto g = synth::fig3_graph();
        const auto ts = enumerate_iv_triples(g, opts());
        const auto s = summarize(ts, g, {});
        CHECK(s.n_nodes == 7);
        CHECK(s.n_zab_triples == ts.size());
        CHECK(s.per_z_triples.min == 0);
        CHECK(s.per_z_triples.max == 9);  // z = 2179
        CHECK(s.per_z_triples.mean * 7 == doctest::Approx(double(ts.size())));
        // pairs: sum of |reach(z)| over all z
        std::size_t pairs = 0;
        const PathOracle oracle(g, Direction::directed);
        for (NodeId z : g.node_ids()) pairs += oracle.reach(z, 3).size();
        CHECK(s.n_za_pairs == pairs);
    }
    SUBCASE("empty triples over 10 nodes") {
        const auto g = synth::gen_random_graph(10, 0.0, 1, 1, 0);
        const auto s = summarize({}, g, {});
        CHECK(s.n_nodes == 10);
        CHECK(s.n_zab_triples == 0);
        CHECK(s.per_z_triples.min == 0);
        CHECK(s.per_z_triples.max == 0);
        CHECK(s.per_z_triples.mean == 0);
        CHECK(s.per_z_triples.std == 0);
    }
    SUBCASE("two Zs with 2 and 4 triples -> mean 3, std 1") {
        std::map<NodeId, std::string> nodes{{1, "a"}, {2, "b"}};
        const auto g = CausalGraph::build(nodes, {});
        const std::vector<Triple> ts{{1, 10, 11}, {1, 10, 12}, {2, 10, 11}, {2, 10, 12}, {2, 10, 13}, {2, 10, 14}};
        const auto s = summarize(ts, g, {});
        CHECK(s.per_z_triples.mean == doctest::Approx(3.0));
        CHECK(s.per_z_triples.std == doctest::Approx(1.0));
    }
}

TEST_CASE("quality partition") {
    auto make = [](int score, bool edge, NodeId z) {
        IvTriple t;
        t.z = z;
        t.score = score;
        t.z_is_edge_node = edge;
        t.quality = quality_from_score(score);
        return t;
    };
    const auto q = quality_partition({make(0, false, 1), make(2, true, 2), make(3, true, 2)});
    CHECK(q.low == 1);
    CHECK(q.middle == 1);
    CHECK(q.high == 1);
    CHECK(q.triples_with_edge_node_z == 2);
    CHECK(q.distinct_edge_node_z == 1);
    const auto empty = quality_partition({});
    CHECK(empty.total() == 0);
    CHECK(empty.triples_with_edge_node_z == 0);

    rng::Engine e(5);
    for (int round = 0; round < 50; ++round) {
        std::vector<IvTriple> ts;
        const auto n = rng::index(e, 60);
        std::size_t expect[3] = {0, 0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            const int s = static_cast<int>(rng::index(e, 4));
            ts.push_back(make(s, rng::index(e, 2) == 1, rng::index(e, 10)));
            ++expect[s == 0 ? 0 : s == 3 ? 2 : 1];
        }
        const auto p = quality_partition(ts);
        CHECK(p.total() == n);
        CHECK(p.low == expect[0]);
        CHECK(p.middle == expect[1]);
        CHECK(p.high == expect[2]);
    }
}

TEST_CASE("compare subgraphs") {
    auto zs = [](std::initializer_list<NodeId> ids) {
        std::vector<Triple> out;
        for (NodeId z : ids) out.push_back({z, 100, 101});
        return out;
    };
    const auto r = compare_subgraphs(zs({1, 2, 3, 3}), zs({2, 3, 4}));
    CHECK(r.exclusive_left == std::vector<NodeId>{1});
    CHECK(r.exclusive_right == std::vector<NodeId>{4});
    CHECK(r.shared == std::vector<NodeId>{2, 3});

    const auto same = compare_subgraphs(zs({5, 6}), zs({6, 5}));
    CHECK(same.exclusive_left.empty());
    CHECK(same.exclusive_right.empty());
    CHECK(same.shared.size() == 2);

    const auto disjoint = compare_subgraphs(zs({1, 2}), zs({3}));
    CHECK(disjoint.shared.empty());
    CHECK(disjoint.exclusive_left.size() + disjoint.exclusive_right.size() == 3);
}

TEST_CASE("triples TSV round trip") {
    const auto g = synth::fig3_graph();
    const auto scored = score_triples(g, enumerate_iv_triples(g, opts()), {});
    std::ostringstream out;
    write_triples_tsv(out, g, scored);
    const auto text = out.str();
    CHECK(text.rfind("z\ta\tb\tz_term\ta_term\tb_term\tedge_node\tw_za\tw_ab\tscore\tquality\n", 0) == 0);
    CHECK(text.find("368\t1402\t2000\tconcept 368\tconcept 1402\tconcept 2000\tfalse\t1\t1\t0\tlow\n") !=
          std::string::npos);
    std::istringstream in(text);
    const auto back = read_triples_tsv(in);
    REQUIRE(back.size() == scored.size());
    for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == scored[i].key());

    // absent weights render as NA
    IvTriple na;
    na.z = 1630;
    na.a = 322;
    na.b = 2000;
    std::ostringstream o2;
    write_triples_tsv(o2, g, {na});
    CHECK(o2.str().find("\tNA\tNA\t") != std::string::npos);

    std::istringstream bad("z\ta\tb\n1\t2\n");
    CHECK_THROWS_AS(read_triples_tsv(bad), ParseError);
}

TEST_CASE("edgeless graph mines nothing") {
    const auto g = synth::gen_random_graph(6, 0.0, 1, 1, 3);
    CHECK(enumerate_iv_triples(g, opts()).empty());
    CHECK(enumerate_iv_triples(g, opts(ExclusionMode::literal)).empty());
}

}  // TEST_SUITE
