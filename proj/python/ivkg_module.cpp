// Python bindings for the main operations. Graphs and forests are opaque
// handles; matrices cross the boundary as numpy arrays.

#include "ivkg/econometrics.hpp"
#include "ivkg/error.hpp"
#include "ivkg/forest.hpp"
#include "ivkg/graph.hpp"
#include "ivkg/miner.hpp"
#include "ivkg/reports.hpp"
#include "ivkg/synth.hpp"
#include "ivkg/textfeat.hpp"
#include "ivkg/version.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace ivkg;

namespace {

Direction parse_direction(const std::string& s) {
    if (s == "directed") return Direction::directed;
    if (s == "undirected") return Direction::undirected;
    throw InvalidArgument("direction must be directed or undirected, got '" + s + "'");
}

ExclusionMode parse_exclusion(const std::string& s) {
    if (s == "a-removed" || s == "a_removed") return ExclusionMode::a_removed;
    if (s == "literal") return ExclusionMode::literal;
    throw InvalidArgument("exclusion must be a-removed or literal, got '" + s + "'");
}

ReachabilitySpec reach(int hops, const std::string& direction, std::optional<NodeId> excluded = std::nullopt) {
    return {hops, parse_direction(direction), excluded};
}

using TripleTuple = std::tuple<NodeId, NodeId, NodeId>;

std::vector<Triple> to_triples(const std::vector<TripleTuple>& in) {
    std::vector<Triple> out;
    out.reserve(in.size());
    for (const auto& [z, a, b] : in) out.push_back({z, a, b});
    return out;
}

std::vector<TripleTuple> to_tuples(const std::vector<Triple>& in) {
    std::vector<TripleTuple> out;
    out.reserve(in.size());
    for (const auto& t : in) out.emplace_back(t.z, t.a, t.b);
    return out;
}

py::dict distribution(const Distribution& d) {
    py::dict o;
    o["min"] = d.min;
    o["mean"] = d.mean;
    o["std"] = d.std;
    o["max"] = d.max;
    return o;
}

py::dict coefficient(const econ::Coefficient& c) {
    py::dict o;
    o["name"] = c.name;
    o["estimate"] = c.estimate;
    o["se"] = c.se;
    o["t"] = c.t;
    o["p"] = c.p;
    return o;
}

text::FeatureMatrix matrix_from(const Eigen::MatrixXd& X, const std::vector<std::string>& labels) {
    std::vector<std::string> ids, cols;
    for (Eigen::Index r = 0; r < X.rows(); ++r) ids.push_back("r" + std::to_string(r));
    for (Eigen::Index c = 0; c < X.cols(); ++c) cols.push_back("f" + std::to_string(c));
    text::FeatureMatrix m(ids, cols, labels);
    for (Eigen::Index r = 0; r < X.rows(); ++r)
        for (Eigen::Index c = 0; c < X.cols(); ++c) m.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = X(r, c);
    return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Instrumental-variable mining on causal knowledge graphs, text features, random forests and 2SLS";
    m.attr("__version__") = std::string(kToolVersion);

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ParseError>(m, "ParseError", base.ptr());
    py::register_exception<IntegrityError>(m, "IntegrityError", base.ptr());
    py::register_exception<LookupError>(m, "LookupError", base.ptr());
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());

    // graph
    py::class_<CausalGraph>(m, "Graph")
        .def_property_readonly("node_count", &CausalGraph::node_count)
        .def_property_readonly("edge_count", &CausalGraph::edge_count)
        .def_property_readonly("node_ids", &CausalGraph::node_ids)
        .def("term", &CausalGraph::term)
        .def("has_edge", &CausalGraph::has_edge)
        .def("edge_weight", &CausalGraph::edge_weight)
        .def("edges",
             [](const CausalGraph& g) {
                 std::vector<std::tuple<NodeId, NodeId, double>> out;
                 for (const auto& e : g.edges()) out.emplace_back(e.src, e.dst, e.weight);
                 return out;
             })
        .def("__repr__", [](const CausalGraph& g) {
            return "<ivkg.Graph nodes=" + std::to_string(g.node_count()) + " edges=" + std::to_string(g.edge_count()) + ">";
        });

    m.def(
        "graph_from_edges",
        [](const std::map<NodeId, std::string>& nodes, const std::vector<std::tuple<NodeId, NodeId, double>>& edges) {
            std::vector<Edge> es;
            for (const auto& [s, d, w] : edges) es.push_back({s, d, w});
            return CausalGraph::build(nodes, es);
        },
        py::arg("nodes"), py::arg("edges"), "Build a graph from {id: term} and (src, dst, weight) tuples.");
    m.def("load_graph", &load_graph_files, py::arg("nodes_path"), py::arg("edges_path"));
    m.def("fig3_graph", &synth::fig3_graph);
    m.def("random_graph", &synth::gen_random_graph, py::arg("n_nodes"), py::arg("edge_prob"), py::arg("weight_min") = 1.0,
          py::arg("weight_max") = 10.0, py::arg("seed") = 0);
    m.def(
        "khop_reachable",
        [](const CausalGraph& g, NodeId start, int hops, const std::string& direction, std::optional<NodeId> excluded) {
            return khop_reachable(g, start, reach(hops, direction, excluded));
        },
        py::arg("graph"), py::arg("start"), py::arg("hops") = 3, py::arg("direction") = "directed",
        py::arg("excluded") = py::none());
    m.def(
        "degree",
        [](const CausalGraph& g, NodeId n) {
            const auto d = degree(g, n);
            return std::make_pair(d.in, d.out);
        },
        py::arg("graph"), py::arg("node"), "(in_degree, out_degree)");
    m.def("is_edge_node", &is_edge_node, py::arg("graph"), py::arg("node"));
    m.def(
        "bottleneck_weight",
        [](const CausalGraph& g, NodeId x, NodeId y, int hops, const std::string& direction, std::optional<NodeId> excluded) {
            return bottleneck_weight(g, x, y, reach(hops, direction, excluded));
        },
        py::arg("graph"), py::arg("x"), py::arg("y"), py::arg("hops") = 3, py::arg("direction") = "directed",
        py::arg("excluded") = py::none());

    // mining
    m.def(
        "mine",
        [](const CausalGraph& g, int hops, const std::string& direction, const std::string& exclusion, unsigned workers,
           std::vector<NodeId> z) {
            MineOptions o;
            o.reach = reach(hops, direction);
            o.exclusion = parse_exclusion(exclusion);
            o.workers = workers;
            o.z_candidates = std::move(z);
            py::gil_scoped_release release;
            return to_tuples(enumerate_iv_triples(g, o));
        },
        py::arg("graph"), py::arg("hops") = 3, py::arg("direction") = "directed", py::arg("exclusion") = "a-removed",
        py::arg("workers") = 1, py::arg("z") = std::vector<NodeId>{}, "Sorted list of (z, a, b) triples.");
    m.def(
        "oracle",
        [](const CausalGraph& g, int hops, const std::string& direction, const std::string& exclusion) {
            return to_tuples(synth::brute_force_iv_oracle(g, reach(hops, direction), parse_exclusion(exclusion)));
        },
        py::arg("graph"), py::arg("hops") = 3, py::arg("direction") = "directed", py::arg("exclusion") = "a-removed");
    m.def(
        "score",
        [](const CausalGraph& g, const std::vector<TripleTuple>& ts, int hops, const std::string& direction, double threshold) {
            py::list out;
            for (const auto& t : score_triples(g, to_triples(ts), reach(hops, direction), threshold)) {
                py::dict d;
                d["z"] = t.z;
                d["a"] = t.a;
                d["b"] = t.b;
                d["edge_node"] = t.z_is_edge_node;
                d["w_za"] = t.w_za;
                d["w_ab"] = t.w_ab;
                d["score"] = t.score;
                d["quality"] = std::string(to_string(t.quality));
                out.append(d);
            }
            return out;
        },
        py::arg("graph"), py::arg("triples"), py::arg("hops") = 3, py::arg("direction") = "directed",
        py::arg("threshold") = 5.0);
    m.def(
        "summarize",
        [](const CausalGraph& g, const std::vector<TripleTuple>& ts, int hops, const std::string& direction) {
            const auto s = summarize(to_triples(ts), g, reach(hops, direction));
            py::dict o;
            o["n_nodes"] = s.n_nodes;
            o["n_za_pairs"] = s.n_za_pairs;
            o["n_zab_triples"] = s.n_zab_triples;
            o["per_z"] = distribution(s.per_z_triples);
            o["per_z_pairs"] = distribution(s.per_z_pairs);
            return o;
        },
        py::arg("graph"), py::arg("triples"), py::arg("hops") = 3, py::arg("direction") = "directed");
    m.def(
        "quality_partition",
        [](const CausalGraph& g, const std::vector<TripleTuple>& ts, int hops, const std::string& direction, double threshold) {
            const auto q = quality_partition(score_triples(g, to_triples(ts), reach(hops, direction), threshold));
            py::dict o;
            o["low"] = q.low;
            o["middle"] = q.middle;
            o["high"] = q.high;
            o["edge_node_triples"] = q.triples_with_edge_node_z;
            o["edge_node_z"] = q.distinct_edge_node_z;
            return o;
        },
        py::arg("graph"), py::arg("triples"), py::arg("hops") = 3, py::arg("direction") = "directed",
        py::arg("threshold") = 5.0);
    m.def(
        "compare",
        [](const std::vector<TripleTuple>& left, const std::vector<TripleTuple>& right) {
            const auto r = compare_subgraphs(to_triples(left), to_triples(right));
            py::dict o;
            o["exclusive_left"] = r.exclusive_left;
            o["exclusive_right"] = r.exclusive_right;
            o["shared"] = r.shared;
            return o;
        },
        py::arg("left"), py::arg("right"));

    // text features
    m.def(
        "preprocess",
        [](const std::string& text, std::optional<std::vector<std::string>> stopwords) {
            if (!stopwords) return text::preprocess_document(text, text::default_stopwords());
            return text::preprocess_document(text, text::Stopwords(stopwords->begin(), stopwords->end()));
        },
        py::arg("text"), py::arg("stopwords") = py::none());
    m.def(
        "term_frequency", [](const std::vector<std::string>& tokens, const std::string& term) { return text::term_frequency(tokens, term); },
        py::arg("tokens"), py::arg("term"));
    m.def(
        "feature_matrix",
        [](const std::vector<std::pair<std::string, std::string>>& docs,
           const std::vector<std::pair<std::string, double>>& concepts, unsigned workers) {
            text::ConceptList list;
            for (const auto& [t, w] : concepts) list.add(t, w);
            std::vector<text::Document> ds;
            for (const auto& [id, body] : docs) ds.push_back({id, body, std::nullopt});
            const auto fm = text::build_feature_matrix(ds, list, text::default_stopwords(), workers);
            Eigen::MatrixXd X(fm.rows(), fm.cols());
            for (std::size_t r = 0; r < fm.rows(); ++r)
                for (std::size_t c = 0; c < fm.cols(); ++c) X(Eigen::Index(r), Eigen::Index(c)) = fm.at(r, c);
            return std::make_pair(X, fm.col_names());
        },
        py::arg("docs"), py::arg("concepts"), py::arg("workers") = 1,
        "docs: [(id, text)], concepts: [(term, weight)] -> (matrix, column terms)");
    m.def(
        "classification_corpus",
        [](std::size_t n_docs, double noise, std::uint64_t seed) {
            synth::CorpusParams p;
            p.n_docs = n_docs;
            p.noise_rate = noise;
            p.seed = seed;
            std::vector<std::tuple<std::string, std::string, std::string>> out;
            for (auto& d : synth::gen_classification_corpus(p)) out.emplace_back(d.id, d.text, *d.label);
            return out;
        },
        py::arg("n_docs") = 400, py::arg("noise") = 0.05, py::arg("seed") = 0, "[(id, text, label)]");
    m.def("similarity_table", &synth::gen_similarity_table, py::arg("seed") = 0);

    // forest
    py::class_<forest::ForestModel>(m, "Forest")
        .def_property_readonly("class_labels", [](const forest::ForestModel& f) { return f.class_labels; })
        .def_property_readonly("n_trees", [](const forest::ForestModel& f) { return f.trees.size(); })
        .def("predict",
             [](const forest::ForestModel& f, const Eigen::MatrixXd& X) { return forest::predict(f, matrix_from(X, {})); })
        .def("to_json", &forest::model_to_json)
        .def_static("from_json", &forest::model_from_json);
    m.def(
        "train_forest",
        [](const Eigen::MatrixXd& X, const std::vector<std::string>& y, std::size_t n_trees, std::optional<std::size_t> max_depth,
           std::size_t min_samples_split, const std::string& features_per_split, std::uint64_t seed, unsigned workers) {
            forest::ForestParams p;
            p.n_trees = n_trees;
            p.max_depth = max_depth;
            p.min_samples_split = min_samples_split;
            p.features_per_split = forest::FeaturesPerSplit::parse(features_per_split);
            p.seed = seed;
            p.workers = workers;
            const auto train = matrix_from(X, y);
            py::gil_scoped_release release;
            return forest::train_forest(train, p);
        },
        py::arg("X"), py::arg("y"), py::arg("n_trees") = 100, py::arg("max_depth") = py::none(),
        py::arg("min_samples_split") = 2, py::arg("features_per_split") = "sqrt", py::arg("seed") = 0,
        py::arg("workers") = 1);
    m.def(
        "evaluate",
        [](const std::vector<std::string>& y_true, const std::vector<std::string>& y_pred, const std::string& positive) {
            const auto r = forest::evaluate(y_true, y_pred, positive);
            py::dict o;
            o["accuracy"] = r.accuracy;
            o["precision"] = r.precision;
            o["recall"] = r.recall;
            o["f1"] = r.f1;
            o["tp"] = r.tp;
            o["fp"] = r.fp;
            o["tn"] = r.tn;
            o["fn"] = r.fn;
            return o;
        },
        py::arg("y_true"), py::arg("y_pred"), py::arg("positive_label"));

    // econometrics
    m.def(
        "ols",
        [](const Eigen::VectorXd& y, const Eigen::MatrixXd& X, const std::string& robust) {
            const auto r = econ::fit_ols(y, X, econ::parse_robust(robust));
            py::dict o;
            o["coef"] = r.coef;
            o["se"] = r.se;
            o["t"] = r.t;
            o["p"] = r.p;
            o["rss"] = r.rss;
            return o;
        },
        py::arg("y"), py::arg("X"), py::arg("robust") = "HC1");
    m.def(
        "tsls",
        [](const Eigen::VectorXd& B, const Eigen::VectorXd& A, const Eigen::MatrixXd& Z, std::optional<Eigen::MatrixXd> X,
           const std::string& robust) {
            const Eigen::MatrixXd exog = X ? *X : Eigen::MatrixXd::Ones(A.size(), 1);
            const auto r = econ::fit_2sls(B, A, Z, exog, econ::parse_robust(robust));
            py::dict o;
            py::list first, controls;
            for (const auto& c : r.first_stage) first.append(coefficient(c));
            for (const auto& c : r.controls) controls.append(coefficient(c));
            o["first_stage"] = first;
            o["second_stage"] = coefficient(r.second_stage);
            o["controls"] = controls;
            o["n_obs"] = r.n_obs;
            o["anderson_lm"] = r.anderson_lm.value;
            o["anderson_lm_p"] = r.anderson_lm.p_value;
            o["anderson_lm_df"] = r.anderson_lm.df;
            o["cragg_donald_f"] = r.cragg_donald_f;
            o["first_stage_f"] = r.first_stage_f;
            o["sigma2"] = r.sigma2;
            o["notes"] = r.notes;
            return o;
        },
        py::arg("B"), py::arg("A"), py::arg("Z"), py::arg("X") = py::none(), py::arg("robust") = "HC1",
        "X defaults to an intercept column.");
    m.def("chi_square_sf", &econ::chi_square_sf, py::arg("x"), py::arg("df"));
    m.def(
        "scm_sample",
        [](double pi, double alpha, double beta, double gamma, std::size_t n, std::uint64_t seed) {
            synth::ScmParams p;
            p.pi = pi;
            p.alpha = alpha;
            p.beta = beta;
            p.gamma = gamma;
            p.n = n;
            p.seed = seed;
            auto s = synth::gen_scm_sample(p);
            auto vec = [](const std::vector<double>& v) { return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size()))); };
            py::dict o;
            o["z"] = vec(s.z);
            o["u"] = vec(s.u);
            o["a"] = vec(s.a);
            o["b"] = vec(s.b);
            return o;
        },
        py::arg("pi") = 1.0, py::arg("alpha") = 1.0, py::arg("beta") = 2.0, py::arg("gamma") = 1.0, py::arg("n") = 10000,
        py::arg("seed") = 0);
}
