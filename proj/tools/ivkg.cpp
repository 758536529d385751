// ivkg: instrumental-variable mining on causal knowledge graphs, text
// features + random forest, and 2SLS validation on panel data.

#include "ivkg/econometrics.hpp"
#include "ivkg/error.hpp"
#include "ivkg/forest.hpp"
#include "ivkg/graph.hpp"
#include "ivkg/miner.hpp"
#include "ivkg/random.hpp"
#include "ivkg/reports.hpp"
#include "ivkg/synth.hpp"
#include "ivkg/text_io.hpp"
#include "ivkg/textfeat.hpp"
#include "ivkg/version.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace ivkg;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

// Writes to `path`, or standard output when path is empty or "-".
void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        return;
    }
    if (auto parent = fs::path(path).parent_path(); !parent.empty()) fs::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write " + path);
    out << content;
}

struct GraphOptions {
    int hops = 3;
    std::string direction = "directed";
    std::string exclusion = "a-removed";
    double weight_threshold = 5.0;
    unsigned workers = 1;
    std::uint64_t seed = 0;
    std::string format;
};

void add_shared(CLI::App* cmd, GraphOptions& o, bool graph_flags) {
    cmd->add_option("--seed", o.seed, "Seed for all randomness")->capture_default_str();
    cmd->add_option("--workers", o.workers, "Worker threads (never changes output)")
        ->check(CLI::Range(1u, 256u))
        ->capture_default_str();
    if (!graph_flags) return;
    cmd->add_option("--hops", o.hops, "Hop bound k")->check(CLI::Range(1, 64))->capture_default_str();
    cmd->add_option("--direction", o.direction)->check(CLI::IsMember({"directed", "undirected"}))->capture_default_str();
    cmd->add_option("--exclusion", o.exclusion)->check(CLI::IsMember({"a-removed", "literal"}))->capture_default_str();
    cmd->add_option("--weight-threshold", o.weight_threshold, "Rubric weight threshold")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
}

MineOptions mine_options(const GraphOptions& o) {
    MineOptions m;
    m.reach.max_hops = o.hops;
    m.reach.direction = o.direction == "undirected" ? Direction::undirected : Direction::directed;
    m.exclusion = o.exclusion == "literal" ? ExclusionMode::literal : ExclusionMode::a_removed;
    m.workers = o.workers;
    return m;
}

// ---------------------------------------------------------------------------

struct MineArgs {
    GraphOptions g;
    std::string nodes, edges, output;
    std::vector<NodeId> z;
    bool oracle = false;
};

int run_mine(const MineArgs& a) {
    const auto graph = load_graph_files(a.nodes, a.edges);
    auto opts = mine_options(a.g);
    opts.z_candidates = a.z;

    std::vector<Triple> triples;
    if (a.oracle) {
        triples = synth::brute_force_iv_oracle(graph, opts.reach, opts.exclusion);
        if (!a.z.empty()) {
            std::erase_if(triples, [&](const Triple& t) { return std::find(a.z.begin(), a.z.end(), t.z) == a.z.end(); });
        }
    } else {
        triples = enumerate_iv_triples(graph, opts);
    }
    const auto scored = score_triples(graph, triples, opts.reach, a.g.weight_threshold);
    const auto stats = summarize(triples, graph, opts.reach);
    const auto quality = quality_partition(scored);

    std::ostringstream tsv;
    write_triples_tsv(tsv, graph, scored);
    if (!a.output.empty()) {
        fs::create_directories(a.output);
        emit((fs::path(a.output) / "triples.tsv").string(), tsv.str());
        emit((fs::path(a.output) / "stats.json").string(), report::stats_json(stats, opts));
        emit((fs::path(a.output) / "quality.json").string(), report::quality_json(quality, a.g.weight_threshold));
    } else if (a.g.format == "json") {
        emit("", report::mine_summary_json(stats, quality, opts, a.g.weight_threshold));
    } else {
        emit("", tsv.str());
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct CompareArgs {
    std::string left, right, output;
};

std::vector<Triple> read_triples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path);
    return read_triples_tsv(in, path);
}

int run_compare(const CompareArgs& a) {
    const auto rep = compare_subgraphs(read_triples_file(a.left), read_triples_file(a.right));
    emit(a.output, report::overlap_json(rep));
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct FeaturesArgs {
    GraphOptions g;
    std::string corpus, similarity, nodes, edges, stopwords, output;
    double threshold = 0.55;
    bool unweighted = false;
};

text::Stopwords load_stopwords(const std::string& path) {
    if (path.empty()) return text::default_stopwords();
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path);
    return text::read_stopwords(in);
}

int run_features(const FeaturesArgs& a) {
    text::ConceptList concepts;
    if (!a.similarity.empty()) {
        std::ifstream in(a.similarity);
        if (!in) throw InvalidArgument("cannot open " + a.similarity);
        concepts = text::build_concept_list_from_similarity(in, a.threshold, a.similarity);
    } else {
        if (a.nodes.empty() || a.edges.empty())
            throw InvalidArgument("features needs --similarity or both --nodes and --edges");
        concepts = text::build_concept_list_from_graph(load_graph_files(a.nodes, a.edges), !a.unweighted);
    }
    if (concepts.empty()) {
        std::cerr << "warning: concept list is empty after thresholding\n";
        throw InvalidArgument("no concepts to build features from");
    }
    const auto docs = text::load_corpus(a.corpus);
    const auto m = text::build_feature_matrix(docs, concepts, load_stopwords(a.stopwords), a.g.workers);
    std::ostringstream out;
    text::write_matrix_csv(out, m);
    emit(a.output, out.str());
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
    GraphOptions g;
    std::string matrix, test, metrics_out, model_out, positive_label, features_per_split = "sqrt";
    double train_fraction = 0.8;
    std::size_t trees = 100, min_samples_split = 2, max_depth = 0;
};

text::FeatureMatrix read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open " + path);
    return text::read_matrix_csv(in, path);
}

int run_classify(const ClassifyArgs& a) {
    const auto all = read_matrix_file(a.matrix);
    if (!all.labeled()) throw InvalidArgument(a.matrix + " has no label column");
    text::FeatureMatrix train, valid;
    if (a.test.empty()) {
        std::tie(train, valid) = text::split_train_validation(all, a.train_fraction, a.g.seed);
    } else {
        train = all;
        valid = read_matrix_file(a.test);
        if (!valid.labeled()) throw InvalidArgument(a.test + " has no label column");
    }

    forest::ForestParams p;
    p.n_trees = a.trees;
    if (a.max_depth > 0) p.max_depth = a.max_depth;
    p.min_samples_split = a.min_samples_split;
    p.features_per_split = forest::FeaturesPerSplit::parse(a.features_per_split);
    p.seed = a.g.seed;
    p.workers = a.g.workers;
    const auto model = forest::train_forest(train, p);
    const auto pred = forest::predict(model, valid);
    const auto positive = a.positive_label.empty() ? model.class_labels[1] : a.positive_label;
    const auto metrics = forest::evaluate(valid.labels(), pred, positive);

    emit(a.metrics_out, forest::metrics_to_json(metrics));
    if (!a.model_out.empty()) emit(a.model_out, forest::model_to_json(model));
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct TslsArgs {
    GraphOptions g;
    std::string panel, spec, output, robust = "HC1", outcome, endogenous;
    std::vector<std::string> instruments, controls, fixed_effects;
};

int run_tsls(const TslsArgs& a) {
    econ::RegressionSpec spec;
    if (!a.spec.empty()) {
        spec = econ::parse_regression_spec_json(io::read_file(a.spec));
    } else {
        spec.outcome = a.outcome;
        spec.endogenous = a.endogenous;
        spec.instruments = a.instruments;
        spec.controls = a.controls;
        spec.fixed_effects = a.fixed_effects;
        spec.robust = econ::parse_robust(a.robust);
        spec.validate();
    }
    const auto panel = econ::read_panel_csv_file(a.panel);
    const auto design = econ::build_design(panel, spec);
    auto result = econ::fit_2sls(design, spec.robust, spec.endogenous);

    const auto json = econ::tsls_to_json(result, &spec);
    if (!a.output.empty()) emit(a.output, json);
    if (a.g.format == "json") {
        if (a.output.empty()) emit("", json);
    } else {
        std::ostringstream table;
        econ::write_tsls_table(table, result, spec);
        emit("", table.str());
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    GraphOptions g;
    std::string output;
    // graph
    std::size_t n_nodes = 50;
    double edge_prob = 0.08, weight_min = 1.0, weight_max = 10.0;
    // panel
    synth::ScmParams scm;
    // corpus
    synth::CorpusParams corpus;
};

void write_graph_dir(const std::string& dir, const CausalGraph& g) {
    fs::create_directories(dir);
    std::ostringstream n, e;
    write_nodes_tsv(n, g);
    write_edges_tsv(e, g);
    emit((fs::path(dir) / "nodes.tsv").string(), n.str());
    emit((fs::path(dir) / "edges.tsv").string(), e.str());
}

int run_synth_graph(const SynthArgs& a) {
    write_graph_dir(a.output, synth::gen_random_graph(a.n_nodes, a.edge_prob, a.weight_min, a.weight_max, a.g.seed));
    return kExitOk;
}

int run_synth_fig3(const SynthArgs& a) {
    write_graph_dir(a.output, synth::fig3_graph());
    return kExitOk;
}

int run_synth_panel(SynthArgs a) {
    a.scm.seed = a.g.seed;
    std::ostringstream out;
    econ::write_panel_csv(out, synth::gen_scm_panel(a.scm));
    emit(a.output, out.str());
    return kExitOk;
}

int run_synth_corpus(SynthArgs a) {
    a.corpus.seed = a.g.seed;
    const auto docs = synth::gen_classification_corpus(a.corpus);
    text::write_corpus(a.output, docs);

    emit((fs::path(a.output) / "similarity.tsv").string(), synth::gen_similarity_table(a.g.seed));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ivkg: mine instrumental-variable patterns from causal knowledge graphs and validate them"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    int code = kExitOk;
    auto guard = [&](auto&& fn) {
        return [&code, fn]() { code = fn(); };
    };

    // mine
    MineArgs mine;
    auto* cmd_mine = app.add_subcommand("mine", "Enumerate and score IV triples (Z, A, B)");
    cmd_mine->add_option("--nodes", mine.nodes, "Nodes TSV (id, term)")->required()->check(CLI::ExistingFile);
    cmd_mine->add_option("--edges", mine.edges, "Edges TSV (src, dst, weight)")->required()->check(CLI::ExistingFile);
    cmd_mine->add_option("-o,--output", mine.output, "Directory for triples.tsv, stats.json, quality.json");
    cmd_mine->add_option("--z", mine.z, "Restrict the instrument loop to these node ids");
    cmd_mine->add_flag("--oracle", mine.oracle, "Use the brute-force oracle (debug, <= 300 nodes)");
    cmd_mine->add_option("--format", mine.g.format, "Standard output format without --output")
        ->check(CLI::IsMember({"tsv", "json"}))
        ->default_str("tsv");
    add_shared(cmd_mine, mine.g, true);
    cmd_mine->callback(guard([&] { return run_mine(mine); }));

    // compare
    CompareArgs cmp;
    auto* cmd_cmp = app.add_subcommand("compare", "Compare the IV (Z) sets of two triple files");
    cmd_cmp->add_option("--left", cmp.left)->required()->check(CLI::ExistingFile);
    cmd_cmp->add_option("--right", cmp.right)->required()->check(CLI::ExistingFile);
    cmd_cmp->add_option("-o,--output", cmp.output, "Overlap JSON (default: stdout)");
    cmd_cmp->callback(guard([&] { return run_compare(cmp); }));

    // features
    FeaturesArgs feat;
    auto* cmd_feat = app.add_subcommand("features", "Build the weighted term-frequency matrix");
    cmd_feat->add_option("--corpus", feat.corpus, "Directory of .txt documents (+ labels.tsv)")->required();
    auto* sim_opt = cmd_feat->add_option("--similarity", feat.similarity, "term/score TSV");
    cmd_feat->add_option("--threshold", feat.threshold, "Similarity threshold")->capture_default_str();
    cmd_feat->add_option("--nodes", feat.nodes, "Graph nodes TSV")->excludes(sim_opt);
    cmd_feat->add_option("--edges", feat.edges, "Graph edges TSV")->excludes(sim_opt);
    cmd_feat->add_flag("--unweighted", feat.unweighted, "Weight every graph concept 1");
    cmd_feat->add_option("--stopwords", feat.stopwords, "Stopword file (one per line)");
    cmd_feat->add_option("-o,--output", feat.output, "Matrix CSV (default: stdout)");
    add_shared(cmd_feat, feat.g, false);
    cmd_feat->callback(guard([&] { return run_features(feat); }));

    // classify
    ClassifyArgs cls;
    auto* cmd_cls = app.add_subcommand("classify", "Train a random forest and report holdout metrics");
    cmd_cls->add_option("--matrix", cls.matrix, "Labeled matrix CSV")->required()->check(CLI::ExistingFile);
    cmd_cls->add_option("--test", cls.test, "Separate labeled test matrix (default: split --matrix)");
    cmd_cls->add_option("--train-fraction", cls.train_fraction)->check(CLI::Range(0.0, 1.0))->capture_default_str();
    cmd_cls->add_option("--trees", cls.trees)->check(CLI::PositiveNumber)->capture_default_str();
    cmd_cls->add_option("--max-depth", cls.max_depth, "0 = unlimited")->capture_default_str();
    cmd_cls->add_option("--min-samples-split", cls.min_samples_split)->check(CLI::Range(2ul, 1000000ul))->capture_default_str();
    cmd_cls->add_option("--features-per-split", cls.features_per_split, "sqrt, all, or an integer")->capture_default_str();
    cmd_cls->add_option("--positive-label", cls.positive_label, "Default: the larger class label");
    cmd_cls->add_option("--metrics-out", cls.metrics_out, "Metrics JSON (default: stdout)");
    cmd_cls->add_option("--model-out", cls.model_out, "Model JSON");
    add_shared(cmd_cls, cls.g, false);
    cmd_cls->callback(guard([&] { return run_classify(cls); }));

    // tsls
    TslsArgs ts;
    auto* cmd_ts = app.add_subcommand("tsls", "Two-stage least squares with weak-instrument diagnostics");
    cmd_ts->add_option("--panel", ts.panel, "Panel CSV with header")->required()->check(CLI::ExistingFile);
    auto* spec_opt = cmd_ts->add_option("--spec", ts.spec, "JSON regression spec")->check(CLI::ExistingFile);
    cmd_ts->add_option("--outcome", ts.outcome)->excludes(spec_opt);
    cmd_ts->add_option("--endogenous", ts.endogenous)->excludes(spec_opt);
    cmd_ts->add_option("--instrument", ts.instruments)->excludes(spec_opt);
    cmd_ts->add_option("--control", ts.controls)->excludes(spec_opt);
    cmd_ts->add_option("--fe", ts.fixed_effects, "Fixed-effect (categorical) column")->excludes(spec_opt);
    cmd_ts->add_option("--robust", ts.robust)->check(CLI::IsMember({"none", "HC1"}))->capture_default_str();
    cmd_ts->add_option("-o,--output", ts.output, "Result JSON file");
    cmd_ts->add_option("--format", ts.g.format, "Standard output format")
        ->check(CLI::IsMember({"text", "json"}))
        ->default_str("text");
    cmd_ts->callback(guard([&] { return run_tsls(ts); }));

    // synth
    SynthArgs syn;
    auto* cmd_syn = app.add_subcommand("synth", "Write synthetic fixtures");
    cmd_syn->require_subcommand(1);
    auto* syn_graph = cmd_syn->add_subcommand("graph", "Random weighted causal graph (nodes.tsv, edges.tsv)");
    syn_graph->add_option("-o,--output", syn.output, "Output directory")->required();
    syn_graph->add_option("--n-nodes", syn.n_nodes)->check(CLI::PositiveNumber)->capture_default_str();
    syn_graph->add_option("--edge-prob", syn.edge_prob)->check(CLI::Range(0.0, 1.0))->capture_default_str();
    syn_graph->add_option("--weight-min", syn.weight_min)->capture_default_str();
    syn_graph->add_option("--weight-max", syn.weight_max)->capture_default_str();
    add_shared(syn_graph, syn.g, false);
    syn_graph->callback(guard([&] { return run_synth_graph(syn); }));

    auto* syn_fig3 = cmd_syn->add_subcommand("fig3", "Seven-node worked example graph");
    syn_fig3->add_option("-o,--output", syn.output, "Output directory")->required();
    syn_fig3->callback(guard([&] { return run_synth_fig3(syn); }));

    auto* syn_panel = cmd_syn->add_subcommand("panel", "Confounded panel with a known treatment effect (CSV)");
    syn_panel->add_option("-o,--output", syn.output, "Panel CSV (default: stdout)");
    syn_panel->add_option("--n", syn.scm.n)->capture_default_str();
    syn_panel->add_option("--pi", syn.scm.pi, "Instrument strength")->capture_default_str();
    syn_panel->add_option("--alpha", syn.scm.alpha, "Confounder -> A")->capture_default_str();
    syn_panel->add_option("--beta", syn.scm.beta, "True effect A -> B")->capture_default_str();
    syn_panel->add_option("--gamma", syn.scm.gamma, "Confounder -> B")->capture_default_str();
    syn_panel->add_option("--sigma-nu", syn.scm.sigma_nu)->capture_default_str();
    syn_panel->add_option("--sigma-eps", syn.scm.sigma_eps)->capture_default_str();
    syn_panel->add_option("--industries", syn.scm.n_industries, "0 = no industry column")->capture_default_str();
    syn_panel->add_option("--years", syn.scm.n_years, "0 = no year column")->capture_default_str();
    syn_panel->add_option("--group-sd", syn.scm.group_sd)->capture_default_str();
    add_shared(syn_panel, syn.g, false);
    syn_panel->callback(guard([&] { return run_synth_panel(syn); }));

    auto* syn_corpus = cmd_syn->add_subcommand("corpus", "Labeled two-class corpus + similarity table");
    syn_corpus->add_option("-o,--output", syn.output, "Output directory")->required();
    syn_corpus->add_option("--docs", syn.corpus.n_docs)->capture_default_str();
    syn_corpus->add_option("--noise", syn.corpus.noise_rate)->check(CLI::Range(0.0, 1.0))->capture_default_str();
    syn_corpus->add_option("--doc-length", syn.corpus.doc_length)->capture_default_str();
    add_shared(syn_corpus, syn.g, false);
    syn_corpus->callback(guard([&] { return run_synth_corpus(syn); }));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitInput;
    } catch (const NumericError& e) {
        std::cerr << "ivkg: numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const Error& e) {
        std::cerr << "ivkg: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "ivkg: " << e.what() << '\n';
        return kExitInput;
    }
    return code;
}
