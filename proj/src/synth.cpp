#include "ivkg/synth.hpp"

#include "ivkg/error.hpp"
#include "ivkg/random.hpp"
#include "ivkg/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>

namespace ivkg::synth {

CausalGraph gen_random_graph(std::size_t n_nodes, double edge_prob, double weight_min, double weight_max,
                             std::uint64_t seed) {
    if (n_nodes < 1) throw InvalidArgument("n_nodes must be >= 1");
    if (!(edge_prob >= 0.0 && edge_prob <= 1.0)) throw InvalidArgument("edge_prob must be in [0, 1]");
    if (!(weight_min > 0.0 && weight_max >= weight_min)) throw InvalidArgument("weight range must be positive");
    rng::Engine e(rng::derive(seed, 0x6a09));
    std::map<NodeId, std::string> nodes;
    for (std::size_t i = 0; i < n_nodes; ++i) nodes.emplace(i, "n" + std::to_string(i));
    std::vector<Edge> edges;
    for (std::size_t u = 0; u < n_nodes; ++u)
        for (std::size_t v = 0; v < n_nodes; ++v) {
            if (u == v) continue;
            if (rng::uniform01(e) >= edge_prob) continue;
            const double w = weight_max > weight_min ? rng::uniform(e, weight_min, weight_max) : weight_min;
            edges.push_back({u, v, w});
        }
    return CausalGraph::build(std::move(nodes), edges);
}

CausalGraph fig3_graph() {
    std::map<NodeId, std::string> nodes;
    for (NodeId id : {322, 368, 1308, 1402, 1630, 2000, 2179}) nodes.emplace(id, "concept " + std::to_string(id));
    std::vector<Edge> edges{{368, 1402, 1.0},  {368, 1308, 1.0},  {1402, 2000, 1.0}, {1402, 322, 1.0}, {1308, 2000, 1.0},
                            {1308, 322, 1.0},  {1308, 2179, 1.0}, {1308, 1630, 1.0}, {2179, 368, 1.0}};
    return CausalGraph::build(std::move(nodes), edges);
}

// ---------------------------------------------------------------------------

namespace {

class BitMatrix {
public:
    explicit BitMatrix(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {}
    bool get(std::size_t r, std::size_t c) const { return (bits_[r * words_ + c / 64] >> (c % 64)) & 1u; }
    void set(std::size_t r, std::size_t c) { bits_[r * words_ + c / 64] |= std::uint64_t{1} << (c % 64); }
    void or_row(std::size_t dst, const BitMatrix& src, std::size_t src_row) {
        for (std::size_t w = 0; w < words_; ++w) bits_[dst * words_ + w] |= src.bits_[src_row * words_ + w];
    }
    std::size_t size() const { return n_; }

private:
    std::size_t n_, words_;
    std::vector<std::uint64_t> bits_;
};

// within[u][v]: v is reachable from u by a walk of 1..k arcs avoiding `deleted`.
BitMatrix reach_matrix(const BitMatrix& adj, int k, std::optional<std::size_t> deleted) {
    const std::size_t n = adj.size();
    BitMatrix step(n);
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v)
            if (adj.get(u, v) && u != deleted && v != deleted) step.set(u, v);
    BitMatrix within = step;
    for (int h = 1; h < k; ++h) {
        BitMatrix next = within;
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t w = 0; w < n; ++w)
                if (within.get(u, w)) next.or_row(u, step, w);
        within = std::move(next);
    }
    return within;
}

}  // namespace

std::vector<Triple> brute_force_iv_oracle(const CausalGraph& g, const ReachabilitySpec& spec, ExclusionMode mode) {
    const std::size_t n = g.node_count();
    if (n > kOracleMaxNodes) throw InvalidArgument("oracle is limited to " + std::to_string(kOracleMaxNodes) + " nodes");
    if (spec.max_hops < 1) throw InvalidArgument("max_hops must be >= 1");

    BitMatrix adj(n);
    for (const Edge& e : g.edges()) {
        const auto s = g.index_of(e.src), d = g.index_of(e.dst);
        adj.set(s, d);
        if (spec.direction == Direction::undirected) adj.set(d, s);
    }
    const BitMatrix full = reach_matrix(adj, spec.max_hops, std::nullopt);
    std::vector<std::optional<BitMatrix>> without(n);
    auto minus = [&](std::size_t x) -> const BitMatrix& {
        if (!without[x]) without[x] = reach_matrix(adj, spec.max_hops, x);
        return *without[x];
    };

    std::vector<Triple> out;
    for (std::size_t z = 0; z < n; ++z)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                if (z == a || a == b || z == b) continue;
                bool ok;
                if (mode == ExclusionMode::literal) {
                    ok = full.get(z, a) && full.get(a, b) && !full.get(b, z) && !full.get(z, b);
                } else {
                    ok = full.get(z, a) && minus(z).get(a, b) && !minus(a).get(b, z) && !adj.get(z, b);
                }
                if (ok) out.push_back({g.id_at(z), g.id_at(a), g.id_at(b)});
            }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& default_background_vocab() {
    static const std::vector<std::string> words{
        "revenue",  "growth",    "market",    "quarter",   "report",   "company",  "strategy", "capital",
        "risk",     "operations", "segment",  "customer",  "product",  "cost",     "margin",   "asset",
        "liability", "cash",     "investment", "board",    "outlook",  "guidance", "demand",   "supply",
        "region",   "forecast",  "industry",  "competition", "pricing", "portfolio", "debt",   "financing",
        "expense",  "income",    "performance", "management", "period", "annual",  "policy",   "review"};
    return words;
}

const std::array<std::vector<std::string>, 2>& default_marker_terms() {
    static const std::array<std::vector<std::string>, 2> markers{
        std::vector<std::string>{"dividend", "share buyback", "shareholder return", "earnings per share", "stock price"},
        std::vector<std::string>{"employee welfare", "community engagement", "sustainability", "supplier relations",
                                 "environmental impact"}};
    return markers;
}

std::vector<text::Document> gen_classification_corpus(const CorpusParams& p) {
    const auto& background = p.background.empty() ? default_background_vocab() : p.background;
    const auto& markers = p.markers[0].empty() && p.markers[1].empty() ? default_marker_terms() : p.markers;
    if (markers[0].empty() || markers[1].empty()) throw InvalidArgument("both classes need marker terms");
    for (const auto& m : markers[0])
        if (std::find(markers[1].begin(), markers[1].end(), m) != markers[1].end())
            throw InvalidArgument("marker sets overlap on '" + m + "'");
    if (p.class_labels[0] == p.class_labels[1]) throw InvalidArgument("class labels must differ");
    if (!(p.noise_rate >= 0.0 && p.noise_rate <= 1.0)) throw InvalidArgument("noise_rate must be in [0, 1]");
    if (p.marker_slots < 1) throw InvalidArgument("marker_slots must be >= 1");
    if (background.empty()) throw InvalidArgument("background vocabulary is empty");

    rng::Engine e(rng::derive(p.seed, 0xc0125));
    const std::size_t max_foreign = (p.marker_slots - 1) / 2;
    std::vector<text::Document> docs;
    docs.reserve(p.n_docs);
    for (std::size_t d = 0; d < p.n_docs; ++d) {
        const std::size_t cls = rng::index(e, 2);
        std::vector<std::string> tokens;
        std::size_t foreign = 0;
        for (std::size_t s = 0; s < p.marker_slots; ++s) {
            std::size_t from = cls;
            if (rng::uniform01(e) < p.noise_rate && foreign < max_foreign) {
                from = 1 - cls;
                ++foreign;
            }
            const auto& pool = markers[from];
            tokens.push_back(pool[rng::index(e, pool.size())]);
        }
        while (tokens.size() < std::max(p.doc_length, p.marker_slots)) tokens.push_back(background[rng::index(e, background.size())]);
        rng::shuffle(tokens.begin(), tokens.end(), e);

        std::string text;
        for (std::size_t i = 0; i < tokens.size(); ++i) {
            if (i) text += (i % 12 == 0) ? ". " : " ";
            text += tokens[i];
        }
        text += ".\n";
        char id[32];
        std::snprintf(id, sizeof id, "doc%05zu", d);
        docs.push_back({id, std::move(text), p.class_labels[cls]});
    }
    return docs;
}

std::string gen_similarity_table(std::uint64_t seed) {
    rng::Engine e(rng::derive(seed, 0x7ab1e));
    auto score = [&](double lo, double hi) { return io::format_double(std::round(rng::uniform(e, lo, hi) * 1000) / 1000); };
    std::string out = "term\tscore\n";
    for (const auto& cls : default_marker_terms())
        for (const auto& m : cls) out += m + '\t' + score(0.6, 0.95) + '\n';
    for (const auto& w : default_background_vocab()) out += w + '\t' + score(0.05, 0.6) + '\n';
    return out;
}

// ---------------------------------------------------------------------------

void ScmParams::validate() const {
    if (n < 10) throw InvalidArgument("n must be >= 10");
    if (!(sigma_nu > 0 && sigma_eps > 0)) throw InvalidArgument("noise standard deviations must be positive");
    if ((n_industries > 0 || n_years > 0) && !(group_sd > 0)) throw InvalidArgument("group_sd must be positive");
    if (n_industries == 1 || n_years == 1) throw InvalidArgument("a factor needs at least 2 levels");
}

ScmSample gen_scm_sample(const ScmParams& p) {
    p.validate();
    rng::Engine e(rng::derive(p.seed, 0x5c3));
    // Group intercepts come from their own stream so rows are unaffected by the factor settings.
    rng::Engine ge(rng::derive(p.seed, 0x9e0));
    std::vector<double> ind_a(p.n_industries), ind_b(p.n_industries), yr_a(p.n_years), yr_b(p.n_years);
    for (std::size_t l = 0; l < p.n_industries; ++l) {
        ind_a[l] = p.group_sd * rng::normal(ge);
        ind_b[l] = p.group_sd * rng::normal(ge);
    }
    for (std::size_t l = 0; l < p.n_years; ++l) {
        yr_a[l] = p.group_sd * rng::normal(ge);
        yr_b[l] = p.group_sd * rng::normal(ge);
    }

    ScmSample s;
    s.z.resize(p.n);
    s.u.resize(p.n);
    s.a.resize(p.n);
    s.b.resize(p.n);
    for (std::size_t i = 0; i < p.n; ++i) {
        const double z = rng::normal(e);
        const double u = rng::normal(e);
        const double nu = p.sigma_nu * rng::normal(e);
        const double eps = p.sigma_eps * rng::normal(e);
        double ga = 0, gb = 0;
        if (p.n_industries) {
            const auto l = rng::index(ge, p.n_industries);
            ga += ind_a[l];
            gb += ind_b[l];
            char buf[32];
            std::snprintf(buf, sizeof buf, "ind%02zu", l);
            s.industry.emplace_back(buf);
        }
        if (p.n_years) {
            const auto l = rng::index(ge, p.n_years);
            ga += yr_a[l];
            gb += yr_b[l];
            s.year.push_back(std::to_string(2000 + l));
        }
        s.z[i] = z;
        s.u[i] = u;
        s.a[i] = p.pi * z + p.alpha * u + nu + ga;
        s.b[i] = p.beta * s.a[i] + p.gamma * u + eps + gb;
    }
    return s;
}

econ::PanelTable to_panel(const ScmSample& s) {
    econ::PanelTable t;
    t.add_numeric("z", s.z);
    t.add_numeric("a", s.a);
    t.add_numeric("b", s.b);
    if (!s.industry.empty()) t.add_categorical("industry", s.industry);
    if (!s.year.empty()) t.add_categorical("year", s.year);
    return t;
}

econ::PanelTable gen_scm_panel(const ScmParams& p) { return to_panel(gen_scm_sample(p)); }

}  // namespace ivkg::synth
