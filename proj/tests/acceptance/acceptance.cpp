// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failing criteria (0 when everything passes).

#include "../support.hpp"

#include "ivkg/econometrics.hpp"
#include "ivkg/forest.hpp"
#include "ivkg/miner.hpp"
#include "ivkg/random.hpp"
#include "ivkg/reports.hpp"
#include "ivkg/synth.hpp"
#include "ivkg/textfeat.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

using namespace ivkg;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

int g_failures = 0;

template <class Fn>
void criterion(int id, const char* name, double limit_s, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = fn();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs >= limit_s) {
        o.ok = false;
        o.detail += " [over time limit " + std::to_string(limit_s) + " s]";
    }
    char head[160];
    std::snprintf(head, sizeof head, "%s %2d %-34s (%.2f s) ", o.ok ? "PASS" : "FAIL", id, name, secs);
    std::cout << head << o.detail << std::endl;
    if (!o.ok) ++g_failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

VectorXd col(const std::vector<double>& v) {
    return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

MatrixXd ones(Eigen::Index n) { return MatrixXd::Ones(n, 1); }

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

double sample_cov(const VectorXd& x, const VectorXd& y) {
    return ((x.array() - x.mean()) * (y.array() - y.mean())).sum() / double(x.size() - 1);
}

std::string mined_tsv(const CausalGraph& g, const std::vector<Triple>& ts) {
    std::ostringstream out;
    write_triples_tsv(out, g, score_triples(g, ts, {}));
    return out.str();
}

// ---------------------------------------------------------------------------

Outcome fig3() {
    const auto g = synth::fig3_graph();
    MineOptions o;
    o.z_candidates = {368};
    const auto got = enumerate_iv_triples(g, o);
    const std::vector<Triple> want{{368, 1308, 322}, {368, 1308, 1630}, {368, 1308, 2000}, {368, 1402, 322}, {368, 1402, 2000}};
    const bool excl = std::find(got.begin(), got.end(), Triple{368, 1308, 2179}) == got.end();
    return {got == want && excl, std::to_string(got.size()) + " triples for z=368, (368,1308,2179) " +
                                     (excl ? "excluded" : "present")};
}

Outcome oracle_equivalence() {
    rng::Engine e(20240501);
    std::size_t total = 0, mismatches = 0;
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = 20 + rng::index(e, 81);      // 20..100
        const double p = 0.02 + 0.08 * rng::uniform01(e);  // 0.02..0.10
        const auto g = synth::gen_random_graph(n, p, 1.0, 10.0, rng::derive(7, i));
        for (auto mode : {ExclusionMode::a_removed, ExclusionMode::literal}) {
            MineOptions o;
            o.exclusion = mode;
            const auto mined = enumerate_iv_triples(g, o);
            const auto oracle = synth::brute_force_iv_oracle(g, o.reach, mode);
            if (mined_tsv(g, mined) != mined_tsv(g, oracle)) ++mismatches;
            total += mined.size();
        }
    }
    return {mismatches == 0, "100 graph/mode runs, " + std::to_string(total) + " triples, " +
                                 std::to_string(mismatches) + " mismatches"};
}

Outcome literal_pathology() {
    // Every z -> a -> b two-hop chain in the fixtures.
    std::size_t chains = 0, literal_hits = 0, removed_misses = 0;
    for (const auto& g : {synth::fig3_graph(), synth::gen_random_graph(30, 0.08, 1, 10, 3)}) {
        MineOptions lit, rem;
        lit.exclusion = ExclusionMode::literal;
        const auto L = enumerate_iv_triples(g, lit);
        const auto R = enumerate_iv_triples(g, rem);
        const testsupport::PathOracle paths(g, Direction::directed);
        for (const auto& e1 : g.edges())
            for (const auto& e2 : g.edges()) {
                if (e1.dst != e2.src || e2.dst == e1.src) continue;
                const Triple t{e1.src, e1.dst, e2.dst};
                ++chains;
                if (std::binary_search(L.begin(), L.end(), t)) ++literal_hits;
                // a_removed must keep the chain unless b reaches z around a, or z hits b directly
                const bool blocked = g.has_edge(t.z, t.b) || paths.reach(t.b, 3, t.a).count(t.z) ||
                                     !paths.reach(t.a, 3, t.z).count(t.b);
                if (!blocked && !std::binary_search(R.begin(), R.end(), t)) ++removed_misses;
            }
    }
    MineOptions lit, rem;
    lit.exclusion = ExclusionMode::literal;
    const auto f = synth::fig3_graph();
    const auto Lf = enumerate_iv_triples(f, lit), Rf = enumerate_iv_triples(f, rem);
    const Triple probe{368, 1402, 2000};
    const bool fig3_ok = !std::binary_search(Lf.begin(), Lf.end(), probe) && std::binary_search(Rf.begin(), Rf.end(), probe);
    return {literal_hits == 0 && removed_misses == 0 && fig3_ok,
            std::to_string(chains) + " two-hop chains: literal kept " + std::to_string(literal_hits) +
                ", a-removed missed " + std::to_string(removed_misses) + "; (368,1402,2000) " +
                (fig3_ok ? "literal-excluded / a-removed-kept" : "unexpected")};
}

Outcome quality_identity() {
    std::vector<IvTriple> scored;
    std::size_t rubric_errors = 0;
    for (std::uint64_t seed = 1; scored.size() < 1000; ++seed) {
        const auto g = synth::gen_random_graph(25, 0.07, 1.0, 10.0, seed);
        const testsupport::PathOracle paths(g, Direction::directed);
        std::map<NodeId, int> incident;
        for (const auto& e : g.edges()) {
            ++incident[e.src];
            ++incident[e.dst];
        }
        for (const auto& t : score_triples(g, enumerate_iv_triples(g, {}), {})) {
            if (scored.size() == 1000) break;
            const auto wza = paths.widest(t.z, t.a, 3), wab = paths.widest(t.a, t.b, 3);
            const int want = (incident[t.z] == 1) + (wza && *wza >= 5.0) + (wab && *wab >= 5.0);
            const auto cls = want == 3 ? Quality::high : want == 0 ? Quality::low : Quality::middle;
            if (t.score != want || t.quality != cls) ++rubric_errors;
            scored.push_back(t);
        }
    }
    const auto q = quality_partition(scored);
    std::size_t by_score[4] = {0, 0, 0, 0};
    for (const auto& t : scored) ++by_score[t.score];
    const bool ok = q.total() == scored.size() && q.low == by_score[0] && q.middle == by_score[1] + by_score[2] &&
                    q.high == by_score[3] && rubric_errors == 0;
    return {ok, fmt("n=%.0f low=%.0f middle=%.0f", double(scored.size()), double(q.low), double(q.middle)) +
                    " high=" + std::to_string(q.high) + ", rubric mismatches " + std::to_string(rubric_errors)};
}

Outcome tsls_recovery() {
    double sum = 0, min_ols = 1e9, worst_z = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        synth::ScmParams p;
        p.seed = seed;
        const auto s = synth::gen_scm_sample(p);
        const VectorXd z = col(s.z), a = col(s.a), b = col(s.b);
        MatrixXd D(a.size(), 2);
        D << ones(a.size()), a;
        min_ols = std::min(min_ols, econ::fit_ols(b, D, econ::Robust::hc1).coef(1));
        const auto r = econ::fit_2sls(b, a, z, ones(a.size()), econ::Robust::hc1);
        sum += r.second_stage.estimate;
        worst_z = std::max(worst_z, std::abs(r.second_stage.estimate - 2.0) / r.second_stage.se);
    }
    const double bias = std::abs(sum / 20 - 2.0);
    return {min_ols > 2.15 && worst_z < 3 && bias < 0.05,
            fmt("min OLS slope %.4f, max |b-2|/SE %.3f, |mean b - 2| %.5f", min_ols, worst_z, bias)};
}

Outcome closed_form() {
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        synth::ScmParams p;
        p.seed = seed;
        const auto s = synth::gen_scm_sample(p);
        const VectorXd z = col(s.z), a = col(s.a), b = col(s.b);
        const double iv = sample_cov(z, b) / sample_cov(z, a);
        worst = std::max(worst, rel_diff(econ::fit_2sls(b, a, z, ones(z.size()), econ::Robust::hc1).second_stage.estimate, iv));
    }
    return {worst < 1e-8, fmt("max relative difference %.3g over 10 seeds", worst)};
}

Outcome weak_instruments() {
    synth::ScmParams strong;
    strong.seed = 1;
    const auto s = synth::gen_scm_sample(strong);
    const auto rs = econ::fit_2sls(col(s.b), col(s.a), col(s.z), ones(10000), econ::Robust::hc1);

    int weak_below = 0;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        synth::ScmParams p;
        p.pi = 0.01;
        p.n = 1000;
        p.seed = seed;
        const auto w = synth::gen_scm_sample(p);
        if (econ::cragg_donald_f(col(w.a), col(w.z), ones(1000)) < 10) ++weak_below;
    }
    int rejections = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        synth::ScmParams p;
        p.pi = 0;
        p.seed = seed;
        const auto w = synth::gen_scm_sample(p);
        if (econ::anderson_lm(col(w.a), col(w.z), ones(10000)).p_value < 0.05) ++rejections;
    }
    const double size = rejections / 200.0;
    const bool ok = rs.cragg_donald_f > 10 && rs.anderson_lm.p_value < 0.01 && weak_below >= 90 && size >= 0.02 && size <= 0.09;
    return {ok, fmt("strong CD F %.1f, LM p %.2g; ", rs.cragg_donald_f, rs.anderson_lm.p_value) +
                    "weak CD F<10 in " + std::to_string(weak_below) + "/100; " + fmt("LM size %.3f", size)};
}

Outcome identities() {
    synth::ScmParams p;
    p.seed = 3;
    p.n = 5000;
    const auto s = synth::gen_scm_sample(p);
    const VectorXd z = col(s.z), a = col(s.a), b = col(s.b);
    const auto n = z.size();
    MatrixXd X(n, 2);
    rng::Engine e(9);
    for (Eigen::Index i = 0; i < n; ++i) {
        X(i, 0) = 1;
        X(i, 1) = rng::normal(e);
    }
    const double cd_fs = rel_diff(econ::cragg_donald_f(a, z, X), econ::first_stage_f(a, z, X));
    const auto r1 = econ::fit_2sls(b, a, z, X, econ::Robust::hc1);
    const auto r2 = econ::fit_2sls(b, a, z * 7.3, X, econ::Robust::hc1);
    const double scale = std::max({rel_diff(r1.second_stage.estimate, r2.second_stage.estimate),
                                   rel_diff(r1.anderson_lm.value, r2.anderson_lm.value),
                                   rel_diff(r1.cragg_donald_f, r2.cragg_donald_f)});
    MatrixXd D(n, 3);
    D << a, X;
    const double self = rel_diff(econ::fit_2sls(b, a, a, X, econ::Robust::hc1).second_stage.estimate,
                                 econ::fit_ols(b, D, econ::Robust::hc1).coef(0));
    return {cd_fs < 1e-8 && scale < 1e-8 && self < 1e-10,
            fmt("CD vs FS %.2g, rescale %.2g, Z=A vs OLS %.2g", cd_fs, scale, self)};
}

Outcome chi_square() {
    const double a = econ::chi_square_sf(3.841, 1), b = econ::chi_square_sf(6.635, 1);
    const double oa = testsupport::simpson_chi2_sf(3.841, 1), ob = testsupport::simpson_chi2_sf(6.635, 1);
    const bool ok = std::abs(a - 0.05) <= 1e-3 && std::abs(b - 0.01) <= 1e-3 && std::abs(oa - 0.05) <= 1e-3 &&
                    std::abs(ob - 0.01) <= 1e-3 && std::abs(a - oa) < 1e-6 && std::abs(b - ob) < 1e-6;
    return {ok, fmt("sf(3.841,1)=%.6f sf(6.635,1)=%.6f", a, b) + fmt(", oracle %.6f / %.6f", oa, ob)};
}

struct ClassificationArtifacts {
    std::string matrix, model, metrics;
    forest::Metrics m;
};

ClassificationArtifacts classify_run(std::uint64_t seed, unsigned workers) {
    synth::CorpusParams cp;
    cp.n_docs = 400;
    cp.noise_rate = 0.05;
    cp.seed = seed;
    const auto docs = synth::gen_classification_corpus(cp);
    std::istringstream table(synth::gen_similarity_table(seed));
    const auto concepts = text::build_concept_list_from_similarity(table, 0.55);
    const auto m = text::build_feature_matrix(docs, concepts, text::default_stopwords(), workers);
    auto [train, valid] = text::split_train_validation(m, 0.8, seed);
    forest::ForestParams fp;
    fp.n_trees = 100;
    fp.seed = seed;
    fp.workers = workers;
    const auto model = forest::train_forest(train, fp);
    ClassificationArtifacts out;
    out.m = forest::evaluate(valid.labels(), forest::predict(model, valid), cp.class_labels[1]);
    std::ostringstream mcsv;
    text::write_matrix_csv(mcsv, m);
    out.matrix = mcsv.str();
    out.model = forest::model_to_json(model);
    out.metrics = forest::metrics_to_json(out.m);
    return out;
}

Outcome classification() {
    double min_acc = 1, min_f1 = 1;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto r = classify_run(seed, 4);
        min_acc = std::min(min_acc, r.m.accuracy);
        min_f1 = std::min(min_f1, r.m.f1);
    }
    // Scaling: weighted matrix equals raw term frequency times the column weight, exactly.
    synth::CorpusParams cp;
    cp.seed = 9;
    const auto docs = synth::gen_classification_corpus(cp);
    std::istringstream table(synth::gen_similarity_table(9));
    const auto weighted = text::build_concept_list_from_similarity(table, 0.55);
    text::ConceptList unit(text::ConceptSource::graph_unweighted);
    for (const auto& c : weighted.entries()) unit.add(c.term, 1.0);
    const auto W = text::build_feature_matrix(docs, weighted, text::default_stopwords());
    const auto U = text::build_feature_matrix(docs, unit, text::default_stopwords());
    std::size_t bad = 0;
    for (std::size_t r = 0; r < W.rows(); ++r)
        for (std::size_t c = 0; c < W.cols(); ++c)
            if (W.at(r, c) != U.at(r, c) * weighted.entries()[c].weight) ++bad;
    return {min_acc >= 0.95 && min_f1 >= 0.95 && bad == 0,
            fmt("min accuracy %.4f, min F1 %.4f over 5 seeds; ", min_acc, min_f1) + std::to_string(bad) +
                " cells break column scaling"};
}

// Every artifact produced above, serialized; compared across two runs and worker counts.
std::string artifact_bundle(unsigned workers) {
    std::string out;
    const auto g = synth::gen_random_graph(100, 0.05, 1.0, 10.0, 77);
    MineOptions o;
    o.workers = workers;
    const auto ts = enumerate_iv_triples(g, o);
    out += mined_tsv(g, ts);
    out += report::stats_json(summarize(ts, g, o.reach), o);
    out += report::quality_json(quality_partition(score_triples(g, ts, o.reach)), 5.0);

    const auto c = classify_run(3, workers);
    out += c.matrix + c.model + c.metrics;

    synth::ScmParams p;
    p.seed = 5;
    p.n_industries = 4;
    p.n_years = 3;
    const auto panel = synth::gen_scm_panel(p);
    std::ostringstream csv;
    econ::write_panel_csv(csv, panel);
    out += csv.str();
    econ::RegressionSpec spec;
    spec.outcome = "b";
    spec.endogenous = "a";
    spec.instruments = {"z"};
    spec.fixed_effects = {"industry", "year"};
    out += econ::tsls_to_json(econ::fit_2sls(econ::build_design(panel, spec), econ::Robust::hc1, "a"), &spec);
    return out;
}

Outcome determinism() {
    const auto a = artifact_bundle(1), b = artifact_bundle(1), c = artifact_bundle(6);
    return {a == b && a == c, std::to_string(a.size()) + " bytes of artifacts; repeat " + (a == b ? "identical" : "DIFFERS") +
                                  ", 6 workers " + (a == c ? "identical" : "DIFFERS")};
}

}  // namespace

int main() {
    criterion(1, "fig3 reproduction", 1, fig3);
    criterion(2, "oracle equivalence", 60, oracle_equivalence);
    criterion(3, "literal-mode pathology", 1, literal_pathology);
    criterion(4, "quality partition identity", 5, quality_identity);
    criterion(5, "2SLS recovery", 30, tsls_recovery);
    criterion(6, "closed-form IV cross-check", 5, closed_form);
    criterion(7, "weak-instrument diagnostics", 120, weak_instruments);
    criterion(8, "estimator identities", 5, identities);
    criterion(9, "chi-square accuracy", 5, chi_square);
    criterion(10, "classification end-to-end", 60, classification);
    criterion(11, "determinism", 120, determinism);
    std::cout << (g_failures ? "FAILED " : "ALL PASSED ") << 11 - g_failures << "/11" << std::endl;
    return g_failures;
}
