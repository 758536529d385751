#pragma once

#include "ivkg/econometrics.hpp"
#include "ivkg/graph.hpp"
#include "ivkg/miner.hpp"
#include "ivkg/textfeat.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ivkg::synth {

// Each ordered pair u != v gets an edge with probability edge_prob, weight
// uniform in [weight_min, weight_max). Node ids 0..n-1, terms "n<id>".
CausalGraph gen_random_graph(std::size_t n_nodes, double edge_prob, double weight_min, double weight_max,
                             std::uint64_t seed);

// Seven-node worked example used throughout the tests (all weights 1).
CausalGraph fig3_graph();

inline constexpr std::size_t kOracleMaxNodes = 300;

// Exhaustive check of every ordered triple of distinct nodes against the
// exclusion predicates, using dense boolean reachability matrices (k-step
// adjacency powers, one per deleted node). Shares no code with the miner.
std::vector<Triple> brute_force_iv_oracle(const CausalGraph& g, const ReachabilitySpec& spec, ExclusionMode mode);

struct CorpusParams {
    std::size_t n_docs = 400;
    std::vector<std::string> background;          // empty: built-in finance vocabulary
    std::array<std::vector<std::string>, 2> markers;  // empty: built-in marker sets
    std::array<std::string, 2> class_labels{"shareholder", "stakeholder"};
    double noise_rate = 0.05;
    std::size_t doc_length = 60;
    std::size_t marker_slots = 10;
    std::uint64_t seed = 0;
};

const std::vector<std::string>& default_background_vocab();
const std::array<std::vector<std::string>, 2>& default_marker_terms();

// Each document carries marker_slots marker terms; each slot is taken from the
// other class with probability noise_rate, capped so that own-class markers
// always outnumber foreign ones. The remaining tokens are background words.
std::vector<text::Document> gen_classification_corpus(const CorpusParams& params);

// Companion `term<TAB>score` table for the built-in vocabulary: marker terms score
// in [0.6, 0.95), background words in [0.05, 0.6), rounded to 3 decimals.
std::string gen_similarity_table(std::uint64_t seed);

struct ScmParams {
    double pi = 1.0;     // Z -> A
    double alpha = 1.0;  // U -> A
    double beta = 2.0;   // A -> B
    double gamma = 1.0;  // U -> B
    double sigma_nu = 1.0;
    double sigma_eps = 1.0;
    std::size_t n = 10000;
    std::uint64_t seed = 0;
    std::size_t n_industries = 0;  // 0: no factor column
    std::size_t n_years = 0;
    double group_sd = 1.0;

    void validate() const;
};

struct ScmSample {
    std::vector<double> z, u, a, b;
    std::vector<std::string> industry, year;
};

// Z, U ~ N(0,1); A = pi Z + alpha U + nu (+ group terms); B = beta A + gamma U + eps (+ group terms).
ScmSample gen_scm_sample(const ScmParams& p);

// Columns z, a, b, then industry / year when requested. U is not emitted.
econ::PanelTable gen_scm_panel(const ScmParams& p);
econ::PanelTable to_panel(const ScmSample& s);

}  // namespace ivkg::synth
