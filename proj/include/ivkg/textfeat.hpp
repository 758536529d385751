#pragma once

#include "ivkg/graph.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ivkg::text {

using Stopwords = std::set<std::string, std::less<>>;

// Bundled English list (already normalized: lowercase, apostrophes removed).
const Stopwords& default_stopwords();
// One word per line; blank lines and '#' comments skipped; entries normalized.
Stopwords read_stopwords(std::istream& in);

// Lowercase, delete ASCII punctuation/symbols, split on whitespace, drop stopwords.
// Bytes >= 0x80 (non-ASCII UTF-8) are kept as word characters.
std::vector<std::string> preprocess_document(std::string_view text, const Stopwords& stopwords);

// Non-overlapping left-to-right matches of `term` (a token sequence) in `tokens`.
std::size_t term_frequency(const std::vector<std::string>& tokens, const std::vector<std::string>& term);
// `term` is split on whitespace; it must already be normalized like the tokens.
std::size_t term_frequency(const std::vector<std::string>& tokens, std::string_view term);

enum class ConceptSource { similarity, graph_weighted, graph_unweighted };

std::string_view to_string(ConceptSource s);

struct Concept {
    std::string term;
    double weight = 1.0;
};

class ConceptList {
public:
    explicit ConceptList(ConceptSource source = ConceptSource::similarity) : source_(source) {}

    // Terms are keyed by their normalized form (no stopword removal). A term that
    // collides with an existing one keeps the first position and the larger weight.
    // Terms that normalize to nothing are ignored. Throws on negative/non-finite weight.
    void add(std::string term, double weight);

    ConceptSource source() const noexcept { return source_; }
    const std::vector<Concept>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }

    ConceptList scaled(double c) const;

private:
    ConceptSource source_;
    std::vector<Concept> entries_;
    std::vector<std::string> keys_;
};

// `term<TAB>score` rows; keeps score >= threshold with weight = score.
ConceptList build_concept_list_from_similarity(std::istream& table, double threshold,
                                               std::string_view source = "similarity");

// Weighted: weight = max incident edge weight, isolated nodes dropped.
// Unweighted: every node, weight 1.
ConceptList build_concept_list_from_graph(const CausalGraph& g, bool weighted);

struct Document {
    std::string id;
    std::string text;
    std::optional<std::string> label;
};

// Directory of *.txt files (id = file stem, ascending by id) plus optional labels.tsv.
std::vector<Document> load_corpus(const std::string& dir);
void write_corpus(const std::string& dir, const std::vector<Document>& docs);

class FeatureMatrix {
public:
    FeatureMatrix() = default;
    FeatureMatrix(std::vector<std::string> row_ids, std::vector<std::string> col_names,
                  std::vector<std::string> labels = {});

    std::size_t rows() const noexcept { return row_ids_.size(); }
    std::size_t cols() const noexcept { return col_names_.size(); }
    double& at(std::size_t r, std::size_t c) { return values_[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }
    const double* row(std::size_t r) const { return values_.data() + r * cols(); }

    const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }
    const std::vector<std::string>& col_names() const noexcept { return col_names_; }
    bool labeled() const noexcept { return !labels_.empty(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    FeatureMatrix select_rows(const std::vector<std::size_t>& rows) const;

private:
    std::vector<std::string> row_ids_;
    std::vector<std::string> col_names_;
    std::vector<std::string> labels_;  // empty or one per row
    std::vector<double> values_;
};

// cell(k, i) = tf(term_i, doc_k') * w_i. Rows follow `docs`, columns follow `concepts`.
// The matrix is labeled iff every document carries a label.
FeatureMatrix build_feature_matrix(const std::vector<Document>& docs, const ConceptList& concepts,
                                   const Stopwords& stopwords, unsigned workers = 1);

// Seeded shuffle, then floor(n * train_fraction) rows go to training.
std::pair<FeatureMatrix, FeatureMatrix> split_train_validation(const FeatureMatrix& m, double train_fraction,
                                                               std::uint64_t seed);

// CSV: id, concept columns, trailing `label` column when labeled.
void write_matrix_csv(std::ostream& out, const FeatureMatrix& m);
FeatureMatrix read_matrix_csv(std::istream& in, std::string_view source = "matrix");

}  // namespace ivkg::text
