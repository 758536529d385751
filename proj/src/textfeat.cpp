#include "ivkg/textfeat.hpp"

#include "ivkg/error.hpp"
#include "ivkg/random.hpp"
#include "ivkg/text_io.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <thread>

namespace fs = std::filesystem;

namespace ivkg::text {

namespace {

// English stopwords (NLTK list), apostrophes removed.
constexpr const char* kStopwords[] = {
    "i",        "me",       "my",      "myself",    "we",       "our",      "ours",    "ourselves", "you",
    "youre",    "youve",    "youll",   "youd",      "your",     "yours",    "yourself", "yourselves", "he",
    "him",      "his",      "himself", "she",       "shes",     "her",      "hers",    "herself",   "it",
    "its",      "itself",   "they",    "them",      "their",    "theirs",   "themselves", "what",   "which",
    "who",      "whom",     "this",    "that",      "thatll",   "these",    "those",   "am",        "is",
    "are",      "was",      "were",    "be",        "been",     "being",    "have",    "has",       "had",
    "having",   "do",       "does",    "did",       "doing",    "a",        "an",      "the",       "and",
    "but",      "if",       "or",      "because",   "as",       "until",    "while",   "of",        "at",
    "by",       "for",      "with",    "about",     "against",  "between",  "into",    "through",   "during",
    "before",   "after",    "above",   "below",     "to",       "from",     "up",      "down",      "in",
    "out",      "on",       "off",     "over",      "under",    "again",    "further", "then",      "once",
    "here",     "there",    "when",    "where",     "why",      "how",      "all",     "any",       "both",
    "each",     "few",      "more",    "most",      "other",    "some",     "such",    "no",        "nor",
    "not",      "only",     "own",     "same",      "so",       "than",     "too",     "very",      "s",
    "t",        "can",      "will",    "just",      "don",      "dont",     "should",  "shouldve",  "now",
    "d",        "ll",       "m",       "o",         "re",       "ve",       "y",       "ain",       "aren",
    "arent",    "couldn",   "couldnt", "didn",      "didnt",    "doesn",    "doesnt",  "hadn",      "hadnt",
    "hasn",     "hasnt",    "haven",   "havent",    "isn",      "isnt",     "ma",      "mightn",    "mightnt",
    "mustn",    "mustnt",   "needn",   "neednt",    "shan",     "shant",    "shouldn", "shouldnt",  "wasn",
    "wasnt",    "weren",    "werent",  "won",       "wont",     "wouldn",   "wouldnt",
};

bool is_word_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::string normalized_key(std::string_view term) {
    static const Stopwords none;
    auto toks = preprocess_document(term, none);
    std::string key;
    for (const auto& t : toks) {
        if (!key.empty()) key.push_back(' ');
        key += t;
    }
    return key;
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(static_cast<char>(c));
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

}  // namespace

const Stopwords& default_stopwords() {
    static const Stopwords words(std::begin(kStopwords), std::end(kStopwords));
    return words;
}

Stopwords read_stopwords(std::istream& in) {
    Stopwords out;
    static const Stopwords none;
    std::string line;
    while (std::getline(in, line)) {
        auto l = io::chomp(line);
        if (l.empty() || l.front() == '#') continue;
        for (auto& t : preprocess_document(l, none)) out.insert(std::move(t));
    }
    return out;
}

std::vector<std::string> preprocess_document(std::string_view text, const Stopwords& stopwords) {
    std::vector<std::string> out;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty() && !stopwords.contains(cur)) out.push_back(cur);
        cur.clear();
    };
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            flush();
        } else if (is_word_byte(c)) {
            cur.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
        }
        // Other ASCII bytes are punctuation or symbols: dropped in place.
    }
    flush();
    return out;
}

std::size_t term_frequency(const std::vector<std::string>& tokens, const std::vector<std::string>& term) {
    if (term.empty() || term.size() > tokens.size()) return 0;
    std::size_t count = 0;
    for (std::size_t i = 0; i + term.size() <= tokens.size();) {
        if (std::equal(term.begin(), term.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
            ++count;
            i += term.size();
        } else {
            ++i;
        }
    }
    return count;
}

std::size_t term_frequency(const std::vector<std::string>& tokens, std::string_view term) {
    return term_frequency(tokens, split_ws(term));
}

std::string_view to_string(ConceptSource s) {
    switch (s) {
        case ConceptSource::similarity: return "similarity";
        case ConceptSource::graph_weighted: return "graph_weighted";
        case ConceptSource::graph_unweighted: return "graph_unweighted";
    }
    return "similarity";
}

void ConceptList::add(std::string term, double weight) {
    if (!std::isfinite(weight) || weight < 0.0) throw InvalidArgument("concept '" + term + "' has an invalid weight");
    if (source_ == ConceptSource::graph_unweighted && weight != 1.0)
        throw InvalidArgument("unweighted concept lists carry weight 1");
    auto key = normalized_key(term);
    if (key.empty()) return;
    auto it = std::find(keys_.begin(), keys_.end(), key);
    if (it != keys_.end()) {
        auto& e = entries_[static_cast<std::size_t>(it - keys_.begin())];
        e.weight = std::max(e.weight, weight);
        return;
    }
    keys_.push_back(std::move(key));
    entries_.push_back({std::move(term), weight});
}

ConceptList ConceptList::scaled(double c) const {
    if (!std::isfinite(c) || c < 0) throw InvalidArgument("scale must be finite and non-negative");
    ConceptList out(source_ == ConceptSource::graph_unweighted && c != 1.0 ? ConceptSource::graph_weighted : source_);
    out.entries_ = entries_;
    out.keys_ = keys_;
    for (auto& e : out.entries_) e.weight *= c;
    return out;
}

ConceptList build_concept_list_from_similarity(std::istream& table, double threshold, std::string_view source) {
    const std::string src{source};
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(table, line) || io::chomp(line) != "term\tscore")
        throw ParseError(src, 1, "expected header `term\tscore`");
    ConceptList list(ConceptSource::similarity);
    while (std::getline(table, line)) {
        ++line_no;
        auto l = io::chomp(line);
        if (l.empty()) continue;
        auto cols = io::split(l, '\t');
        if (cols.size() != 2) throw ParseError(src, line_no, "expected 2 columns, got " + std::to_string(cols.size()));
        auto score = io::parse_double(cols[1]);
        if (!score) throw ParseError(src, line_no, "non-numeric score '" + std::string(cols[1]) + "'");
        if (!(*score >= -1.0 && *score <= 1.0)) throw ParseError(src, line_no, "score outside [-1, 1]");
        if (*score >= threshold && *score >= 0.0) list.add(std::string(cols[0]), *score);
    }
    return list;
}

ConceptList build_concept_list_from_graph(const CausalGraph& g, bool weighted) {
    ConceptList list(weighted ? ConceptSource::graph_weighted : ConceptSource::graph_unweighted);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        if (!weighted) {
            list.add(g.terms()[i], 1.0);
            continue;
        }
        double w = 0.0;
        for (const auto& a : g.out_arcs(i)) w = std::max(w, a.weight);
        for (const auto& a : g.in_arcs(i)) w = std::max(w, a.weight);
        if (w > 0.0) list.add(g.terms()[i], w);
    }
    return list;
}

std::vector<Document> load_corpus(const std::string& dir) {
    if (!fs::is_directory(dir)) throw InvalidArgument("corpus directory not found: " + dir);
    std::map<std::string, std::string> texts;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
        texts.emplace(entry.path().stem().string(), io::read_file(entry.path().string()));
    }
    std::map<std::string, std::string> labels;
    const auto label_path = fs::path(dir) / "labels.tsv";
    const bool has_labels = fs::exists(label_path);
    if (has_labels) {
        std::ifstream in(label_path);
        std::string line;
        std::size_t line_no = 1;
        if (!std::getline(in, line) || io::chomp(line) != "id\tlabel")
            throw ParseError(label_path.string(), 1, "expected header `id\tlabel`");
        while (std::getline(in, line)) {
            ++line_no;
            auto l = io::chomp(line);
            if (l.empty()) continue;
            auto cols = io::split(l, '\t');
            if (cols.size() != 2) throw ParseError(label_path.string(), line_no, "expected 2 columns");
            if (!texts.contains(std::string(cols[0])))
                throw IntegrityError("labels.tsv names unknown document '" + std::string(cols[0]) + "'");
            if (!labels.emplace(std::string(cols[0]), std::string(cols[1])).second)
                throw IntegrityError("labels.tsv repeats document '" + std::string(cols[0]) + "'");
        }
    }
    std::vector<Document> docs;
    for (auto& [id, text] : texts) {
        Document d{id, std::move(text), std::nullopt};
        if (has_labels) {
            auto it = labels.find(id);
            if (it == labels.end()) throw IntegrityError("document '" + id + "' has no label in labels.tsv");
            d.label = it->second;
        }
        docs.push_back(std::move(d));
    }
    return docs;
}

void write_corpus(const std::string& dir, const std::vector<Document>& docs) {
    fs::create_directories(dir);
    bool labeled = !docs.empty();
    for (const auto& d : docs) {
        std::ofstream out(fs::path(dir) / (d.id + ".txt"), std::ios::binary);
        out << d.text;
        labeled = labeled && d.label.has_value();
    }
    if (labeled) {
        std::ofstream out(fs::path(dir) / "labels.tsv", std::ios::binary);
        out << "id\tlabel\n";
        for (const auto& d : docs) out << d.id << '\t' << *d.label << '\n';
    }
}

// ---------------------------------------------------------------------------

FeatureMatrix::FeatureMatrix(std::vector<std::string> row_ids, std::vector<std::string> col_names,
                             std::vector<std::string> labels)
    : row_ids_(std::move(row_ids)), col_names_(std::move(col_names)), labels_(std::move(labels)) {
    if (!labels_.empty() && labels_.size() != row_ids_.size())
        throw InvalidArgument("label count does not match row count");
    values_.assign(row_ids_.size() * col_names_.size(), 0.0);
}

FeatureMatrix FeatureMatrix::select_rows(const std::vector<std::size_t>& rows) const {
    std::vector<std::string> ids, labels;
    for (auto r : rows) {
        ids.push_back(row_ids_.at(r));
        if (labeled()) labels.push_back(labels_[r]);
    }
    FeatureMatrix out(std::move(ids), col_names_, std::move(labels));
    for (std::size_t i = 0; i < rows.size(); ++i)
        std::copy_n(row(rows[i]), cols(), out.values_.begin() + static_cast<std::ptrdiff_t>(i * cols()));
    return out;
}

FeatureMatrix build_feature_matrix(const std::vector<Document>& docs, const ConceptList& concepts,
                                   const Stopwords& stopwords, unsigned workers) {
    if (concepts.empty()) throw InvalidArgument("concept list is empty");
    std::set<std::string> seen;
    std::vector<std::string> ids, labels;
    bool labeled = !docs.empty();
    for (const auto& d : docs) {
        if (!seen.insert(d.id).second) throw IntegrityError("duplicate document id '" + d.id + "'");
        ids.push_back(d.id);
        labeled = labeled && d.label.has_value();
    }
    if (labeled)
        for (const auto& d : docs) labels.push_back(*d.label);

    std::vector<std::string> names;
    std::vector<std::vector<std::string>> term_tokens;
    for (const auto& c : concepts.entries()) {
        names.push_back(c.term);
        term_tokens.push_back(preprocess_document(c.term, stopwords));
    }
    FeatureMatrix m(std::move(ids), std::move(names), std::move(labels));

    auto fill = [&](std::size_t k) {
        const auto tokens = preprocess_document(docs[k].text, stopwords);
        for (std::size_t i = 0; i < term_tokens.size(); ++i) {
            const auto tf = term_frequency(tokens, term_tokens[i]);
            m.at(k, i) = double(tf) * concepts.entries()[i].weight;
        }
    };
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(docs.size(), 1))));
    if (workers == 1) {
        for (std::size_t k = 0; k < docs.size(); ++k) fill(k);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < docs.size(); k = next++) fill(k);
            });
    }
    return m;
}

std::pair<FeatureMatrix, FeatureMatrix> split_train_validation(const FeatureMatrix& m, double train_fraction,
                                                               std::uint64_t seed) {
    if (!m.labeled()) throw InvalidArgument("cannot split an unlabeled matrix");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InvalidArgument("train fraction must be in (0, 1)");
    std::vector<std::size_t> order(m.rows());
    std::iota(order.begin(), order.end(), 0);
    rng::Engine e(rng::derive(seed, 0x5b117));
    rng::shuffle(order.begin(), order.end(), e);
    const auto n_train = static_cast<std::size_t>(std::floor(double(m.rows()) * train_fraction));
    if (n_train == 0 || n_train == m.rows()) throw InvalidArgument("split leaves an empty partition");
    std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> valid(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    return {m.select_rows(train), m.select_rows(valid)};
}

void write_matrix_csv(std::ostream& out, const FeatureMatrix& m) {
    std::vector<std::string> rec{"id"};
    rec.insert(rec.end(), m.col_names().begin(), m.col_names().end());
    if (m.labeled()) rec.push_back("label");
    io::write_csv_record(out, rec);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        rec.clear();
        rec.push_back(m.row_ids()[r]);
        for (std::size_t c = 0; c < m.cols(); ++c) rec.push_back(io::format_double(m.at(r, c)));
        if (m.labeled()) rec.push_back(m.labels()[r]);
        io::write_csv_record(out, rec);
    }
}

FeatureMatrix read_matrix_csv(std::istream& in, std::string_view source) {
    const std::string src{source};
    std::vector<std::string> header;
    std::size_t line_no = 0;
    if (!io::read_csv_record(in, header, line_no) || header.empty() || header[0] != "id")
        throw ParseError(src, 1, "header must start with `id`");
    const bool labeled = header.size() >= 2 && header.back() == "label";
    const std::size_t n_cols = header.size() - 1 - (labeled ? 1 : 0);
    std::vector<std::string> names(header.begin() + 1, header.begin() + 1 + static_cast<std::ptrdiff_t>(n_cols));

    std::vector<std::string> ids, labels;
    std::vector<std::vector<double>> rows;
    std::vector<std::string> rec;
    while (io::read_csv_record(in, rec, line_no)) {
        if (rec.size() == 1 && rec[0].empty()) continue;
        if (rec.size() != header.size())
            throw ParseError(src, line_no, "expected " + std::to_string(header.size()) + " fields");
        ids.push_back(rec[0]);
        std::vector<double> vals;
        for (std::size_t c = 0; c < n_cols; ++c) {
            auto v = io::parse_double(rec[1 + c]);
            if (!v || !std::isfinite(*v) || *v < 0) throw ParseError(src, line_no, "bad feature value '" + rec[1 + c] + "'");
            vals.push_back(*v);
        }
        rows.push_back(std::move(vals));
        if (labeled) labels.push_back(rec.back());
    }
    FeatureMatrix m(std::move(ids), std::move(names), std::move(labels));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < n_cols; ++c) m.at(r, c) = rows[r][c];
    return m;
}

}  // namespace ivkg::text
