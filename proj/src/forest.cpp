#include "ivkg/forest.hpp"

#include "ivkg/error.hpp"
#include "ivkg/random.hpp"
#include "ivkg/text_io.hpp"
#include "ivkg/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <thread>

namespace ivkg::forest {

using nlohmann::json;

FeaturesPerSplit FeaturesPerSplit::parse(const std::string& s) {
    if (s == "sqrt") return {Kind::sqrt, 0};
    if (s == "all") return {Kind::all, 0};
    auto k = io::parse_uint(s);
    if (!k || *k == 0) throw InvalidArgument("features per split must be sqrt, all, or a positive integer");
    return {Kind::fixed, static_cast<std::size_t>(*k)};
}

std::string FeaturesPerSplit::to_string() const {
    switch (kind) {
        case Kind::sqrt: return "sqrt";
        case Kind::all: return "all";
        case Kind::fixed: return std::to_string(k);
    }
    return "sqrt";
}

std::size_t FeaturesPerSplit::resolve(std::size_t n_features) const {
    switch (kind) {
        case Kind::sqrt: return std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(double(n_features))));
        case Kind::all: return n_features;
        case Kind::fixed: return k;
    }
    return n_features;
}

void ForestParams::validate(std::size_t n_features) const {
    if (n_trees < 1) throw InvalidArgument("n_trees must be >= 1");
    if (min_samples_split < 2) throw InvalidArgument("min_samples_split must be >= 2");
    if (features_per_split.kind == FeaturesPerSplit::Kind::fixed &&
        (features_per_split.k == 0 || features_per_split.k > n_features))
        throw InvalidArgument("fixed features per split must be in 1..feature count");
}

int Tree::predict(const double* x) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
        const auto& n = nodes[static_cast<std::size_t>(i)];
        i = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return nodes[static_cast<std::size_t>(i)].label;
}

std::vector<std::size_t> ForestModel::votes(const double* x) const {
    std::vector<std::size_t> v(2, 0);
    for (const auto& t : trees) ++v[static_cast<std::size_t>(t.predict(x))];
    return v;
}

std::string ForestModel::predict_row(const double* x) const {
    const auto v = votes(x);
    return v[1] > v[0] ? class_labels[1] : class_labels[0];
}

// ---------------------------------------------------------------------------

namespace {

struct Builder {
    const text::FeatureMatrix& X;
    const std::vector<int>& y;
    const ForestParams& params;
    std::size_t m_try;
    rng::Engine rng;
    Tree tree;

    static double gini(std::size_t n0, std::size_t n1) {
        const double n = double(n0 + n1);
        if (n == 0) return 0;
        const double p0 = double(n0) / n, p1 = double(n1) / n;
        return 1.0 - p0 * p0 - p1 * p1;
    }

    struct Split {
        int feature = -1;
        double threshold = 0;
        double impurity = 0;
    };

    Split best_split(std::vector<std::size_t>& rows, std::size_t n1_total) {
        const std::size_t n_features = X.cols();
        std::vector<std::size_t> features(n_features);
        std::iota(features.begin(), features.end(), 0);
        // Partial Fisher-Yates: the first m_try entries are a uniform sample.
        for (std::size_t i = 0; i < m_try; ++i) {
            const auto j = i + rng::index(rng, n_features - i);
            std::swap(features[i], features[j]);
        }

        Split best;
        best.impurity = std::numeric_limits<double>::infinity();
        const std::size_t n = rows.size();
        for (std::size_t fi = 0; fi < m_try; ++fi) {
            const auto f = features[fi];
            std::stable_sort(rows.begin(), rows.end(),
                             [&](std::size_t a, std::size_t b) { return X.at(a, f) < X.at(b, f); });
            std::size_t left0 = 0, left1 = 0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                (y[rows[i]] ? left1 : left0)++;
                const double v = X.at(rows[i], f);
                const double next = X.at(rows[i + 1], f);
                if (!(v < next)) continue;
                const std::size_t nl = i + 1, nr = n - nl;
                const std::size_t right1 = n1_total - left1, right0 = nr - right1;
                const double imp = (double(nl) * gini(left0, left1) + double(nr) * gini(right0, right1)) / double(n);
                if (imp < best.impurity) {
                    best.impurity = imp;
                    best.feature = static_cast<int>(f);
                    best.threshold = v + (next - v) / 2.0;
                }
            }
        }
        return best;
    }

    int grow(std::vector<std::size_t> rows, std::size_t depth) {
        std::size_t n1 = 0;
        for (auto r : rows) n1 += static_cast<std::size_t>(y[r]);
        const std::size_t n0 = rows.size() - n1;
        const int node = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes.back().label = n1 > n0 ? 1 : 0;

        const bool stop = n0 == 0 || n1 == 0 || rows.size() < params.min_samples_split ||
                          (params.max_depth && depth >= *params.max_depth);
        if (stop) return node;
        const auto split = best_split(rows, n1);
        if (split.feature < 0) return node;  // every sampled feature is constant here

        std::vector<std::size_t> left, right;
        for (auto r : rows) (X.at(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(r);
        rows.clear();
        rows.shrink_to_fit();
        const int l = grow(std::move(left), depth + 1);
        const int r = grow(std::move(right), depth + 1);
        auto& nd = tree.nodes[static_cast<std::size_t>(node)];
        nd.feature = split.feature;
        nd.threshold = split.threshold;
        nd.left = l;
        nd.right = r;
        return node;
    }
};

}  // namespace

ForestModel train_forest(const text::FeatureMatrix& train, const ForestParams& params) {
    if (train.rows() == 0 || train.cols() == 0) throw InvalidArgument("training matrix is empty");
    if (!train.labeled()) throw InvalidArgument("training matrix is unlabeled");
    if (train.rows() < 2) throw InvalidArgument("need at least 2 training rows");
    params.validate(train.cols());

    std::set<std::string> classes(train.labels().begin(), train.labels().end());
    if (classes.size() != 2)
        throw InvalidArgument("binary classification needs exactly 2 classes, found " + std::to_string(classes.size()));

    ForestModel model;
    model.class_labels = {*classes.begin(), *std::next(classes.begin())};
    model.n_features = train.cols();
    model.feature_names = train.col_names();
    model.params = params;

    std::vector<int> y;
    for (const auto& l : train.labels()) y.push_back(l == model.class_labels[1] ? 1 : 0);

    const std::size_t m_try = std::min(params.features_per_split.resolve(train.cols()), train.cols());
    model.trees.resize(params.n_trees);
    auto build = [&](std::size_t t) {
        Builder b{train, y, params, m_try, rng::Engine(rng::derive(params.seed, t)), {}};
        std::vector<std::size_t> sample(train.rows());
        for (auto& s : sample) s = rng::index(b.rng, train.rows());
        b.grow(std::move(sample), 0);
        model.trees[t] = std::move(b.tree);
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(params.workers, static_cast<unsigned>(params.n_trees)));
    if (workers == 1) {
        for (std::size_t t = 0; t < params.n_trees; ++t) build(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t t = next++; t < params.n_trees; t = next++) build(t);
            });
    }
    return model;
}

std::vector<std::string> predict(const ForestModel& model, const text::FeatureMatrix& rows) {
    if (rows.cols() != model.n_features)
        throw InvalidArgument("feature count mismatch: model has " + std::to_string(model.n_features) + ", input has " +
                              std::to_string(rows.cols()));
    std::vector<std::string> out;
    out.reserve(rows.rows());
    for (std::size_t r = 0; r < rows.rows(); ++r) out.push_back(model.predict_row(rows.row(r)));
    return out;
}

// ---------------------------------------------------------------------------

namespace {

json node_to_json(const Tree& t, int i, const ForestModel& m) {
    const auto& n = t.nodes[static_cast<std::size_t>(i)];
    if (n.feature < 0) return {{"leaf", m.class_labels[static_cast<std::size_t>(n.label)]}};
    return {{"feature", n.feature},
            {"threshold", n.threshold},
            {"left", node_to_json(t, n.left, m)},
            {"right", node_to_json(t, n.right, m)}};
}

int node_from_json(const json& j, Tree& t, const ForestModel& m) {
    const int idx = static_cast<int>(t.nodes.size());
    t.nodes.push_back({});
    if (j.contains("leaf")) {
        const auto label = j.at("leaf").get<std::string>();
        if (label == m.class_labels[0])
            t.nodes[static_cast<std::size_t>(idx)].label = 0;
        else if (label == m.class_labels[1])
            t.nodes[static_cast<std::size_t>(idx)].label = 1;
        else
            throw ParseError("model", 0, "leaf carries unknown class '" + label + "'");
        return idx;
    }
    const int f = j.at("feature").get<int>();
    if (f < 0 || static_cast<std::size_t>(f) >= m.n_features) throw ParseError("model", 0, "split feature out of range");
    const double thr = j.at("threshold").get<double>();
    const int l = node_from_json(j.at("left"), t, m);
    const int r = node_from_json(j.at("right"), t, m);
    auto& n = t.nodes[static_cast<std::size_t>(idx)];
    n.feature = f;
    n.threshold = thr;
    n.left = l;
    n.right = r;
    return idx;
}

}  // namespace

std::string model_to_json(const ForestModel& m) {
    json j;
    j["format_version"] = kFormatVersion;
    j["tool_version"] = kToolVersion;
    j["class_labels"] = {m.class_labels[0], m.class_labels[1]};
    j["n_features"] = m.n_features;
    j["feature_names"] = m.feature_names;
    j["params"] = {{"n_trees", m.params.n_trees},
                   {"max_depth", m.params.max_depth ? json(*m.params.max_depth) : json(nullptr)},
                   {"min_samples_split", m.params.min_samples_split},
                   {"features_per_split", m.params.features_per_split.to_string()},
                   {"seed", m.params.seed}};
    auto& trees = j["trees"];
    trees = json::array();
    for (const auto& t : m.trees) trees.push_back(node_to_json(t, 0, m));
    return j.dump() + "\n";
}

ForestModel model_from_json(const std::string& text) {
    try {
        const auto j = json::parse(text);
        if (j.at("format_version").get<int>() != kFormatVersion)
            throw ParseError("model", 0, "unsupported format_version");
        ForestModel m;
        const auto labels = j.at("class_labels").get<std::vector<std::string>>();
        if (labels.size() != 2) throw ParseError("model", 0, "expected 2 class labels");
        m.class_labels = {labels[0], labels[1]};
        m.n_features = j.at("n_features").get<std::size_t>();
        m.feature_names = j.value("feature_names", std::vector<std::string>{});
        const auto& p = j.at("params");
        m.params.n_trees = p.at("n_trees").get<std::size_t>();
        if (!p.at("max_depth").is_null()) m.params.max_depth = p.at("max_depth").get<std::size_t>();
        m.params.min_samples_split = p.at("min_samples_split").get<std::size_t>();
        m.params.features_per_split = FeaturesPerSplit::parse(p.at("features_per_split").get<std::string>());
        m.params.seed = p.at("seed").get<std::uint64_t>();
        for (const auto& tj : j.at("trees")) {
            Tree t;
            node_from_json(tj, t, m);
            m.trees.push_back(std::move(t));
        }
        if (m.trees.empty()) throw ParseError("model", 0, "model has no trees");
        return m;
    } catch (const json::exception& e) {
        throw ParseError("model", 0, e.what());
    }
}

// ---------------------------------------------------------------------------

Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn, std::string positive_label) {
    Metrics m;
    m.tp = tp;
    m.fp = fp;
    m.tn = tn;
    m.fn = fn;
    m.positive_label = std::move(positive_label);
    const double total = double(tp + fp + tn + fn);
    m.accuracy = total > 0 ? double(tp + tn) / total : 0.0;
    m.precision = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
    m.recall = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    return m;
}

Metrics evaluate(const std::vector<std::string>& y_true, const std::vector<std::string>& y_pred,
                 const std::string& positive_label) {
    if (y_true.size() != y_pred.size()) throw InvalidArgument("y_true and y_pred lengths differ");
    if (y_true.empty()) throw InvalidArgument("no predictions to evaluate");
    const bool known = std::find(y_true.begin(), y_true.end(), positive_label) != y_true.end() ||
                       std::find(y_pred.begin(), y_pred.end(), positive_label) != y_pred.end();
    if (!known) throw InvalidArgument("positive label '" + positive_label + "' does not occur");
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool t = y_true[i] == positive_label;
        const bool p = y_pred[i] == positive_label;
        if (t && p) ++tp;
        else if (!t && p) ++fp;
        else if (t && !p) ++fn;
        else ++tn;
    }
    return metrics_from_counts(tp, fp, tn, fn, positive_label);
}

std::string metrics_to_json(const Metrics& m) {
    json j;
    j["tool_version"] = kToolVersion;
    j["format_version"] = kFormatVersion;
    j["positive_label"] = m.positive_label;
    j["accuracy"] = m.accuracy;
    j["precision"] = m.precision;
    j["recall"] = m.recall;
    j["f1"] = m.f1;
    j["tp"] = m.tp;
    j["fp"] = m.fp;
    j["tn"] = m.tn;
    j["fn"] = m.fn;
    return j.dump(2) + "\n";
}

}  // namespace ivkg::forest
