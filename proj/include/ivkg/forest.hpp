#pragma once

#include "ivkg/textfeat.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ivkg::forest {

struct FeaturesPerSplit {
    enum class Kind { sqrt, all, fixed } kind = Kind::sqrt;
    std::size_t k = 0;  // used when kind == fixed

    static FeaturesPerSplit parse(const std::string& s);  // "sqrt", "all" or an integer
    std::string to_string() const;
    std::size_t resolve(std::size_t n_features) const;
};

struct ForestParams {
    std::size_t n_trees = 100;
    std::optional<std::size_t> max_depth;
    std::size_t min_samples_split = 2;
    FeaturesPerSplit features_per_split;
    std::uint64_t seed = 0;
    unsigned workers = 1;  // not part of the model; never changes the result

    void validate(std::size_t n_features) const;
};

// Flat binary tree. Node 0 is the root; leaves have feature == -1.
// Rows with x[feature] <= threshold go left.
struct Tree {
    struct Node {
        int feature = -1;
        double threshold = 0;
        int left = -1;
        int right = -1;
        int label = 0;  // class index, leaves only
    };
    std::vector<Node> nodes;

    int predict(const double* x) const;
};

struct ForestModel {
    std::vector<Tree> trees;
    std::array<std::string, 2> class_labels;  // ascending
    std::size_t n_features = 0;
    std::vector<std::string> feature_names;
    ForestParams params;

    // Majority vote; a tied vote goes to class_labels[0].
    std::string predict_row(const double* x) const;
    std::vector<std::size_t> votes(const double* x) const;
};

// Bootstrap + Gini CART trees; deterministic for a given params.seed.
ForestModel train_forest(const text::FeatureMatrix& train, const ForestParams& params);

std::vector<std::string> predict(const ForestModel& model, const text::FeatureMatrix& rows);

std::string model_to_json(const ForestModel& model);
ForestModel model_from_json(const std::string& text);

struct Metrics {
    double accuracy = 0;
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::string positive_label;
};

Metrics evaluate(const std::vector<std::string>& y_true, const std::vector<std::string>& y_pred,
                 const std::string& positive_label);

Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn,
                            std::string positive_label = "1");

std::string metrics_to_json(const Metrics& m);

}  // namespace ivkg::forest
