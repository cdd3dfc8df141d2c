#pragma once

#include "textfeat/json_util.hpp"
#include "textfeat/table.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace textfeat {

// ---- tf-idf -----------------------------------------------------------------

struct TfidfSettings {
    bool lowercase = true;
    std::size_t min_df = 1;  // terms in fewer documents are dropped
};

// Tokens are maximal runs of ASCII letters and digits (single characters
// included); everything else separates.
std::vector<std::string> tokenize(std::string_view text, const TfidfSettings& settings);

using SparseRow = std::vector<std::pair<std::size_t, double>>;  // sorted by column

struct SparseMatrix {
    std::size_t cols = 0;
    std::vector<SparseRow> rows;

    std::vector<double> dense_row(std::size_t r) const;
};

struct TfidfModel {
    TfidfSettings settings;
    std::map<std::string, std::size_t> vocabulary;  // term -> dense index
    std::vector<std::string> terms;                 // index -> term, alphabetical
    std::vector<double> idf;
    std::size_t documents = 0;
};

// idf = ln((1 + N) / (1 + df)) + 1. Throws ValidationError on an empty
// corpus or an empty vocabulary after min_df filtering.
TfidfModel fit_tfidf(std::span<const std::string> texts, const TfidfSettings& settings = {});
// Raw term counts times idf, then L2-normalised per document. Unknown terms
// are ignored; a document with none gives an empty row.
SparseMatrix transform(const TfidfModel& model, std::span<const std::string> texts);
SparseMatrix term_counts(const TfidfModel& model, std::span<const std::string> texts);

// ---- feature matrices ---------------------------------------------------------

struct FeatureMatrix {
    std::vector<std::string> row_ids;
    std::vector<std::string> column_names;
    SparseMatrix values;
};

FeatureMatrix tfidf_features(const TfidfModel& model, std::span<const std::string> row_ids,
                             std::span<const std::string> texts);

// Nominal categorical columns become one-hot blocks (NAME=value), ordinal and
// binary columns their codes, numeric columns their values; text columns and
// the target are skipped. Missing cells contribute zeros.
FeatureMatrix table_features(const AugmentedTable& table);

// Horizontal concatenation, LLM columns first. Row ids must match in order;
// otherwise AlignmentError.
FeatureMatrix fuse_features(const AugmentedTable& llm_table, const FeatureMatrix& tfidf);

// ---- classifiers ------------------------------------------------------------

class Classifier {
public:
    virtual ~Classifier() = default;
    virtual std::vector<std::string> predict(const FeatureMatrix& rows) const = 0;
};

enum class NaiveMode { MostFrequent, Uniform };

class NaiveClassifier : public Classifier {
public:
    // Throws ValidationError on empty targets. Modal ties go to the
    // lexicographically smallest class.
    NaiveClassifier(std::span<const std::string> train_targets, NaiveMode mode, std::uint64_t seed = 0);

    std::vector<std::string> predict(const FeatureMatrix& rows) const override;
    std::vector<std::string> predict_n(std::size_t n) const;
    const std::vector<std::string>& classes() const { return classes_; }
    const std::string& modal_class() const { return modal_; }

private:
    NaiveMode mode_;
    std::uint64_t seed_;
    std::vector<std::string> classes_;
    std::string modal_;
};

// Multinomial Naive Bayes with add-one smoothing over non-negative features.
class NaiveBayes : public Classifier {
public:
    NaiveBayes(const FeatureMatrix& features, std::span<const std::string> targets, double alpha = 1.0);

    std::vector<std::string> predict(const FeatureMatrix& rows) const override;
    // Posterior per row, in classes() order.
    std::vector<std::vector<double>> predict_proba(const FeatureMatrix& rows) const;
    const std::vector<std::string>& classes() const { return classes_; }

private:
    std::vector<double> log_joint(const SparseRow& row) const;

    std::vector<std::string> classes_;
    std::vector<double> log_prior_;
    std::vector<std::vector<double>> log_prob_;  // class x feature
};

// ---- predictions and metrics ---------------------------------------------------

struct Prediction {
    std::string row_id;
    std::string predicted;
    std::string truth;

    bool operator==(const Prediction&) const = default;
};

// CSV with header row_id,predicted[,true].
std::string predictions_csv(std::span<const Prediction> predictions);
std::vector<std::pair<std::string, std::string>> parse_predictions_csv(std::string_view text);

// Joins external predictions to the table target by row id, in file order.
// Unknown or repeated ids raise AlignmentError; rows with a missing target
// are skipped.
std::vector<Prediction> join_predictions(const AugmentedTable& table,
                                         std::span<const std::pair<std::string, std::string>> predicted);

struct ClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct MetricsReport {
    std::size_t n = 0;
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
    std::optional<double> mae;
    std::vector<ClassMetrics> per_class;  // classes present in truth, sorted

    Json to_json() const;
    std::string to_text() const;
};

// Macro averages run over classes present in the truth; a class that is
// never predicted has precision 0. With `ordinal_order`, MAE is computed on
// 0-based positions in that order and every label must appear in it.
MetricsReport evaluate(std::span<const Prediction> predictions,
                       const std::optional<std::vector<std::string>>& ordinal_order = std::nullopt);

}  // namespace textfeat
