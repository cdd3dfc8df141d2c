#pragma once

#include "textfeat/json_util.hpp"
#include "textfeat/table.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace textfeat {

struct ContingencyTable {
    std::vector<std::string> row_labels;  // feature categories
    std::vector<std::string> col_labels;  // target categories
    std::vector<std::vector<std::int64_t>> counts;
    std::int64_t n = 0;
    std::size_t excluded_rows = 0;  // rows missing either value

    static ContingencyTable from_counts(std::vector<std::vector<std::int64_t>> counts);
};

// Cross-tabulates over the categories actually observed in rows where both
// cells are present. Throws StatsError when either side has fewer than two
// observed categories.
ContingencyTable contingency(const AugmentedTable& table, std::string_view feature,
                             std::string_view target);

struct ChiSquared {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
};

// Pearson statistic without continuity correction. All-zero rows and
// columns are dropped before the degrees of freedom are counted.
ChiSquared chi_squared_test(const ContingencyTable& table);

// Upper tail of the chi-squared distribution, Q(dof/2, x/2).
double chi_squared_survival(double statistic, double dof);

// sqrt(chi2 / (n (k - 1))) with k the smaller table dimension.
double cramers_v(const ContingencyTable& table);

std::string significance_stars(double p_value);

struct FeatureTestResult {
    std::string feature;
    double chi2 = 0.0;
    int dof = 0;
    double p_value = 1.0;
    double cramers_v = 0.0;
    std::string stars;
    double bootstrap_significant_fraction = 0.0;
    std::size_t bootstrap_reps = 0;
    std::size_t degenerate_resamples = 0;  // counted as non-significant

    bool operator==(const FeatureTestResult&) const = default;
};

struct BootstrapOptions {
    std::size_t reps = 2500;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    std::size_t threads = 1;  // result does not depend on this
};

// Headline statistics come from the full table. Each replicate draws n rows
// with replacement from an mt19937_64 stream seeded by (seed, replicate).
FeatureTestResult bootstrap_test(const AugmentedTable& table, std::string_view feature,
                                 std::string_view target, const BootstrapOptions& options = {});

Json validation_report_json(std::span<const FeatureTestResult> results, double robust_fraction);
std::string validation_report_csv(std::span<const FeatureTestResult> results, double robust_fraction);

// ---- readability ----------------------------------------------------------

struct TextCounts {
    std::size_t sentences = 0;
    std::size_t words = 0;
    std::size_t polysyllables = 0;  // words with three or more syllables
};

// Vowel-group syllable count (a, e, i, o, u, y), less one for a silent
// final "e" (but not "-le" after a consonant), minimum one.
std::size_t count_syllables(std::string_view word);
// Sentences end at '.', '!' or '?' followed by whitespace or end of text; a
// trailing fragment with words counts as a sentence.
TextCounts count_text(std::string_view text);
double smog_from_counts(std::size_t polysyllables, std::size_t sentences);
double smog_index(std::string_view text);

// ---- correlation ----------------------------------------------------------

enum class CorrelationMethod { Pearson, Spearman };

// Pairs with a missing side are dropped; needs at least three pairs and
// non-zero variance on both sides.
double correlate(std::span<const std::optional<double>> x, std::span<const std::optional<double>> y,
                 CorrelationMethod method = CorrelationMethod::Pearson);

// Numeric view of a column: numbers for numeric columns, codes for
// categorical kinds.
std::vector<std::optional<double>> numeric_values(const Column& column);

}  // namespace textfeat
