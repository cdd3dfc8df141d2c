#include "textfeat/csv.hpp"
#include "textfeat/error.hpp"
#include "textfeat/rng.hpp"
#include "textfeat/stats.hpp"
#include "textfeat/text.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace textfeat {

namespace {

struct CodedPairs {
    std::vector<int> feature;
    std::vector<int> target;
    std::size_t feature_levels = 0;
    std::size_t target_levels = 0;
};

// Chi-squared on a dense count matrix after dropping empty margins.
// Returns nullopt when fewer than two rows or columns survive.
std::optional<ChiSquared> chi_squared_dense(const std::vector<std::vector<std::int64_t>>& counts,
                                            double* n_out = nullptr, int* k_out = nullptr) {
    const std::size_t rows = counts.size();
    const std::size_t cols = rows ? counts[0].size() : 0;
    std::vector<double> row_sum(rows, 0.0);
    std::vector<double> col_sum(cols, 0.0);
    double n = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            const auto c = static_cast<double>(counts[i][j]);
            row_sum[i] += c;
            col_sum[j] += c;
            n += c;
        }
    }
    const auto live_rows = std::count_if(row_sum.begin(), row_sum.end(), [](double v) { return v > 0; });
    const auto live_cols = std::count_if(col_sum.begin(), col_sum.end(), [](double v) { return v > 0; });
    if (live_rows < 2 || live_cols < 2) return std::nullopt;

    double stat = 0.0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (row_sum[i] == 0) continue;
        for (std::size_t j = 0; j < cols; ++j) {
            if (col_sum[j] == 0) continue;
            const double expected = row_sum[i] * col_sum[j] / n;
            if (!(expected > 0.0)) throw StatsError("zero expected count after pruning empty margins");
            const double diff = static_cast<double>(counts[i][j]) - expected;
            stat += diff * diff / expected;
        }
    }
    ChiSquared out;
    out.statistic = stat;
    out.dof = static_cast<int>((live_rows - 1) * (live_cols - 1));
    out.p_value = chi_squared_survival(stat, out.dof);
    if (n_out) *n_out = n;
    if (k_out) *k_out = static_cast<int>(std::min(live_rows, live_cols));
    return out;
}

CodedPairs coded_pairs(const AugmentedTable& table, std::string_view feature, std::string_view target,
                       std::size_t* excluded) {
    const auto& f = table.column(feature);
    const auto& t = table.column(target);
    if (!is_categorical(f.kind()) || !is_categorical(t.kind())) {
        throw StatsError("contingency needs categorical columns ('" + std::string(feature) + "', '" +
                         std::string(target) + "')");
    }
    CodedPairs out;
    out.feature_levels = f.categories().size();
    out.target_levels = t.categories().size();
    std::size_t skipped = 0;
    for (std::size_t r = 0; r < table.n_rows(); ++r) {
        const auto fc = f.code(r);
        const auto tc = t.code(r);
        if (!fc || !tc) {
            ++skipped;
            continue;
        }
        out.feature.push_back(*fc);
        out.target.push_back(*tc);
    }
    if (excluded) *excluded = skipped;
    return out;
}

}  // namespace

double chi_squared_survival(double statistic, double dof) {
    if (dof <= 0) throw StatsError("chi-squared needs positive degrees of freedom");
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

ContingencyTable ContingencyTable::from_counts(std::vector<std::vector<std::int64_t>> counts) {
    ContingencyTable ct;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (counts[i].size() != counts.front().size()) throw StatsError("ragged contingency table");
        ct.row_labels.push_back(std::to_string(i));
        for (auto c : counts[i]) {
            if (c < 0) throw StatsError("negative count in contingency table");
            ct.n += c;
        }
    }
    if (!counts.empty()) {
        for (std::size_t j = 0; j < counts.front().size(); ++j) ct.col_labels.push_back(std::to_string(j));
    }
    ct.counts = std::move(counts);
    return ct;
}

ContingencyTable contingency(const AugmentedTable& table, std::string_view feature, std::string_view target) {
    std::size_t excluded = 0;
    const auto pairs = coded_pairs(table, feature, target, &excluded);
    std::vector<std::vector<std::int64_t>> full(pairs.feature_levels,
                                                std::vector<std::int64_t>(pairs.target_levels, 0));
    for (std::size_t i = 0; i < pairs.feature.size(); ++i) {
        ++full[static_cast<std::size_t>(pairs.feature[i])][static_cast<std::size_t>(pairs.target[i])];
    }
    const auto& fcats = table.column(feature).categories();
    const auto& tcats = table.column(target).categories();
    std::vector<std::size_t> live_rows;
    std::vector<std::size_t> live_cols;
    for (std::size_t i = 0; i < full.size(); ++i) {
        std::int64_t s = 0;
        for (auto c : full[i]) s += c;
        if (s > 0) live_rows.push_back(i);
    }
    for (std::size_t j = 0; j < pairs.target_levels; ++j) {
        std::int64_t s = 0;
        for (const auto& row : full) s += row[j];
        if (s > 0) live_cols.push_back(j);
    }
    if (live_rows.size() < 2) {
        throw StatsError("feature '" + std::string(feature) + "' has fewer than two observed categories");
    }
    if (live_cols.size() < 2) {
        throw StatsError("target '" + std::string(target) + "' has fewer than two observed categories");
    }
    ContingencyTable ct;
    ct.excluded_rows = excluded;
    for (auto i : live_rows) ct.row_labels.push_back(fcats[i]);
    for (auto j : live_cols) ct.col_labels.push_back(tcats[j]);
    for (auto i : live_rows) {
        std::vector<std::int64_t> row;
        for (auto j : live_cols) {
            row.push_back(full[i][j]);
            ct.n += full[i][j];
        }
        ct.counts.push_back(std::move(row));
    }
    return ct;
}

ChiSquared chi_squared_test(const ContingencyTable& table) {
    if (table.n <= 0) throw StatsError("chi-squared test on an empty table");
    const auto result = chi_squared_dense(table.counts);
    if (!result) throw StatsError("chi-squared test needs at least a 2x2 table with non-empty margins");
    return *result;
}

double cramers_v(const ContingencyTable& table) {
    double n = 0.0;
    int k = 0;
    const auto result = chi_squared_dense(table.counts, &n, &k);
    if (!result) throw StatsError("Cramér's V needs at least a 2x2 table with non-empty margins");
    return std::min(1.0, std::sqrt(result->statistic / (n * (k - 1))));
}

std::string significance_stars(double p_value) {
    if (p_value < 0.001) return "***";
    if (p_value < 0.01) return "**";
    if (p_value < 0.05) return "*";
    return "";
}

FeatureTestResult bootstrap_test(const AugmentedTable& table, std::string_view feature,
                                 std::string_view target, const BootstrapOptions& options) {
    if (options.reps < 1) throw SettingsError("bootstrap needs at least one replicate");
    const auto ct = contingency(table, feature, target);
    const auto full = chi_squared_test(ct);

    FeatureTestResult result;
    result.feature = std::string(feature);
    result.chi2 = full.statistic;
    result.dof = full.dof;
    result.p_value = full.p_value;
    result.cramers_v = cramers_v(ct);
    result.stars = significance_stars(full.p_value);
    result.bootstrap_reps = options.reps;

    const auto pairs = coded_pairs(table, feature, target, nullptr);
    const std::size_t m = pairs.feature.size();
    // 0 = not significant, 1 = significant, 2 = degenerate
    std::vector<unsigned char> outcome(options.reps, 0);

    auto run = [&](std::size_t begin, std::size_t end) {
        std::vector<std::vector<std::int64_t>> counts(pairs.feature_levels,
                                                      std::vector<std::int64_t>(pairs.target_levels));
        for (std::size_t rep = begin; rep < end; ++rep) {
            for (auto& row : counts) std::fill(row.begin(), row.end(), 0);
            Rng rng(mix_seed(options.seed, rep));
            for (std::size_t i = 0; i < m; ++i) {
                const auto pick = static_cast<std::size_t>(rng.below(m));
                ++counts[static_cast<std::size_t>(pairs.feature[pick])][static_cast<std::size_t>(pairs.target[pick])];
            }
            const auto chi = chi_squared_dense(counts);
            if (!chi) {
                outcome[rep] = 2;
            } else {
                outcome[rep] = chi->p_value < options.alpha ? 1 : 0;
            }
        }
    };

    const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, options.reps);
    if (threads == 1) {
        run(0, options.reps);
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (options.reps + threads - 1) / threads;
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t begin = t * chunk;
            const std::size_t end = std::min(options.reps, begin + chunk);
            if (begin < end) pool.emplace_back(run, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    std::size_t significant = 0;
    for (auto o : outcome) {
        if (o == 1) ++significant;
        if (o == 2) ++result.degenerate_resamples;
    }
    result.bootstrap_significant_fraction =
        static_cast<double>(significant) / static_cast<double>(options.reps);
    return result;
}

Json validation_report_json(std::span<const FeatureTestResult> results, double robust_fraction) {
    Json rows = Json::array();
    for (const auto& r : results) {
        Json row;
        row["feature"] = r.feature;
        row["chi2"] = r.chi2;
        row["dof"] = r.dof;
        row["p"] = r.p_value;
        row["stars"] = r.stars;
        row["cramers_v"] = r.cramers_v;
        row["bootstrap_fraction"] = r.bootstrap_significant_fraction;
        row["bootstrap_reps"] = r.bootstrap_reps;
        row["degenerate_resamples"] = r.degenerate_resamples;
        row["robust"] = r.bootstrap_significant_fraction >= robust_fraction;
        rows.push_back(std::move(row));
    }
    Json doc;
    doc["robust_fraction"] = robust_fraction;
    doc["features"] = std::move(rows);
    return doc;
}

std::string validation_report_csv(std::span<const FeatureTestResult> results, double robust_fraction) {
    std::ostringstream out;
    csv::write_record(out, {"feature", "chi2", "dof", "p", "stars", "cramers_v", "bootstrap_fraction", "robust"});
    for (const auto& r : results) {
        csv::write_record(out, {r.feature, text::format_double(r.chi2), std::to_string(r.dof),
                                text::format_double(r.p_value), r.stars, text::format_double(r.cramers_v),
                                text::format_double(r.bootstrap_significant_fraction),
                                r.bootstrap_significant_fraction >= robust_fraction ? "yes" : "no"});
    }
    return out.str();
}

}  // namespace textfeat
