#include "textfeat/csv.hpp"
#include "textfeat/error.hpp"
#include "textfeat/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace textfeat {

FeatureMatrix table_features(const AugmentedTable& table) {
    FeatureMatrix out;
    out.row_ids = table.row_ids();
    out.values.rows.assign(table.n_rows(), {});
    std::size_t col = 0;
    for (const auto& column : table.columns()) {
        if (column.name() == table.target_name() || column.kind() == ColumnKind::Text) continue;
        if (column.kind() == ColumnKind::Categorical) {
            for (const auto& cat : column.categories()) out.column_names.push_back(column.name() + "=" + cat);
            for (std::size_t r = 0; r < column.size(); ++r) {
                if (const auto code = column.code(r)) {
                    out.values.rows[r].emplace_back(col + static_cast<std::size_t>(*code), 1.0);
                }
            }
            col += column.categories().size();
        } else {
            out.column_names.push_back(column.name());
            for (std::size_t r = 0; r < column.size(); ++r) {
                const auto v = column.number(r);
                if (v && *v != 0.0) out.values.rows[r].emplace_back(col, *v);
            }
            ++col;
        }
    }
    out.values.cols = col;
    return out;
}

FeatureMatrix fuse_features(const AugmentedTable& llm_table, const FeatureMatrix& tfidf) {
    if (llm_table.row_ids() != tfidf.row_ids) {
        throw AlignmentError("LLM table and tf-idf matrix rows are not aligned by row_id");
    }
    auto out = table_features(llm_table);
    const auto offset = out.values.cols;
    out.column_names.insert(out.column_names.end(), tfidf.column_names.begin(), tfidf.column_names.end());
    out.values.cols += tfidf.values.cols;
    for (std::size_t r = 0; r < out.values.rows.size(); ++r) {
        for (const auto& [c, v] : tfidf.values.rows[r]) out.values.rows[r].emplace_back(offset + c, v);
    }
    return out;
}

std::string predictions_csv(std::span<const Prediction> predictions) {
    std::ostringstream out;
    csv::write_record(out, {"row_id", "predicted", "true"});
    for (const auto& p : predictions) csv::write_record(out, {p.row_id, p.predicted, p.truth});
    return out.str();
}

std::vector<std::pair<std::string, std::string>> parse_predictions_csv(std::string_view text) {
    const auto records = csv::parse(text);
    if (records.empty()) throw SchemaError("predictions file is empty");
    const auto& header = records.front();
    const auto id_col = std::find(header.begin(), header.end(), "row_id") - header.begin();
    const auto pred_col = std::find(header.begin(), header.end(), "predicted") - header.begin();
    if (static_cast<std::size_t>(id_col) == header.size() || static_cast<std::size_t>(pred_col) == header.size()) {
        throw SchemaError("predictions file needs row_id and predicted columns");
    }
    std::vector<std::pair<std::string, std::string>> out;
    for (std::size_t r = 1; r < records.size(); ++r) {
        out.emplace_back(records[r][static_cast<std::size_t>(id_col)], records[r][static_cast<std::size_t>(pred_col)]);
    }
    return out;
}

std::vector<Prediction> join_predictions(const AugmentedTable& table,
                                         std::span<const std::pair<std::string, std::string>> predicted) {
    std::set<std::string> seen;
    std::vector<Prediction> out;
    const auto& target = table.target();
    for (const auto& [id, label] : predicted) {
        const auto r = table.row_index(id);
        if (!r) throw AlignmentError("prediction for unknown row '" + id + "'");
        if (!seen.insert(id).second) throw AlignmentError("duplicate prediction for row '" + id + "'");
        if (!target.cell(*r)) continue;
        out.push_back({id, label, *target.cell(*r)});
    }
    return out;
}

MetricsReport evaluate(std::span<const Prediction> predictions,
                       const std::optional<std::vector<std::string>>& ordinal_order) {
    if (predictions.empty()) throw ValidationError("no predictions to evaluate");
    MetricsReport report;
    report.n = predictions.size();

    std::map<std::string, std::size_t> truth_count;
    std::map<std::string, std::size_t> pred_count;
    std::map<std::string, std::size_t> hits;
    std::size_t correct = 0;
    for (const auto& p : predictions) {
        ++truth_count[p.truth];
        ++pred_count[p.predicted];
        if (p.predicted == p.truth) {
            ++correct;
            ++hits[p.truth];
        }
    }
    const double n = static_cast<double>(report.n);
    report.accuracy = static_cast<double>(correct) / n;

    for (const auto& [label, support] : truth_count) {
        ClassMetrics m;
        m.label = label;
        m.support = support;
        const double tp = static_cast<double>(hits[label]);
        const auto predicted = pred_count.count(label) ? pred_count.at(label) : 0;
        m.precision = predicted ? tp / static_cast<double>(predicted) : 0.0;
        m.recall = tp / static_cast<double>(support);
        m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
        report.macro_precision += m.precision;
        report.macro_recall += m.recall;
        report.macro_f1 += m.f1;
        report.weighted_f1 += m.f1 * static_cast<double>(support) / n;
        report.per_class.push_back(std::move(m));
    }
    const double k = static_cast<double>(report.per_class.size());
    report.macro_precision /= k;
    report.macro_recall /= k;
    report.macro_f1 /= k;

    if (ordinal_order) {
        std::map<std::string, int> position;
        for (std::size_t i = 0; i < ordinal_order->size(); ++i) position.emplace((*ordinal_order)[i], static_cast<int>(i));
        auto pos = [&](const std::string& label) {
            const auto it = position.find(label);
            if (it == position.end()) throw ValidationError("label '" + label + "' is not in the ordinal order");
            return it->second;
        };
        double total = 0.0;
        for (const auto& p : predictions) total += std::abs(pos(p.predicted) - pos(p.truth));
        report.mae = total / n;
    }
    return report;
}

namespace {

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

Json MetricsReport::to_json() const {
    Json doc;
    doc["n"] = n;
    doc["accuracy"] = accuracy;
    doc["macro_precision"] = macro_precision;
    doc["macro_recall"] = macro_recall;
    doc["macro_f1"] = macro_f1;
    doc["weighted_f1"] = weighted_f1;
    doc["mae"] = mae ? Json(*mae) : Json(nullptr);
    Json classes = Json::array();
    for (const auto& c : per_class) {
        classes.push_back({{"label", c.label},
                           {"precision", c.precision},
                           {"recall", c.recall},
                           {"f1", c.f1},
                           {"support", c.support}});
    }
    doc["per_class"] = std::move(classes);
    return doc;
}

std::string MetricsReport::to_text() const {
    std::string out;
    auto line = [&](const std::string& name, const std::string& value) {
        out += name;
        out.append(name.size() < 18 ? 18 - name.size() : 1, ' ');
        out += value + "\n";
    };
    line("n", std::to_string(n));
    line("accuracy", fixed(accuracy));
    line("macro_precision", fixed(macro_precision));
    line("macro_recall", fixed(macro_recall));
    line("macro_f1", fixed(macro_f1));
    line("weighted_f1", fixed(weighted_f1));
    line("mae", mae ? fixed(*mae) : "-");
    return out;
}

}  // namespace textfeat
