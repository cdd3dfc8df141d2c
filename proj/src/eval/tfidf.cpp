#include "textfeat/error.hpp"
#include "textfeat/eval.hpp"

#include <cctype>
#include <cmath>
#include <set>

namespace textfeat {

std::vector<std::string> tokenize(std::string_view text, const TfidfSettings& settings) {
    std::vector<std::string> out;
    std::string current;
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            current += settings.lowercase ? static_cast<char>(std::tolower(c)) : ch;
        } else if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) out.push_back(std::move(current));
    return out;
}

std::vector<double> SparseMatrix::dense_row(std::size_t r) const {
    std::vector<double> out(cols, 0.0);
    for (const auto& [c, v] : rows.at(r)) out[c] = v;
    return out;
}

TfidfModel fit_tfidf(std::span<const std::string> texts, const TfidfSettings& settings) {
    if (texts.empty()) throw ValidationError("tf-idf needs a non-empty corpus");
    std::map<std::string, std::size_t> df;
    for (const auto& doc : texts) {
        const auto tokens = tokenize(doc, settings);
        for (const auto& t : std::set<std::string>(tokens.begin(), tokens.end())) ++df[t];
    }
    TfidfModel model;
    model.settings = settings;
    model.documents = texts.size();
    const double n = static_cast<double>(texts.size());
    for (const auto& [term, count] : df) {
        if (count < settings.min_df) continue;
        model.vocabulary[term] = model.terms.size();
        model.terms.push_back(term);
        model.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
    }
    if (model.terms.empty()) throw ValidationError("tf-idf vocabulary is empty after filtering");
    return model;
}

SparseMatrix term_counts(const TfidfModel& model, std::span<const std::string> texts) {
    SparseMatrix out;
    out.cols = model.terms.size();
    for (const auto& doc : texts) {
        std::map<std::size_t, double> counts;
        for (const auto& t : tokenize(doc, model.settings)) {
            const auto it = model.vocabulary.find(t);
            if (it != model.vocabulary.end()) counts[it->second] += 1.0;
        }
        out.rows.emplace_back(counts.begin(), counts.end());
    }
    return out;
}

SparseMatrix transform(const TfidfModel& model, std::span<const std::string> texts) {
    auto out = term_counts(model, texts);
    for (auto& row : out.rows) {
        double norm = 0.0;
        for (auto& [c, v] : row) {
            v *= model.idf[c];
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm > 0.0) {
            for (auto& entry : row) entry.second /= norm;
        }
    }
    return out;
}

FeatureMatrix tfidf_features(const TfidfModel& model, std::span<const std::string> row_ids,
                             std::span<const std::string> texts) {
    if (row_ids.size() != texts.size()) throw AlignmentError("row ids and texts differ in length");
    FeatureMatrix out;
    out.row_ids.assign(row_ids.begin(), row_ids.end());
    for (const auto& t : model.terms) out.column_names.push_back("tfidf:" + t);
    out.values = transform(model, texts);
    return out;
}

}  // namespace textfeat
