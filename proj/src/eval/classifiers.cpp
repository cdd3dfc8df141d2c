#include "textfeat/error.hpp"
#include "textfeat/eval.hpp"
#include "textfeat/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace textfeat {

NaiveClassifier::NaiveClassifier(std::span<const std::string> train_targets, NaiveMode mode, std::uint64_t seed)
    : mode_(mode), seed_(seed) {
    if (train_targets.empty()) throw ValidationError("naive classifier needs training targets");
    std::map<std::string, std::size_t> counts;
    for (const auto& t : train_targets) ++counts[t];
    std::size_t best = 0;
    for (const auto& [label, count] : counts) {
        classes_.push_back(label);
        if (count > best) {
            best = count;
            modal_ = label;
        }
    }
}

std::vector<std::string> NaiveClassifier::predict_n(std::size_t n) const {
    if (mode_ == NaiveMode::MostFrequent) return std::vector<std::string>(n, modal_);
    Rng rng(seed_);
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(classes_[rng.below(classes_.size())]);
    return out;
}

std::vector<std::string> NaiveClassifier::predict(const FeatureMatrix& rows) const {
    return predict_n(rows.row_ids.size());
}

NaiveBayes::NaiveBayes(const FeatureMatrix& features, std::span<const std::string> targets, double alpha) {
    const auto n = features.values.rows.size();
    if (n == 0) throw ValidationError("naive Bayes needs training rows");
    if (n != targets.size()) throw AlignmentError("feature rows and targets differ in length");
    if (!(alpha > 0.0)) throw SettingsError("smoothing must be positive");

    std::map<std::string, std::size_t> index;
    for (const auto& t : targets) index.emplace(t, 0);
    for (auto& [label, i] : index) {
        i = classes_.size();
        classes_.push_back(label);
    }
    const auto k = classes_.size();
    const auto v = features.values.cols;
    std::vector<std::vector<double>> counts(k, std::vector<double>(v, 0.0));
    std::vector<double> class_rows(k, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const auto c = index.at(targets[r]);
        class_rows[c] += 1.0;
        for (const auto& [col, value] : features.values.rows[r]) {
            if (value < 0.0) throw ValidationError("naive Bayes needs non-negative features");
            counts[c][col] += value;
        }
    }
    log_prior_.resize(k);
    log_prob_.assign(k, std::vector<double>(v, 0.0));
    for (std::size_t c = 0; c < k; ++c) {
        log_prior_[c] = std::log(class_rows[c] / static_cast<double>(n));
        double total = 0.0;
        for (double x : counts[c]) total += x;
        const double denom = total + alpha * static_cast<double>(v);
        for (std::size_t j = 0; j < v; ++j) log_prob_[c][j] = std::log((counts[c][j] + alpha) / denom);
    }
}

std::vector<double> NaiveBayes::log_joint(const SparseRow& row) const {
    std::vector<double> out = log_prior_;
    for (std::size_t c = 0; c < classes_.size(); ++c) {
        for (const auto& [col, value] : row) {
            if (col < log_prob_[c].size()) out[c] += value * log_prob_[c][col];
        }
    }
    return out;
}

std::vector<std::vector<double>> NaiveBayes::predict_proba(const FeatureMatrix& rows) const {
    std::vector<std::vector<double>> out;
    for (const auto& row : rows.values.rows) {
        auto joint = log_joint(row);
        const double top = *std::max_element(joint.begin(), joint.end());
        double sum = 0.0;
        for (auto& x : joint) {
            x = std::exp(x - top);
            sum += x;
        }
        for (auto& x : joint) x /= sum;
        out.push_back(std::move(joint));
    }
    return out;
}

std::vector<std::string> NaiveBayes::predict(const FeatureMatrix& rows) const {
    std::vector<std::string> out;
    for (const auto& row : rows.values.rows) {
        const auto joint = log_joint(row);
        // first maximum wins, so ties resolve to the smaller label
        const auto best = std::max_element(joint.begin(), joint.end()) - joint.begin();
        out.push_back(classes_[static_cast<std::size_t>(best)]);
    }
    return out;
}

}  // namespace textfeat
