#include "index.hpp"

#include "textfeat/error.hpp"
#include "textfeat/rules.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace textfeat {

namespace detail {

TransactionIndex::TransactionIndex(std::span<const Itemset> transactions,
                                   std::span<const std::string> attributes)
    : n_(transactions.size()), attributes_(attributes.begin(), attributes.end()), transactions_(transactions) {
    std::map<std::string, std::size_t, std::less<>> attr_pos;
    for (std::size_t a = 0; a < attributes_.size(); ++a) {
        if (!attr_pos.emplace(attributes_[a], a).second) {
            throw SettingsError("attribute '" + attributes_[a] + "' listed twice");
        }
    }
    std::map<std::pair<std::size_t, std::string>, TidSet> items;
    for (std::size_t t = 0; t < transactions.size(); ++t) {
        for (const auto& item : transactions[t]) {
            const auto it = attr_pos.find(item.attribute);
            if (it == attr_pos.end()) continue;
            auto [slot, inserted] = items.try_emplace({it->second, item.value}, n_);
            slot->second.set(t);
        }
    }
    for (auto& [key, tids] : items) entries_.push_back({key.first, key.second, std::move(tids)});
}

TidSet TransactionIndex::tids_of(const Item& item) const {
    TidSet out(n_);
    for (std::size_t t = 0; t < transactions_.size(); ++t) {
        for (const auto& i : transactions_[t]) {
            if (i == item) {
                out.set(t);
                break;
            }
        }
    }
    return out;
}

void levelwise(const TransactionIndex& index, const std::function<bool(const TidSet&)>& keep,
               const std::function<void(const ItemIds&, const TidSet&)>& visit) {
    struct Node {
        ItemIds items;
        TidSet tids;
    };
    const auto& entries = index.entries();
    std::vector<Node> level;
    for (std::size_t e = 0; e < entries.size(); ++e) {
        if (keep(entries[e].tids)) {
            level.push_back({{e}, entries[e].tids});
            visit(level.back().items, level.back().tids);
        }
    }

    while (level.size() > 1) {
        std::set<ItemIds> frequent;
        for (const auto& node : level) frequent.insert(node.items);

        std::vector<Node> next;
        const std::size_t k = level.front().items.size();
        for (std::size_t i = 0; i < level.size(); ++i) {
            const auto& a = level[i];
            for (std::size_t j = i + 1; j < level.size(); ++j) {
                const auto& b = level[j];
                if (!std::equal(a.items.begin(), a.items.end() - 1, b.items.begin())) break;
                const auto attr_a = entries[a.items.back()].attribute;
                const auto attr_b = entries[b.items.back()].attribute;
                if (attr_a == attr_b) continue;

                ItemIds candidate = a.items;
                candidate.push_back(b.items.back());
                bool closed = true;
                for (std::size_t drop = 0; drop + 2 < candidate.size() && closed; ++drop) {
                    ItemIds subset;
                    subset.reserve(k);
                    for (std::size_t x = 0; x < candidate.size(); ++x) {
                        if (x != drop) subset.push_back(candidate[x]);
                    }
                    closed = frequent.count(subset) > 0;
                }
                if (!closed) continue;
                TidSet tids = a.tids & b.tids;
                if (!keep(tids)) continue;
                next.push_back({std::move(candidate), std::move(tids)});
                visit(next.back().items, next.back().tids);
            }
        }
        level = std::move(next);
    }
}

}  // namespace detail

std::vector<ClassificationRule> mine_classification_rules(std::span<const Itemset> transactions,
                                                          const Item& target_item, std::size_t min_support,
                                                          double min_confidence,
                                                          std::span<const std::string> attribute_universe) {
    if (min_support < 1) throw SettingsError("min_support must be at least 1");
    if (!(min_confidence > 0.0 && min_confidence <= 1.0)) {
        throw SettingsError("min_confidence must lie in (0, 1]");
    }
    for (const auto& a : attribute_universe) {
        if (a == target_item.attribute) throw SettingsError("target attribute cannot appear in antecedents");
    }
    std::vector<ClassificationRule> rules;
    if (transactions.empty() || min_support > transactions.size()) return rules;

    const detail::TransactionIndex index(transactions, attribute_universe);
    const auto target = index.tids_of(target_item);
    const auto& entries = index.entries();

    detail::levelwise(
        index, [&](const detail::TidSet& tids) { return tids.count_and(target) >= min_support; },
        [&](const detail::ItemIds& ids, const detail::TidSet& tids) {
            const auto support = tids.count_and(target);
            const auto cover = tids.count();
            const double confidence = static_cast<double>(support) / static_cast<double>(cover);
            if (confidence < min_confidence) return;
            ClassificationRule rule;
            for (auto id : ids) rule.antecedent.push_back({index.attributes()[entries[id].attribute], entries[id].value});
            std::sort(rule.antecedent.begin(), rule.antecedent.end());
            rule.consequent = target_item;
            rule.support = support;
            rule.cover = cover;
            rule.confidence = confidence;
            rules.push_back(std::move(rule));
        });

    std::sort(rules.begin(), rules.end(), [](const auto& a, const auto& b) {
        if (a.antecedent.size() != b.antecedent.size()) return a.antecedent.size() < b.antecedent.size();
        return a.antecedent < b.antecedent;
    });
    return rules;
}

}  // namespace textfeat
