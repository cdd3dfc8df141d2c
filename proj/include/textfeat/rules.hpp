#pragma once

#include "textfeat/json_util.hpp"
#include "textfeat/table.hpp"

#include <span>
#include <string>
#include <vector>

namespace textfeat {

// antecedent => consequent. `support` counts transactions holding every
// antecedent item and the consequent; `cover` counts those holding the
// antecedent alone.
struct ClassificationRule {
    Itemset antecedent;
    Item consequent;
    std::size_t support = 0;
    std::size_t cover = 0;
    double confidence = 0.0;

    bool operator==(const ClassificationRule&) const = default;
};

// Mines every rule antecedent => target_item whose support reaches
// min_support and whose confidence reaches min_confidence. Antecedents use
// attributes from `attribute_universe`, at most one item per attribute,
// and are grown levelwise with downward-closure pruning on support.
std::vector<ClassificationRule> mine_classification_rules(std::span<const Itemset> transactions,
                                                          const Item& target_item, std::size_t min_support,
                                                          double min_confidence,
                                                          std::span<const std::string> attribute_universe);

struct MiningSettings {
    std::vector<std::string> stable_attributes;
    std::vector<std::string> flexible_attributes;
    std::size_t min_stable = 0;
    std::size_t min_flexible = 1;
    std::size_t min_undesired_support = 1;
    std::size_t min_desired_support = 1;
    double min_undesired_confidence = 0.5;
    double min_desired_confidence = 0.5;
    std::string target;
    std::string undesired_state;
    std::string desired_state;
    bool keep_negative_uplift = false;
    bool reduce_dominant = true;

    // Throws SettingsError on overlapping attribute roles, a target used as
    // an attribute, equal states, or out-of-range thresholds.
    void validate() const;

    static MiningSettings from_json(const Json& doc);
    Json to_json() const;
};

struct ActionStep {
    std::string attribute;
    std::string from;
    std::string to;

    bool changes() const { return from != to; }
    bool operator==(const ActionStep&) const = default;
};

struct ActionRule {
    std::vector<Item> stable_conditions;  // sorted by attribute
    std::vector<ActionStep> actions;      // sorted by attribute; unchanged steps are context
    ClassificationRule undesired_rule;
    ClassificationRule desired_rule;
    std::string target;
    std::string undesired_state;
    std::string desired_state;
    double uplift = 0.0;

    std::size_t changed_count() const;
    // Canonical one-line form, also the lexicographic tie-breaker.
    std::string describe() const;
};

// Expected share of the dataset moved from the undesired to the desired
// state: (conf_d - (1 - conf_u)) * (supp_u / conf_u) / dataset_size.
double compute_uplift(const ClassificationRule& undesired, const ClassificationRule& desired,
                      std::size_t dataset_size);

// Pairs rules with identical stable items and identical flexible attribute
// sets where at least min_flexible flexible attributes change value.
// Negative-uplift pairs are dropped unless settings.keep_negative_uplift.
std::vector<ActionRule> pair_action_rules(std::span<const ClassificationRule> undesired_rules,
                                          std::span<const ClassificationRule> desired_rules,
                                          const MiningSettings& settings, std::size_t dataset_size);

// Removes every rule B for which another rule A has a strictly smaller
// constraint set (stable conditions plus actions) contained in B's and
// uplift(A) >= uplift(B). Survivors are sorted by uplift, descending.
std::vector<ActionRule> reduce_dominant(std::span<const ActionRule> rules);

// Deterministic order: uplift descending, then describe() ascending.
void sort_rules(std::vector<ActionRule>& rules);

struct RuleReport {
    MiningSettings settings;
    std::vector<ActionRule> discovered;
    std::vector<ActionRule> dominant;
    std::size_t dataset_size = 0;
    bool dominance_applied = true;

    Json to_json() const;
    std::string to_text() const;
};

// Runs both classification miners over the rows whose target is present
// (|D| counts exactly those rows), pairs the results and reduces them.
RuleReport mine_action_rules(const AugmentedTable& table, const MiningSettings& settings);
RuleReport mine_action_rules(std::span<const Itemset> transactions, const MiningSettings& settings);

}  // namespace textfeat
