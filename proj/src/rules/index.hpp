#pragma once

#include "textfeat/table.hpp"

#include <bit>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace textfeat::detail {

class TidSet {
public:
    TidSet() = default;
    explicit TidSet(std::size_t n) : words_((n + 63) / 64, 0) {}

    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }

    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    std::size_t count_and(const TidSet& other) const {
        std::size_t c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i) {
            c += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
        }
        return c;
    }

    TidSet operator&(const TidSet& other) const {
        TidSet out = *this;
        for (std::size_t i = 0; i < words_.size(); ++i) out.words_[i] &= other.words_[i];
        return out;
    }

private:
    std::vector<std::uint64_t> words_;
};

// Vertical layout of a transaction list: one tid set per (attribute, value)
// item of the mined attributes, ordered by attribute then value.
class TransactionIndex {
public:
    struct Entry {
        std::size_t attribute = 0;
        std::string value;
        TidSet tids;
    };

    TransactionIndex(std::span<const Itemset> transactions, std::span<const std::string> attributes);

    std::size_t size() const { return n_; }
    const std::vector<std::string>& attributes() const { return attributes_; }
    const std::vector<Entry>& entries() const { return entries_; }
    // Transactions containing `item` (any attribute, mined or not).
    TidSet tids_of(const Item& item) const;

private:
    std::size_t n_ = 0;
    std::vector<std::string> attributes_;
    std::vector<Entry> entries_;
    std::span<const Itemset> transactions_;
};

using ItemIds = std::vector<std::size_t>;

// Apriori-style enumeration over entry ids. `keep` decides whether a
// candidate's tid set survives (it must be anti-monotone for the pruning to
// be exact); `visit` sees every surviving itemset once.
void levelwise(const TransactionIndex& index, const std::function<bool(const TidSet&)>& keep,
               const std::function<void(const ItemIds&, const TidSet&)>& visit);

}  // namespace textfeat::detail
