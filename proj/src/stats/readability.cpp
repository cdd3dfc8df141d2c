#include "textfeat/error.hpp"
#include "textfeat/stats.hpp"

#include <cctype>
#include <cmath>

namespace textfeat {

namespace {

bool is_vowel(char c) {
    switch (c) {
        case 'a': case 'e': case 'i': case 'o': case 'u': case 'y': return true;
        default: return false;
    }
}

bool is_word_char(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '\'';
}

}  // namespace

std::size_t count_syllables(std::string_view word) {
    std::string w;
    for (char c : word) {
        if (std::isalpha(static_cast<unsigned char>(c))) {
            w.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        }
    }
    if (w.empty()) return 0;
    std::size_t groups = 0;
    bool prev_vowel = false;
    for (char c : w) {
        const bool v = is_vowel(c);
        if (v && !prev_vowel) ++groups;
        prev_vowel = v;
    }
    const std::size_t n = w.size();
    if (groups > 1 && w.back() == 'e') {
        const bool consonant_le = n >= 3 && w[n - 2] == 'l' && !is_vowel(w[n - 3]);
        if (!consonant_le && !is_vowel(w[n - 2])) --groups;
    }
    return groups == 0 ? 1 : groups;
}

TextCounts count_text(std::string_view text) {
    TextCounts counts;
    bool words_in_sentence = false;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (is_word_char(c) && c != '\'') {
            std::size_t j = i;
            while (j < text.size() && is_word_char(text[j])) ++j;
            const auto word = text.substr(i, j - i);
            ++counts.words;
            if (count_syllables(word) >= 3) ++counts.polysyllables;
            words_in_sentence = true;
            i = j;
            continue;
        }
        if (c == '.' || c == '!' || c == '?') {
            std::size_t j = i;
            while (j < text.size() && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
            const bool boundary = j == text.size() || std::isspace(static_cast<unsigned char>(text[j]));
            if (boundary && words_in_sentence) {
                ++counts.sentences;
                words_in_sentence = false;
            }
            i = j;
            continue;
        }
        ++i;
    }
    if (words_in_sentence) ++counts.sentences;
    return counts;
}

double smog_from_counts(std::size_t polysyllables, std::size_t sentences) {
    if (sentences == 0) throw StatsError("SMOG index needs at least one sentence");
    return 1.043 * std::sqrt(static_cast<double>(polysyllables) * 30.0 / static_cast<double>(sentences)) +
           3.1291;
}

double smog_index(std::string_view text) {
    const auto counts = count_text(text);
    return smog_from_counts(counts.polysyllables, counts.sentences);
}

}  // namespace textfeat
