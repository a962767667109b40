#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace speakloop::moderation {

enum class CoarseTag { kNoun, kVerb, kAdjective, kAdverb, kOther };

inline constexpr std::size_t kCoarseTagCount = 5;

// Rule tagger: closed-class lexicon first (determiners, pronouns,
// prepositions, conjunctions -> other; auxiliaries -> verb; a handful of
// common adjectives/adverbs), then suffix rules, default noun.
CoarseTag TagWord(std::string_view lowercase_word);

// Splits on anything that is not a letter, digit or apostrophe.
std::vector<std::string> PosTokens(std::string_view text);

std::array<std::size_t, kCoarseTagCount> CountTags(std::string_view text);

}  // namespace speakloop::moderation
