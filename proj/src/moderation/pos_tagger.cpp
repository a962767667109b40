#include "moderation/pos_tagger.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace speakloop::moderation {

namespace {

const std::set<std::string_view>& ClosedOther() {
  static const std::set<std::string_view> words{
      // determiners
      "a", "an", "the", "this", "that", "these", "those", "each", "every", "some", "any", "no",
      "another", "all", "both", "either", "neither", "much", "many", "few", "several",
      // pronouns
      "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "he", "him", "his",
      "himself", "she", "her", "hers", "herself", "it", "its", "itself", "we", "us", "our", "ours",
      "they", "them", "their", "theirs", "who", "whom", "whose", "which", "what", "someone",
      "something", "everyone", "everything", "anyone", "anything", "nobody", "nothing",
      // prepositions
      "about", "above", "across", "after", "against", "along", "among", "around", "at", "before",
      "behind", "below", "beneath", "beside", "between", "beyond", "by", "down", "during",
      "except", "for", "from", "in", "inside", "into", "near", "of", "off", "on", "onto", "out",
      "outside", "over", "past", "since", "through", "throughout", "to", "toward", "towards",
      "under", "until", "up", "upon", "with", "within", "without",
      // conjunctions and particles
      "and", "but", "or", "nor", "yet", "so", "because", "although", "though", "if", "unless",
      "while", "whereas", "than", "as", "whether",
  };
  return words;
}

const std::set<std::string_view>& ClosedVerbs() {
  static const std::set<std::string_view> words{
      "is", "am", "are", "was", "were", "be", "been", "being", "have", "has", "had", "do", "does",
      "did", "can", "could", "will", "would", "shall", "should", "may", "might", "must", "i'm",
      "you're", "it's", "don't", "doesn't", "didn't", "can't", "won't", "isn't", "aren't",
      "wasn't", "make", "makes", "made", "look", "looks", "seem", "seems", "sound", "sounds",
      "keep", "try", "use", "get", "go", "think", "feel", "like", "need", "focus", "speak",
      "smile", "move", "say", "said", "see", "saw", "know", "knew",
  };
  return words;
}

const std::set<std::string_view>& ClosedAdjectives() {
  static const std::set<std::string_view> words{
      "good", "great", "nice", "bad", "clear", "loud", "quiet", "soft", "fast", "slow", "calm",
      "natural", "confident", "friendly", "happy", "better", "best", "more", "less", "little",
      "big", "small", "strong", "weak", "well-spoken", "awesome", "excellent", "poor",
  };
  return words;
}

const std::set<std::string_view>& ClosedAdverbs() {
  static const std::set<std::string_view> words{
      "very", "too", "not", "also", "just", "really", "quite", "often", "always", "never",
      "sometimes", "again", "still", "maybe", "perhaps", "here", "there", "now", "then", "well",
      "almost", "even", "rather", "pretty",
  };
  return words;
}

bool EndsWith(std::string_view w, std::string_view suffix) {
  return w.size() > suffix.size() + 1 && w.substr(w.size() - suffix.size()) == suffix;
}

}  // namespace

CoarseTag TagWord(std::string_view w) {
  if (ClosedOther().contains(w)) return CoarseTag::kOther;
  if (ClosedVerbs().contains(w)) return CoarseTag::kVerb;
  if (ClosedAdjectives().contains(w)) return CoarseTag::kAdjective;
  if (ClosedAdverbs().contains(w)) return CoarseTag::kAdverb;
  if (!w.empty() && std::all_of(w.begin(), w.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    return CoarseTag::kOther;
  if (EndsWith(w, "ly")) return CoarseTag::kAdverb;
  if (EndsWith(w, "ing") || EndsWith(w, "ed")) return CoarseTag::kVerb;
  if (EndsWith(w, "ous") || EndsWith(w, "ful") || EndsWith(w, "ive")) return CoarseTag::kAdjective;
  return CoarseTag::kNoun;
}

std::vector<std::string> PosTokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    while (!cur.empty() && cur.front() == '\'') cur.erase(cur.begin());
    while (!cur.empty() && cur.back() == '\'') cur.pop_back();
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '\'' || u >= 0x80)
      cur.push_back(static_cast<char>(std::tolower(u)));
    else
      flush();
  }
  flush();
  return out;
}

std::array<std::size_t, kCoarseTagCount> CountTags(std::string_view text) {
  std::array<std::size_t, kCoarseTagCount> counts{};
  for (const auto& w : PosTokens(text)) ++counts[static_cast<std::size_t>(TagWord(w))];
  return counts;
}

}  // namespace speakloop::moderation
