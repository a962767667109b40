#include "text/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_set>

#include "common/error.hpp"
#include "common/util.hpp"
#include "media/features.hpp"

namespace speakloop::text {

namespace {

std::vector<std::pair<std::string, const WordToken*>> NormalizedWords(const TimedTranscript& t) {
  std::vector<std::pair<std::string, const WordToken*>> out;
  out.reserve(t.words.size());
  for (const auto& w : t.words) {
    std::string n = NormalizeWord(w.text);
    if (!n.empty()) out.emplace_back(std::move(n), &w);
  }
  return out;
}

constexpr const char* kDefaultFillers[] = {
    "um", "uh", "ah", "er", "like", "you know", "so", "actually", "basically", "literally",
};

constexpr const char* kDefaultStopwords[] = {
    "a", "about", "after", "all", "also", "am", "an", "and", "any", "are", "as", "at", "be",
    "because", "been", "before", "being", "but", "by", "can", "could", "did", "do", "does",
    "doing", "for", "from", "had", "has", "have", "having", "he", "her", "here", "him", "his",
    "how", "i", "i'm", "if", "in", "into", "is", "it", "it's", "its", "just", "me", "more",
    "most", "my", "no", "not", "of", "on", "one", "or", "other", "our", "out", "she", "so",
    "some", "such", "than", "that", "the", "their", "them", "then", "there", "these", "they",
    "this", "those", "to", "too", "up", "very", "was", "we", "were", "what", "when", "where",
    "which", "while", "who", "will", "with", "would", "you", "your",
};

}  // namespace

UniqueWordRatio ComputeUniqueWordRatio(const TimedTranscript& transcript) {
  UniqueWordRatio out;
  std::unordered_set<std::string> distinct;
  for (auto& [word, token] : NormalizedWords(transcript)) {
    distinct.insert(word);
    ++out.total;
  }
  out.distinct = distinct.size();
  out.empty = out.total == 0;
  out.ratio = out.empty ? 0.0 : static_cast<double>(out.distinct) / static_cast<double>(out.total);
  return out;
}

std::vector<WordCount> WordFrequencies(const TimedTranscript& transcript,
                                       const std::set<std::string>& stopwords,
                                       std::size_t top_n) {
  if (top_n == 0) Fail(ErrorKind::kParameter, "word_frequencies: top_n must be at least 1");
  std::map<std::string, std::size_t> counts;
  for (auto& [word, token] : NormalizedWords(transcript))
    if (!stopwords.contains(word)) ++counts[word];
  std::vector<WordCount> out;
  out.reserve(counts.size());
  for (auto& [w, c] : counts) out.push_back({w, c});
  std::stable_sort(out.begin(), out.end(),
                   [](const WordCount& a, const WordCount& b) { return a.count > b.count; });
  if (out.size() > top_n) out.resize(top_n);
  return out;
}

FillerLexicon::FillerLexicon(const std::vector<std::string>& entries) {
  for (const auto& entry : entries) {
    for (auto& normalized : ParseWordList(entry)) {
      auto words = 1 + static_cast<std::size_t>(std::count(normalized.begin(), normalized.end(), ' '));
      max_words_ = std::max(max_words_, words);
      entries_.insert(std::move(normalized));
    }
  }
}

FillerLexicon DefaultFillerLexicon() {
  return FillerLexicon(std::vector<std::string>(std::begin(kDefaultFillers), std::end(kDefaultFillers)));
}

std::set<std::string> DefaultStopwords() {
  return {std::begin(kDefaultStopwords), std::end(kDefaultStopwords)};
}

std::vector<FillerInstance> DetectFillers(const TimedTranscript& transcript,
                                          const FillerLexicon& lexicon) {
  std::vector<FillerInstance> out;
  if (lexicon.empty()) return out;
  const auto words = NormalizedWords(transcript);
  std::size_t i = 0;
  while (i < words.size()) {
    std::size_t matched = 0;
    std::string phrase;
    std::string best;
    for (std::size_t n = 1; n <= lexicon.max_words() && i + n <= words.size(); ++n) {
      if (n > 1) phrase.push_back(' ');
      phrase += words[i + n - 1].first;
      if (lexicon.entries().contains(phrase)) {
        matched = n;
        best = phrase;
      }
    }
    if (matched > 0) {
      out.push_back({best, words[i].second->start});
      i += matched;
    } else {
      ++i;
    }
  }
  return out;
}

std::vector<WordProsody> ComputeWordProsody(const TimedTranscript& transcript,
                                            const media::AudioTrack& audio) {
  std::vector<WordProsody> out;
  out.reserve(transcript.words.size());
  const double rate = audio.sample_rate();
  auto samples = audio.samples();
  for (const auto& w : transcript.words) {
    WordProsody p;
    p.token = w;
    p.duration = w.end - w.start;
    p.beyond_audio = w.end > audio.duration();
    if (p.duration > 0.0) {
      auto begin = static_cast<std::size_t>(std::min<double>(std::llround(w.start * rate), samples.size()));
      auto end = static_cast<std::size_t>(std::min<double>(std::llround(w.end * rate), samples.size()));
      if (end > begin)
        p.mean_loudness = media::RangeLoudnessDb(samples.subspan(begin, end - begin));
      else if (!p.beyond_audio)
        p.mean_loudness = media::kSilenceFloorDb;
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace speakloop::text
