#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "media/audio.hpp"
#include "text/transcript.hpp"

namespace speakloop::text {

struct UniqueWordRatio {
  double ratio = 0.0;
  std::size_t distinct = 0;
  std::size_t total = 0;
  bool empty = true;
};

// Tokens that normalize to the empty string (bare punctuation) are not words
// and are skipped by every analytic below.
UniqueWordRatio ComputeUniqueWordRatio(const TimedTranscript& transcript);

struct WordCount {
  std::string word;
  std::size_t count = 0;
  bool operator==(const WordCount&) const = default;
};

// Sorted by count descending, ties by byte-wise word order; stopwords
// excluded; at most top_n entries.
std::vector<WordCount> WordFrequencies(const TimedTranscript& transcript,
                                       const std::set<std::string>& stopwords,
                                       std::size_t top_n);

class FillerLexicon {
 public:
  FillerLexicon() = default;
  // Entries are normalized (lowercase, trimmed, single spaces).
  explicit FillerLexicon(const std::vector<std::string>& entries);

  const std::set<std::string>& entries() const { return entries_; }
  std::size_t max_words() const { return max_words_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::set<std::string> entries_;
  std::size_t max_words_ = 0;
};

FillerLexicon DefaultFillerLexicon();
std::set<std::string> DefaultStopwords();

struct FillerInstance {
  std::string word;
  double start = 0.0;
  bool operator==(const FillerInstance&) const = default;
};

// Left-to-right scan; at each position the longest matching entry wins and
// its tokens are consumed. Multi-word matches report the first token's start.
std::vector<FillerInstance> DetectFillers(const TimedTranscript& transcript,
                                          const FillerLexicon& lexicon);

struct WordProsody {
  WordToken token;
  double duration = 0.0;
  std::optional<double> mean_loudness;  // nullopt for zero-length tokens
  bool beyond_audio = false;
};

std::vector<WordProsody> ComputeWordProsody(const TimedTranscript& transcript,
                                            const media::AudioTrack& audio);

}  // namespace speakloop::text
