#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "common/error.hpp"
#include "common/util.hpp"
#include "oracles.hpp"
#include "support.hpp"
#include "media/features.hpp"
#include "text/analytics.hpp"

using namespace speakloop;
using namespace speakloop::text;

namespace {

TimedTranscript Words(const std::vector<std::string>& words, double step = 0.5) {
  TimedTranscript t;
  double at = 0.0;
  for (const auto& w : words) {
    t.words.push_back({w, at, at + step * 0.8, 0.9});
    at += step;
  }
  return t;
}

std::vector<std::string> Texts(const TimedTranscript& t) {
  std::vector<std::string> out;
  for (const auto& w : t.words) out.push_back(w.text);
  return out;
}

}  // namespace

TEST_CASE("normalization keeps internal apostrophes") {
  CHECK(NormalizeWord("Don't,") == "don't");
  CHECK(NormalizeWord("\"Hello!\"") == "hello");
  CHECK(NormalizeWord("...") == "");
  CHECK(NormalizeWord("U.S.") == "u.s");
}

TEST_CASE("unique word ratio") {
  auto r = ComputeUniqueWordRatio(Words({"the", "cat", "sat", "on", "the", "mat"}));
  CHECK(r.ratio == doctest::Approx(5.0 / 6.0));
  CHECK(ComputeUniqueWordRatio(Words({"a", "b", "c"})).ratio == 1.0);
  auto empty = ComputeUniqueWordRatio(TimedTranscript{});
  CHECK(empty.empty);
  CHECK(empty.ratio == 0.0);

  std::mt19937_64 rng(5);
  std::vector<std::string> vocab;
  for (int i = 0; i < 50; ++i) vocab.push_back("w" + std::to_string(i));
  std::vector<std::string> words;
  for (int i = 0; i < 1000; ++i) words.push_back(vocab[rng() % vocab.size()]);
  auto t = Words(words, 0.1);
  CHECK(ComputeUniqueWordRatio(t).ratio == oracle::UniqueRatio(words));
  std::shuffle(words.begin(), words.end(), rng);
  CHECK(ComputeUniqueWordRatio(Words(words, 0.1)).ratio == ComputeUniqueWordRatio(t).ratio);
}

TEST_CASE("word frequencies") {
  auto f = WordFrequencies(Words({"go", "go", "stop"}), {}, 10);
  CHECK(f == std::vector<WordCount>{{"go", 2}, {"stop", 1}});
  CHECK(WordFrequencies(Words({"the", "a", "The"}), DefaultStopwords(), 5).empty());
  auto ties = WordFrequencies(Words({"b", "a", "c", "a", "b"}), {}, 2);
  CHECK(ties == std::vector<WordCount>{{"a", 2}, {"b", 2}});
  CHECK_THROWS_AS(WordFrequencies(Words({"x"}), {}, 0), Error);

  std::mt19937_64 rng(9);
  std::vector<std::string> words;
  for (int i = 0; i < 400; ++i) words.push_back(std::string(1, static_cast<char>('a' + rng() % 12)) + (rng() % 3 ? "" : "!"));
  std::set<std::string> stop{"a", "e"};
  auto got = WordFrequencies(Words(words, 0.1), stop, 1000);
  auto want = oracle::Frequencies(words, stop, 1000);
  REQUIRE(got.size() == want.size());
  std::size_t total = 0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    CHECK(got[i].word == want[i].first);
    CHECK(got[i].count == want[i].second);
    total += got[i].count;
  }
  std::size_t stopped = 0;
  for (const auto& w : oracle::NormalizedWords(words)) stopped += stop.count(w);
  CHECK(total == oracle::NormalizedWords(words).size() - stopped);
}

TEST_CASE("filler detection") {
  TimedTranscript t;
  t.words = {{"um", 1.2, 1.4, 0.9}, {"hello", 1.5, 1.9, 0.9}};
  auto f = DetectFillers(t, FillerLexicon({"um"}));
  REQUIRE(f.size() == 1);
  CHECK(f[0] == FillerInstance{"um", 1.2});
  CHECK(DetectFillers(t, FillerLexicon{}).empty());

  TimedTranscript yk;
  yk.words = {{"well", 2.0, 2.5, 1}, {"you", 3.0, 3.1, 1}, {"Know,", 3.2, 3.4, 1}, {"it", 3.5, 3.6, 1}};
  auto m = DetectFillers(yk, FillerLexicon({"you know", "you"}));
  REQUIRE(m.size() == 1);
  CHECK(m[0] == FillerInstance{"you know", 3.0});

  std::mt19937_64 rng(21);
  const std::vector<std::string> vocab{"um", "you", "know", "so", "like", "well", "I", "mean", "Uh,"};
  std::set<std::string> lex{"um", "uh", "you know", "i mean", "so", "like"};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::string> words;
    for (int i = 0; i < 60; ++i) words.push_back(vocab[rng() % vocab.size()]);
    auto tr = Words(words, 0.3);
    auto got = DetectFillers(tr, FillerLexicon(std::vector<std::string>(lex.begin(), lex.end())));
    auto want = oracle::Fillers(words, lex);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].word == want[i].first);
      CHECK(got[i].start == tr.words[want[i].second].start);
    }
  }
}

TEST_CASE("default lexicon and stopword files match the built-ins") {
  auto fillers = ParseWordList(ReadFile(SPEAKLOOP_DATA_DIR "/fillers.txt"));
  CHECK(FillerLexicon(fillers).entries() == DefaultFillerLexicon().entries());
  auto stop = ParseWordList(ReadFile(SPEAKLOOP_DATA_DIR "/stopwords.txt"));
  CHECK(std::set<std::string>(stop.begin(), stop.end()) == DefaultStopwords());
}

TEST_CASE("word prosody") {
  auto tone = testing::Sine(200.0, 0.5, 2.0);
  TimedTranscript t;
  t.words = {{"a", 0.1, 0.6, 1}, {"b", 0.7, 1.7, 1}, {"c", 1.8, 1.8, 1}, {"d", 1.9, 2.5, 1}};
  auto p = ComputeWordProsody(t, tone);
  REQUIRE(p.size() == 4);
  const double global = media::RangeLoudnessDb(tone.samples());
  CHECK(*p[0].mean_loudness == doctest::Approx(global).epsilon(1e-3));
  CHECK(p[1].duration == doctest::Approx(1.0));
  CHECK_FALSE(p[2].mean_loudness.has_value());
  CHECK(p[2].duration == 0.0);
  CHECK(p[3].beyond_audio);
  double total = 0;
  for (const auto& w : p) total += w.duration;
  CHECK(total <= 2.5 + 1e-9);

  media::AudioTrack silence(std::vector<float>(16000, 0.0f), 16000);
  CHECK(*ComputeWordProsody(t, silence)[0].mean_loudness == media::kSilenceFloorDb);

  // Quiet first half, loud second half; token spans the loud half.
  std::vector<float> two(32000);
  for (std::size_t i = 0; i < two.size(); ++i) two[i] = (i < 16000 ? 0.05f : 0.6f) * ((i % 2) ? 1.0f : -1.0f);
  media::AudioTrack stepped(two, 16000);
  TimedTranscript loud;
  loud.words = {{"x", 1.25, 1.75, 1}};
  double ss = 0;
  for (std::size_t i = 20000; i < 28000; ++i) ss += static_cast<double>(two[i]) * two[i];
  const double oracle_db = 20.0 * std::log10(std::sqrt(ss / 8000.0));
  CHECK(std::abs(*ComputeWordProsody(loud, stepped)[0].mean_loudness - oracle_db) < 0.01);
}

TEST_CASE("transcript JSON parsing and validation") {
  auto t = ParseTranscriptJson(R"([{"text":"hi","start":0.0,"end":0.3,"confidence":0.8}])");
  REQUIRE(t.words.size() == 1);
  auto doc = ParseTranscriptJson(TranscriptToJson(t).dump());
  CHECK(doc.words[0].text == "hi");
  CHECK(doc.words[0].confidence == doctest::Approx(0.8));
  CHECK_THROWS_AS(ParseTranscriptJson(R"([{"text":"a","start":1,"end":0.5}])"), Error);
  CHECK_THROWS_AS(ParseTranscriptJson(R"([{"text":"a","start":0,"end":1},{"text":"b","start":0.5,"end":1.5}])"), Error);
  CHECK_THROWS_AS(ParseTranscriptJson(R"([{"text":"a","start":0,"end":1,"confidence":2}])"), Error);
  CHECK_THROWS_AS(ParseTranscriptJson(R"({"schema_version":99,"words":[]})"), Error);
}
