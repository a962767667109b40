#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "common/error.hpp"
#include "generators.hpp"
#include "moderation/features.hpp"
#include "moderation/ranking.hpp"
#include "moderation/regression.hpp"
#include "moderation/sentiment.hpp"
#include "moderation/training.hpp"
#include "oracles.hpp"

using namespace speakloop;
using namespace speakloop::moderation;

namespace {

SeriesMap ConstantSeries(double value, double seconds = 30.0) {
  SeriesMap m;
  for (media::Signal s : media::kAllSignals) {
    media::BehaviorSeries b{s, 0.0, 0.1, {}};
    b.values.assign(static_cast<std::size_t>(seconds / 0.1), value);
    m[s] = b;
  }
  return m;
}

Comment MakeComment(std::string text, std::optional<double> ts = std::nullopt) {
  Comment c;
  c.id = "c1";
  c.text = std::move(text);
  c.video_timestamp = ts;
  return c;
}

}  // namespace

TEST_CASE("features: text statistics of an unhelpful comment") {
  auto f = ExtractFeatures(MakeComment("Good speech."), ConstantSeries(1.0));
  CHECK(f.char_count == 12);
  CHECK(f.has_punctuation);
  CHECK(f.has_capitals);
  CHECK(f.pos_counts[static_cast<std::size_t>(CoarseTag::kAdjective)] == 1);
  CHECK(f.pos_counts[static_cast<std::size_t>(CoarseTag::kNoun)] == 1);

  auto plain = ExtractFeatures(MakeComment("nice"), ConstantSeries(1.0));
  CHECK_FALSE(plain.has_punctuation);
  CHECK_FALSE(plain.has_capitals);
}

TEST_CASE("features: untimed comments have every multimodal slot missing") {
  auto f = ExtractFeatures(MakeComment("nice"), ConstantSeries(3.0));
  std::size_t missing = 0;
  for (const auto& s : f.multimodal)
    for (const auto& w : s) missing += w.missing ? 2 : 0;  // mean and sd slots
  CHECK(missing == 24);
  auto v = FeatureVector(f);
  REQUIRE(v.size() == kFeatureDimension);
  CHECK(kFeatureDimension == 35);
  CHECK(v[32] == 1.0);
  CHECK(v[33] == 1.0);
  CHECK(v[34] == 1.0);
  CHECK(FeatureNames().size() == kFeatureDimension);
}

TEST_CASE("features: constant series give constant window means") {
  for (double ts : {0.0, 5.3, 29.9}) {
    auto f = ExtractFeatures(MakeComment("Look at the camera", ts), ConstantSeries(42.5));
    for (const auto& s : f.multimodal)
      for (const auto& w : s) {
        CHECK_FALSE(w.missing);
        CHECK(w.mean == 42.5);
        CHECK(w.sd == 0.0);
      }
    CHECK(f == ExtractFeatures(MakeComment("Look at the camera", ts), ConstantSeries(42.5)));
  }
  CHECK_THROWS_AS(ExtractFeatures(MakeComment("x"), SeriesMap{}), Error);
}

TEST_CASE("pos tagger rules") {
  CHECK(TagWord("the") == CoarseTag::kOther);
  CHECK(TagWord("quickly") == CoarseTag::kAdverb);
  CHECK(TagWord("speaking") == CoarseTag::kVerb);
  CHECK(TagWord("moved") == CoarseTag::kVerb);
  CHECK(TagWord("nervous") == CoarseTag::kAdjective);
  CHECK(TagWord("helpful") == CoarseTag::kAdjective);
  CHECK(TagWord("expressive") == CoarseTag::kAdjective);
  CHECK(TagWord("camera") == CoarseTag::kNoun);
  CHECK(PosTokens("Don't look off-screen!") == std::vector<std::string>{"don't", "look", "off", "screen"});
}

TEST_CASE("ols: noiseless y = 2 * char_count + 1") {
  std::mt19937_64 rng(1);
  std::vector<LabeledFeatures> data;
  for (int i = 0; i < 80; ++i) {
    auto f = testing::RandomFeatures(rng);
    data.push_back({f, 2.0 * static_cast<double>(f.char_count) + 1.0});
  }
  auto m = TrainHelpfulness(data, Category::kMovement);
  CHECK_FALSE(m.ridge_fallback);
  CHECK(m.weights[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(m.intercept == doctest::Approx(1.0).epsilon(1e-6));
  for (std::size_t j = 1; j < m.weights.size(); ++j) CHECK(std::abs(m.weights[j]) < 1e-8);
  REQUIRE(m.r_squared.has_value());
  CHECK(*m.r_squared == doctest::Approx(1.0));
}

TEST_CASE("ols: constant target") {
  std::mt19937_64 rng(2);
  std::vector<LabeledFeatures> data;
  for (int i = 0; i < 50; ++i) data.push_back({testing::RandomFeatures(rng), 25.0});
  auto m = TrainHelpfulness(data, Category::kSpeech);
  for (double w : m.weights) CHECK(std::abs(w) < 1e-12);
  CHECK(m.intercept == doctest::Approx(25.0));
  CHECK_FALSE(m.r_squared.has_value());
}

TEST_CASE("ols: too few examples is a training error") {
  std::mt19937_64 rng(3);
  std::vector<LabeledFeatures> data;
  for (int i = 0; i < 35; ++i) data.push_back({testing::RandomFeatures(rng), 1.0});
  try {
    TrainHelpfulness(data, Category::kSpeech);
    FAIL("expected training error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kTraining);
  }
}

TEST_CASE("ols: rank-deficient design falls back to ridge") {
  std::mt19937_64 rng(4);
  std::vector<LabeledFeatures> data;
  for (int i = 0; i < 60; ++i) {
    auto f = testing::RandomFeatures(rng, 1.0);  // all multimodal columns zero
    data.push_back({f, 3.0 * static_cast<double>(f.char_count) - 2.0});
  }
  auto m = TrainHelpfulness(data, Category::kFriendliness);
  CHECK(m.ridge_fallback);
  CHECK(m.weights[0] == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("ols: planted weights match the normal-equations oracle") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> planted(kFeatureDimension);
  for (auto& w : planted) w = g(rng);
  std::vector<LabeledFeatures> data;
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 200; ++i) {
    auto f = testing::RandomFeatures(rng);
    auto v = FeatureVector(f);
    double t = 4.0;
    for (std::size_t j = 0; j < v.size(); ++j) t += planted[j] * v[j];
    data.push_back({f, t});
    x.push_back(v);
    y.push_back(t);
  }
  auto m = TrainHelpfulness(data, Category::kSpeech);
  auto beta = oracle::NormalEquations(x, y);
  CHECK(m.intercept == doctest::Approx(beta[0]).epsilon(1e-6));
  for (std::size_t j = 0; j < planted.size(); ++j) CHECK(m.weights[j] == doctest::Approx(beta[j + 1]).epsilon(1e-6));
  for (std::size_t i = 0; i < 10; ++i) {
    double dot = beta[0];
    for (std::size_t j = 0; j < x[i].size(); ++j) dot += beta[j + 1] * x[i][j];
    CHECK(ScoreHelpfulness(m, data[i].features) == doctest::Approx(dot).epsilon(1e-9));
  }
}

TEST_CASE("ols: residuals are orthogonal to every column") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0.0, 5.0);
  Eigen::MatrixXd x(300, 6);
  Eigen::VectorXd y(300);
  for (int i = 0; i < 300; ++i) {
    for (int j = 0; j < 6; ++j) x(i, j) = noise(rng) * (j + 1);
    y(i) = x.row(i).sum() + noise(rng);
  }
  auto fit = FitOls(x, y);
  Eigen::VectorXd r = (y.array() - fit.intercept).matrix() - x * fit.weights;
  CHECK(std::abs(r.sum()) < 1e-6 * r.norm() * std::sqrt(300.0));
  for (int j = 0; j < 6; ++j) CHECK(std::abs(r.dot(x.col(j))) < 1e-6 * r.norm() * x.col(j).norm());
}

TEST_CASE("score: zero weights and layout mismatch") {
  HelpfulnessModel m;
  m.weights.assign(kFeatureDimension, 0.0);
  m.intercept = 17.0;
  std::mt19937_64 rng(7);
  CHECK(ScoreHelpfulness(m, testing::RandomFeatures(rng)) == 17.0);
  m.layout_version = "helpfulness-features/0";
  try {
    ScoreHelpfulness(m, testing::RandomFeatures(rng));
    FAIL("expected version error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kVersion);
  }
  auto doc = HelpfulnessModelToJson(m);
  CHECK(HelpfulnessModelFromJson(doc).intercept == 17.0);
}

TEST_CASE("sentiment: tiny corpus and priors") {
  std::vector<LabeledText> corpus{{"great", Sentiment::kPositive}, {"bad", Sentiment::kNegative}};
  auto m = FitSentiment(corpus);
  CHECK(Classify(m, "great") == Sentiment::kPositive);
  CHECK(Classify(m, "bad") == Sentiment::kNegative);

  std::vector<LabeledText> skewed{{"good job", Sentiment::kPositive},
                                  {"nice work", Sentiment::kPositive},
                                  {"too quiet", Sentiment::kNegative}};
  CHECK(Classify(FitSentiment(skewed), "") == Sentiment::kPositive);
  std::vector<LabeledText> neg_major{{"good job", Sentiment::kPositive},
                                     {"too quiet", Sentiment::kNegative},
                                     {"too fast", Sentiment::kNegative}};
  CHECK(Classify(FitSentiment(neg_major), "") == Sentiment::kNegative);

  std::vector<LabeledText> one{{"a", Sentiment::kPositive}, {"b", Sentiment::kPositive}};
  try {
    FitSentiment(one);
    FAIL("expected training error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kTraining);
  }
}

TEST_CASE("sentiment: likelihoods are distributions; terms include bigrams") {
  CHECK(SentimentTerms("Great job, Bob!") ==
        std::vector<std::string>{"great", "job", "bob", "great job", "job bob"});
  auto m = FitSentiment(testing::SeparableCorpus(60, 3));
  for (std::size_t cls = 0; cls < 2; ++cls) {
    double total = 0.0;
    for (const auto& [term, s] : m.vocabulary) total += std::exp(s.log_likelihood[cls]);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("sentiment: separable corpus and duplication invariance") {
  auto corpus = testing::SeparableCorpus(200, 11);
  auto t = TrainSentiment(corpus, 1234);
  CHECK(t.train_size == 140);
  CHECK(t.test_size == 60);
  CHECK(t.held_out_accuracy >= 0.90);

  auto doubled = corpus;
  doubled.insert(doubled.end(), corpus.begin(), corpus.end());
  auto a = FitSentiment(corpus);
  auto b = FitSentiment(doubled);
  CHECK(std::abs(a.log_prior[0] - b.log_prior[0]) <= 1e-9);
  CHECK(std::abs(a.log_prior[1] - b.log_prior[1]) <= 1e-9);
  REQUIRE(a.vocabulary.size() == b.vocabulary.size());
  for (const auto& [term, s] : a.vocabulary)
    for (std::size_t cls = 0; cls < 2; ++cls)
      CHECK(std::abs(s.log_likelihood[cls] - b.vocabulary.at(term).log_likelihood[cls]) <= 1e-9);

  auto round = SentimentModelFromJson(SentimentModelToJson(t));
  CHECK(round.vocabulary.size() == t.model.vocabulary.size());
  for (const auto& d : corpus) CHECK(Classify(round, d.text) == Classify(t.model, d.text));
}

TEST_CASE("seeded permutation is deterministic and complete") {
  auto p = SeededPermutation(50, 99);
  CHECK(p == SeededPermutation(50, 99));
  CHECK(p != SeededPermutation(50, 100));
  auto sorted = p;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) CHECK(sorted[i] == i);
}

TEST_CASE("ranking: primary key and positive-first tie break") {
  ScoredComment a{MakeComment("A"), 30, Sentiment::kNegative};
  a.comment.id = "A";
  ScoredComment b{MakeComment("B"), 20, Sentiment::kPositive};
  b.comment.id = "B";
  auto r = RankComments({b, a}, 1);
  REQUIRE(r.top.size() == 1);
  CHECK(r.top[0].comment.id == "A");
  CHECK(r.rest[0].comment.id == "B");

  a.helpfulness = b.helpfulness = 25;
  auto tie = RankComments({a, b}, 5);
  CHECK(tie.top[0].comment.id == "B");
  CHECK(tie.top[1].comment.id == "A");
  CHECK(tie.rest.empty());
}

TEST_CASE("ranking: comparator is a strict total order on fuzzed sets") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    auto set = testing::RandomScoredComments(rng, 12);
    for (const auto& x : set) {
      CHECK_FALSE(RanksBefore(x, x));
      for (const auto& y : set) {
        if (&x != &y) CHECK(RanksBefore(x, y) != RanksBefore(y, x));
        for (const auto& z : set)
          if (RanksBefore(x, y) && RanksBefore(y, z)) CHECK(RanksBefore(x, z));
      }
    }
    auto ranked = RankComments(set, 3);
    auto scaled = set;
    for (auto& c : scaled) c.helpfulness *= 2.5;
    auto ranked_scaled = RankComments(scaled, 3);
    for (std::size_t i = 0; i < ranked.top.size(); ++i) CHECK(ranked.top[i].comment.id == ranked_scaled.top[i].comment.id);
    for (std::size_t i = 0; i < ranked.rest.size(); ++i) CHECK(ranked.rest[i].comment.id == ranked_scaled.rest[i].comment.id);
  }
}

TEST_CASE("training csv and artifact round trip") {
  std::string csv = "comment_id,video_id,text,category,timestamp,score,sentiment\n";
  std::mt19937_64 rng(8);
  for (int i = 0; i < 60; ++i) {
    const bool pos = i % 3 != 0;
    std::string text = pos ? "Great eye contact, keep smiling" : "you look away, too quiet";
    text += " item" + std::to_string(i);
    csv += "c" + std::to_string(i) + ",v1,\"" + text + "\",speech," + (i % 2 ? std::to_string(i * 0.5) : "") +
           "," + std::to_string(10 + static_cast<int>(rng() % 31)) + "," + (pos ? "positive" : "negative") + "\n";
  }
  auto rows = ParseTrainingCsv(csv);
  REQUIRE(rows.size() == 60);
  CHECK(rows[1].timestamp.has_value());
  CHECK_FALSE(rows[0].timestamp.has_value());
  auto artifacts = TrainModeration(rows, nullptr, 7);
  CHECK(artifacts.helpfulness.count(Category::kSpeech) == 1);
  REQUIRE(artifacts.sentiment.has_value());

  auto dir = std::filesystem::temp_directory_path() / "speakloop_moderation_test";
  std::filesystem::remove_all(dir);
  WriteModerationArtifacts(artifacts, dir);
  auto loaded = LoadModerationModels(dir);
  CHECK(loaded.helpfulness.at(Category::kSpeech).weights == artifacts.helpfulness.at(Category::kSpeech).weights);
  CHECK(loaded.sentiment.has_value());
  CHECK(std::filesystem::exists(dir / "metrics.json"));
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(ParseTrainingCsv("a,b\n1,2\n"), Error);
  CHECK_THROWS_AS(ParseTrainingCsv("comment_id,video_id,text,category,timestamp,score,sentiment\nc,v,t,posture,,1,\n"), Error);
}
