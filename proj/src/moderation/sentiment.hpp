#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "moderation/comment.hpp"

namespace speakloop::moderation {

// Lowercased runs of ASCII letters/digits, followed by the adjacent-pair
// bigrams joined with a single space.
std::vector<std::string> SentimentTerms(std::string_view text);

struct LabeledText {
  std::string text;
  Sentiment label = Sentiment::kPositive;
};

struct TermStats {
  std::size_t document_frequency = 0;
  double idf = 0.0;
  // Indexed by Sentiment.
  std::array<double, 2> log_likelihood{};
};

// Multinomial Naive Bayes over tf-idf masses (tf = raw count,
// idf = ln((1 + N) / (1 + df)) + 1), Laplace smoothing alpha = 1.
struct SentimentModel {
  std::map<std::string, TermStats> vocabulary;
  std::array<double, 2> log_prior{};
  double alpha = 1.0;
  std::size_t training_documents = 0;
};

// Training documents are the distinct (text, label) pairs of the input, in
// first-occurrence order; repeated copies of a labeled text add nothing.
SentimentModel FitSentiment(std::span<const LabeledText> training);

struct SentimentScore {
  Sentiment label = Sentiment::kPositive;
  std::array<double, 2> log_posterior{};  // unnormalized
};

// Ties (including an all-unknown text under equal priors) go to positive.
SentimentScore ScoreSentiment(const SentimentModel& model, std::string_view text);
inline Sentiment Classify(const SentimentModel& model, std::string_view text) {
  return ScoreSentiment(model, text).label;
}

struct SentimentTraining {
  SentimentModel model;
  double held_out_accuracy = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::uint64_t split_seed = 0;
};

// Deduplicates, shuffles with a seeded Fisher-Yates over mt19937_64 and
// keeps round(0.7 n) documents for training. Throws kTraining when the
// training split lacks a class.
SentimentTraining TrainSentiment(std::span<const LabeledText> corpus, std::uint64_t split_seed);

// Fisher-Yates permutation of [0, n) that is identical on every platform.
std::vector<std::size_t> SeededPermutation(std::size_t n, std::uint64_t seed);

nlohmann::json SentimentModelToJson(const SentimentTraining& training);
SentimentModel SentimentModelFromJson(const nlohmann::json& doc);

}  // namespace speakloop::moderation
