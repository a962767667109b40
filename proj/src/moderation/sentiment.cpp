#include "moderation/sentiment.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <cmath>
#include <random>
#include <set>
#include <unordered_map>

#include "common/error.hpp"

namespace speakloop::moderation {

namespace {

constexpr int kModelSchemaVersion = 1;

std::size_t Index(Sentiment s) { return s == Sentiment::kPositive ? 0 : 1; }

std::map<std::string, double> TermCounts(std::string_view text) {
  std::map<std::string, double> counts;
  for (auto& t : SentimentTerms(text)) counts[t] += 1.0;
  return counts;
}

}  // namespace

std::vector<std::string> SentimentTerms(std::string_view text) {
  std::vector<std::string> unigrams;
  std::string cur;
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else if (!cur.empty()) {
      unigrams.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) unigrams.push_back(std::move(cur));
  std::vector<std::string> terms = unigrams;
  for (std::size_t i = 0; i + 1 < unigrams.size(); ++i) terms.push_back(unigrams[i] + " " + unigrams[i + 1]);
  return terms;
}

SentimentModel FitSentiment(std::span<const LabeledText> training) {
  std::vector<const LabeledText*> docs;
  std::set<std::pair<std::string, Sentiment>> seen;
  for (const auto& d : training)
    if (seen.emplace(d.text, d.label).second) docs.push_back(&d);

  std::array<std::size_t, 2> class_docs{};
  for (const auto* d : docs) ++class_docs[Index(d->label)];
  if (class_docs[0] == 0 || class_docs[1] == 0)
    Fail(ErrorKind::kTraining, "sentiment: training data must contain both classes");

  SentimentModel model;
  model.training_documents = docs.size();
  const double n = static_cast<double>(docs.size());

  std::vector<std::map<std::string, double>> counts;
  counts.reserve(docs.size());
  for (const auto* d : docs) {
    counts.push_back(TermCounts(d->text));
    for (const auto& [term, c] : counts.back()) ++model.vocabulary[term].document_frequency;
  }
  for (auto& [term, stats] : model.vocabulary)
    stats.idf = std::log((1.0 + n) / (1.0 + static_cast<double>(stats.document_frequency))) + 1.0;

  std::unordered_map<std::string, std::array<double, 2>> mass;
  std::array<double, 2> total{};
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const std::size_t cls = Index(docs[i]->label);
    for (const auto& [term, c] : counts[i]) {
      const double m = c * model.vocabulary[term].idf;
      mass[term][cls] += m;
      total[cls] += m;
    }
  }
  const double v = static_cast<double>(model.vocabulary.size());
  for (auto& [term, stats] : model.vocabulary) {
    const auto& tm = mass[term];
    for (std::size_t cls = 0; cls < 2; ++cls)
      stats.log_likelihood[cls] = std::log((tm[cls] + model.alpha) / (total[cls] + model.alpha * v));
  }
  for (std::size_t cls = 0; cls < 2; ++cls)
    model.log_prior[cls] = std::log(static_cast<double>(class_docs[cls]) / n);
  return model;
}

SentimentScore ScoreSentiment(const SentimentModel& model, std::string_view text) {
  SentimentScore score;
  score.log_posterior = model.log_prior;
  for (const auto& [term, c] : TermCounts(text)) {
    auto it = model.vocabulary.find(term);
    if (it == model.vocabulary.end()) continue;
    const double w = c * it->second.idf;
    for (std::size_t cls = 0; cls < 2; ++cls) score.log_posterior[cls] += w * it->second.log_likelihood[cls];
  }
  score.label = score.log_posterior[1] > score.log_posterior[0] ? Sentiment::kNegative : Sentiment::kPositive;
  return score;
}

std::vector<std::size_t> SeededPermutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    // unbiased draw in [0, i) by rejection
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do r = rng();
    while (r >= limit);
    std::swap(idx[i - 1], idx[static_cast<std::size_t>(r % bound)]);
  }
  return idx;
}

SentimentTraining TrainSentiment(std::span<const LabeledText> corpus, std::uint64_t split_seed) {
  std::vector<LabeledText> docs;
  std::set<std::pair<std::string, Sentiment>> seen;
  for (const auto& d : corpus)
    if (seen.emplace(d.text, d.label).second) docs.push_back(d);
  if (docs.size() < 2) Fail(ErrorKind::kTraining, "sentiment: need at least two distinct documents");

  const auto perm = SeededPermutation(docs.size(), split_seed);
  std::size_t n_train = (7 * docs.size() + 5) / 10;
  n_train = std::clamp<std::size_t>(n_train, 1, docs.size() - 1);
  std::vector<LabeledText> train, test;
  for (std::size_t i = 0; i < docs.size(); ++i) (i < n_train ? train : test).push_back(docs[perm[i]]);

  SentimentTraining out;
  out.model = FitSentiment(train);
  out.train_size = train.size();
  out.test_size = test.size();
  out.split_seed = split_seed;
  std::size_t correct = 0;
  for (const auto& d : test) correct += Classify(out.model, d.text) == d.label;
  out.held_out_accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
  return out;
}

nlohmann::json SentimentModelToJson(const SentimentTraining& t) {
  nlohmann::json vocab = nlohmann::json::array();
  for (const auto& [term, s] : t.model.vocabulary)
    vocab.push_back({{"term", term}, {"df", s.document_frequency}, {"idf", s.idf},
                     {"log_likelihood", {{"positive", s.log_likelihood[0]}, {"negative", s.log_likelihood[1]}}}});
  return {{"schema_version", kModelSchemaVersion},
          {"kind", "sentiment"},
          {"alpha", t.model.alpha},
          {"log_prior", {{"positive", t.model.log_prior[0]}, {"negative", t.model.log_prior[1]}}},
          {"vocabulary", std::move(vocab)},
          {"training",
           {{"documents", t.model.training_documents},
            {"train_size", t.train_size},
            {"test_size", t.test_size},
            {"split_seed", t.split_seed},
            {"held_out_accuracy", t.held_out_accuracy}}}};
}

SentimentModel SentimentModelFromJson(const nlohmann::json& doc) {
  try {
    if (doc.at("schema_version").get<int>() != kModelSchemaVersion || doc.at("kind") != "sentiment")
      Fail(ErrorKind::kVersion, "sentiment model: unsupported document");
    SentimentModel m;
    m.alpha = doc.at("alpha").get<double>();
    m.log_prior = {doc.at("log_prior").at("positive").get<double>(),
                   doc.at("log_prior").at("negative").get<double>()};
    m.training_documents = doc.at("training").at("documents").get<std::size_t>();
    for (const auto& e : doc.at("vocabulary")) {
      TermStats s;
      s.document_frequency = e.at("df").get<std::size_t>();
      s.idf = e.at("idf").get<double>();
      s.log_likelihood = {e.at("log_likelihood").at("positive").get<double>(),
                          e.at("log_likelihood").at("negative").get<double>()};
      m.vocabulary.emplace(e.at("term").get<std::string>(), s);
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kFormat, std::string("sentiment model: ") + e.what());
  }
}

}  // namespace speakloop::moderation
