// One pass/fail line per acceptance criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "common/error.hpp"
#include "generators.hpp"
#include "media/features.hpp"
#include "moderation/features.hpp"
#include "moderation/ranking.hpp"
#include "moderation/regression.hpp"
#include "moderation/sentiment.hpp"
#include "oracles.hpp"
#include "stats/reliability.hpp"
#include "stats/tests.hpp"
#include "support.hpp"
#include "text/analytics.hpp"
#include "workflow/events.hpp"
#include "workflow_sim.hpp"

using namespace speakloop;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point since) { return std::chrono::duration<double>(Clock::now() - since).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void Report(int id, const char* name, const std::function<Outcome()>& body) {
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
  std::fflush(stdout);
}

std::string Fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

Outcome DspFidelity() {
  // pure tones checked against the zero-crossing oracle; harmonic tones
  // against their construction frequency
  std::size_t voiced = 0, within = 0;
  auto score = [&](const media::AudioTrack& audio, double truth) {
    for (const auto& v : media::PitchSeries(audio).values) {
      if (!v) continue;
      ++voiced;
      within += std::abs(*v - truth) <= 2.0;
    }
  };
  for (double f : {220.0, 330.0, 110.0, 147.0, 196.0, 262.0, 392.0, 440.0}) {
    auto tone = testing::Sine(f, 0.7, 2.0);
    score(tone, oracle::ZeroCrossingFrequency(tone.samples(), tone.sample_rate()));
  }
  for (double f0 : {120.0, 180.0, 240.0}) {
    std::vector<float> s(32000);
    for (std::size_t i = 0; i < s.size(); ++i) {
      double v = 0;
      for (int h = 1; h <= 4; ++h) v += 0.5 / h * std::sin(2 * std::numbers::pi * f0 * h * i / 16000.0);
      s[i] = static_cast<float>(v);
    }
    score(media::AudioTrack(std::move(s), 16000), f0);
  }
  const double share = voiced ? static_cast<double>(within) / static_cast<double>(voiced) : 0.0;

  auto loud = media::LoudnessSeries(testing::Sine(1000.0, 1.0, 2.0));
  double worst = 0;
  for (const auto& v : loud.values) worst = std::max(worst, std::abs(*v - (-3.0103)));

  auto speech = testing::Sine(180.0, 0.5, 30.0);
  const auto start = Clock::now();
  media::PitchSeries(speech);
  media::LoudnessSeries(speech);
  const double runtime = Seconds(start);
  return {share >= 0.95 && worst <= 0.05 && runtime < 1.0,
          Fmt("pitch within 2 Hz on %.4f of %zu voiced samples (need 0.95); full-scale sine max |dB+3.0103| %.2e "
              "(need 0.05); 30 s audio in %.3f s (need < 1)",
              share, voiced, worst, runtime)};
}

Outcome MovementOracleCheck() {
  std::mt19937_64 rng(2);
  int exact = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 64), h = 1 + static_cast<int>(rng() % 64);
    const int n = 2 + static_cast<int>(rng() % 99);
    const int tau = static_cast<int>(rng() % 20);
    std::vector<media::GrayFrame> frames;
    for (int k = 0; k < n; ++k) {
      media::GrayFrame f{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w * h))};
      for (auto& p : f.pixels) p = static_cast<std::uint8_t>(rng() % 256);
      frames.push_back(std::move(f));
    }
    const auto want = oracle::MovementOracle(frames, tau);
    const auto got = media::MovementSeries(media::FrameSequence(frames, 10.0), tau);
    bool same = got.size() == want.size();
    for (std::size_t i = 0; same && i < want.size(); ++i) same = got.values[i] && *got.values[i] == want[i];
    exact += same;
  }
  return {exact == 50, Fmt("%d/50 sequences equal the per-pixel oracle exactly", exact)};
}

Outcome TextOracles() {
  std::mt19937_64 rng(3);
  const std::vector<std::string> vocab{"um", "Uh,", "you", "know", "I", "mean", "like", "so", "the",
                                       "robot", "Robot!", "teach", "a", "kids", "'quote'", "well", "--", "café"};
  const std::set<std::string> lexicon{"um", "uh", "like", "so", "you know", "i mean"};
  const auto stop = text::DefaultStopwords();
  const text::FillerLexicon lex(std::vector<std::string>(lexicon.begin(), lexicon.end()));
  int agree = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = static_cast<int>(rng() % 120);
    text::TimedTranscript t;
    std::vector<std::string> raw;
    for (int i = 0; i < n; ++i) {
      raw.push_back(vocab[rng() % vocab.size()]);
      t.words.push_back({raw.back(), 0.25 * i, 0.25 * i + 0.2, 0.9});
    }
    bool ok = true;
    auto ratio = text::ComputeUniqueWordRatio(t);
    ok &= ratio.ratio == oracle::UniqueRatio(raw);
    auto freq = text::WordFrequencies(t, stop, 25);
    auto want_freq = oracle::Frequencies(raw, stop, 25);
    ok &= freq.size() == want_freq.size();
    for (std::size_t i = 0; ok && i < freq.size(); ++i)
      ok &= freq[i].word == want_freq[i].first && freq[i].count == want_freq[i].second;
    auto fill = text::DetectFillers(t, lex);
    auto want_fill = oracle::Fillers(raw, lexicon);
    ok &= fill.size() == want_fill.size();
    for (std::size_t i = 0; ok && i < fill.size(); ++i)
      ok &= fill[i].word == want_fill[i].first && fill[i].start == t.words[want_fill[i].second].start;
    agree += ok;
  }
  return {agree == 1000, Fmt("%d/1000 transcripts match the set, multiset and n-gram oracles exactly", agree)};
}

Outcome OlsRecovery() {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> planted(moderation::kFeatureDimension);
  for (auto& w : planted) w = g(rng);
  std::vector<moderation::LabeledFeatures> data;
  std::vector<std::vector<double>> x;
  std::vector<double> y;
  for (int i = 0; i < 500; ++i) {
    auto f = testing::RandomFeatures(rng);
    auto v = moderation::FeatureVector(f);
    double t = 2.5;
    for (std::size_t j = 0; j < v.size(); ++j) t += planted[j] * v[j];
    data.push_back({f, t});
    x.push_back(v);
    y.push_back(t);
  }
  const auto model = moderation::TrainHelpfulness(data, moderation::Category::kSpeech);
  const auto beta = oracle::NormalEquations(x, y);
  double worst = std::abs(model.intercept - beta[0]) / std::max(1.0, std::abs(beta[0]));
  for (std::size_t j = 0; j < planted.size(); ++j)
    worst = std::max(worst, std::abs(model.weights[j] - beta[j + 1]) / std::max(1.0, std::abs(beta[j + 1])));

  // residual orthogonality on noisy fits
  double worst_cos = 0;
  std::normal_distribution<double> noise(0.0, 3.0);
  for (int run = 0; run < 5; ++run) {
    Eigen::MatrixXd xm(500, static_cast<Eigen::Index>(planted.size()));
    Eigen::VectorXd yv(500);
    for (int i = 0; i < 500; ++i) {
      auto v = moderation::FeatureVector(testing::RandomFeatures(rng));
      double t = 1.0 + noise(rng);
      for (std::size_t j = 0; j < v.size(); ++j) {
        xm(i, static_cast<Eigen::Index>(j)) = v[j];
        t += planted[j] * v[j];
      }
      yv(i) = t;
    }
    auto fit = moderation::FitOls(xm, yv);
    Eigen::VectorXd r = (yv.array() - fit.intercept).matrix() - xm * fit.weights;
    worst_cos = std::max(worst_cos, std::abs(r.sum()) / (r.norm() * std::sqrt(500.0)));
    for (Eigen::Index j = 0; j < xm.cols(); ++j)
      if (xm.col(j).norm() > 0) worst_cos = std::max(worst_cos, std::abs(r.dot(xm.col(j))) / (r.norm() * xm.col(j).norm()));
  }
  return {worst <= 1e-6 && worst_cos <= 1e-6 && planted.size() == 35,
          Fmt("d=%zu n=500 max relative deviation from normal equations %.2e (need 1e-6); max residual/column "
              "cosine on noisy runs %.2e",
              planted.size(), worst, worst_cos)};
}

Outcome SentimentCheck() {
  const auto corpus = testing::SeparableCorpus(200, 5);
  const auto trained = moderation::TrainSentiment(corpus, 2016);
  auto doubled = corpus;
  doubled.insert(doubled.end(), corpus.begin(), corpus.end());
  const auto a = moderation::FitSentiment(corpus);
  const auto b = moderation::FitSentiment(doubled);
  double worst = std::max(std::abs(a.log_prior[0] - b.log_prior[0]), std::abs(a.log_prior[1] - b.log_prior[1]));
  bool same_vocab = a.vocabulary.size() == b.vocabulary.size();
  for (const auto& [term, s] : a.vocabulary) {
    auto it = b.vocabulary.find(term);
    if (it == b.vocabulary.end()) {
      same_vocab = false;
      continue;
    }
    for (std::size_t c = 0; c < 2; ++c) worst = std::max(worst, std::abs(s.log_likelihood[c] - it->second.log_likelihood[c]));
  }
  return {trained.held_out_accuracy >= 0.90 && trained.train_size == 140 && worst <= 1e-9 && same_vocab,
          Fmt("held-out accuracy %.4f on %zu/%zu split (need 0.90); duplicated-corpus max |delta log p| %.2e "
              "(need 1e-9)",
              trained.held_out_accuracy, trained.train_size, trained.test_size, worst)};
}

Outcome RankingProperties() {
  std::mt19937_64 rng(6);
  std::size_t bad = 0, tie_pairs = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    auto set = testing::RandomScoredComments(rng, 1 + rng() % 10);
    for (const auto& x : set) {
      bad += moderation::RanksBefore(x, x);
      for (const auto& y : set) {
        if (&x != &y) bad += moderation::RanksBefore(x, y) == moderation::RanksBefore(y, x);
        for (const auto& z : set)
          if (moderation::RanksBefore(x, y) && moderation::RanksBefore(y, z)) bad += !moderation::RanksBefore(x, z);
      }
    }
    const std::size_t k = rng() % 4;
    auto ranked = moderation::RankComments(set, k);
    auto shuffled = set;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto again = moderation::RankComments(shuffled, k);
    auto key = [](const moderation::ScoredComment& c) {
      return std::make_tuple(-c.helpfulness, c.sentiment == moderation::Sentiment::kPositive ? 0 : 1,
                             c.comment.created_at, c.comment.id);
    };
    auto expect = set;
    std::sort(expect.begin(), expect.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    std::vector<std::string> got, got_shuffled;
    for (const auto* part : {&ranked.top, &ranked.rest})
      for (const auto& c : *part) got.push_back(c.comment.id);
    for (const auto* part : {&again.top, &again.rest})
      for (const auto& c : *part) got_shuffled.push_back(c.comment.id);
    bad += ranked.top.size() != std::min(k, set.size());
    bad += got != got_shuffled;
    for (std::size_t i = 0; i < expect.size(); ++i) bad += got[i] != expect[i].comment.id;
    for (std::size_t i = 1; i < expect.size(); ++i) {
      if (expect[i - 1].helpfulness != expect[i].helpfulness) continue;
      if (expect[i - 1].sentiment == expect[i].sentiment) continue;
      ++tie_pairs;
      bad += expect[i - 1].sentiment != moderation::Sentiment::kPositive;
    }
  }
  return {bad == 0 && tie_pairs > 0,
          Fmt("10000 fuzzed sets, %zu violations of antisymmetry/transitivity/permutation/oracle order; %zu "
              "mixed-sentiment ties checked positive-first",
              bad, tie_pairs)};
}

Outcome StatisticsOracles() {
  std::mt19937_64 rng(7);
  double worst_alpha = 0;
  int alpha_cases = 0;
  while (alpha_cases < 200) {
    const std::size_t raters = 2 + rng() % 5, items = 2 + rng() % 24;
    const double missing = std::uniform_real_distribution<double>(0.0, 0.4)(rng);
    std::vector<std::vector<int>> cells(raters, std::vector<int>(items, -1));
    std::vector<std::string> rn(raters), in(items);
    for (std::size_t r = 0; r < raters; ++r) rn[r] = "r" + std::to_string(r);
    for (std::size_t i = 0; i < items; ++i) in[i] = "i" + std::to_string(i);
    stats::SparseRatingMatrix m(rn, in);
    for (std::size_t r = 0; r < raters; ++r)
      for (std::size_t i = 0; i < items; ++i)
        if (std::uniform_real_distribution<double>(0, 1)(rng) >= missing) {
          cells[r][i] = 1 + static_cast<int>(rng() % 5);
          m.Set(r, i, cells[r][i]);
        }
    double got;
    try {
      got = stats::KrippendorffAlphaOrdinal(m);
    } catch (const Error&) {
      continue;  // nothing pairable; covered by the unit tests
    }
    const double want = oracle::KrippendorffOrdinalBruteForce(cells);
    worst_alpha = std::max(worst_alpha, std::abs(got - want));
    ++alpha_cases;
  }
  stats::SparseRatingMatrix perfect({"a", "b", "c"}, {"x", "y", "z"});
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t i = 0; i < 3; ++i) perfect.Set(r, i, static_cast<int>(i) + 2);
  const double one = stats::KrippendorffAlphaOrdinal(perfect);

  double worst_d = 0, worst_p = 0, worst_t = 0;
  int cliff_mismatch = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> a(2 + rng() % 30), b(2 + rng() % 30);
    for (auto& v : a) v = static_cast<double>(rng() % 9) - 4;
    for (auto& v : b) v = static_cast<double>(rng() % 9) - 3;
    try {
      worst_d = std::max(worst_d, std::abs(stats::CohensD(a, b) - oracle::CohensD(a, b)));
    } catch (const Error&) {
    }
    cliff_mismatch += stats::CliffsDelta(a, b) != oracle::CliffsDelta(a, b);

    std::vector<stats::PairedSample> paired(a.size());
    std::vector<double> d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      paired[i] = {a[i], a[i] + static_cast<double>(rng() % 5) - 1.5};
      d[i] = paired[i].post - paired[i].pre;
    }
    double mean = 0, ss = 0;
    for (double x : d) mean += x;
    mean /= static_cast<double>(d.size());
    for (double x : d) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(d.size() - 1));
    if (sd == 0) continue;
    const auto t = stats::PairedTTest(paired);
    const double t_closed = mean / (sd / std::sqrt(static_cast<double>(d.size())));
    worst_t = std::max(worst_t, std::abs(t.t - t_closed) / std::max(1.0, std::abs(t_closed)));
    worst_p = std::max(worst_p, std::abs(t.p_two_tailed - oracle::TwoTailedPQuadrature(t_closed, t.df)));
  }
  const bool pass = worst_alpha <= 1e-9 && one == 1.0 && worst_d <= 1e-12 && cliff_mismatch == 0 &&
                    worst_t <= 1e-12 && worst_p <= 1e-6;
  return {pass, Fmt("alpha max |diff| %.2e over %d matrices (need 1e-9), perfect agreement %.1f; Cohen's d max "
                    "|diff| %.2e (need 1e-12); Cliff's delta mismatches %d; t max rel diff %.2e; p vs quadrature "
                    "max |diff| %.2e (need 1e-6)",
                    worst_alpha, alpha_cases, one, worst_d, cliff_mismatch, worst_t, worst_p)};
}

Outcome WorkflowProperties() {
  sim::WorkflowSim s(2024);
  std::mt19937_64 rng(8);
  std::set<int> crash_steps;
  while (crash_steps.size() < 20) crash_steps.insert(static_cast<int>(rng() % 10000));
  s.hash_steps = crash_steps;
  const auto start = Clock::now();
  s.Run(10000);
  const double runtime = Seconds(start);

  // A crash lands somewhere inside the write that follows a recorded point.
  const auto& events = s.machine().events();
  std::vector<std::size_t> offsets{0};
  std::string log;
  for (const auto& e : events) {
    log += workflow::EncodeEventLine(e);
    offsets.push_back(log.size());
  }
  int replays = 0, matched = 0;
  for (const auto& [count, hash] : s.HashByEventCount()) {
    const std::size_t lo = offsets[count];
    const std::size_t hi = count < events.size() ? offsets[count + 1] : lo + 1;
    const std::size_t cut = std::min(log.size(), lo + rng() % (hi - lo));
    const auto decoded = workflow::DecodeEventLog(std::string_view(log).substr(0, cut));
    const auto replayed = workflow::Workflow::Replay(s.machine().config(), decoded.events);
    ++replays;
    matched += decoded.events.size() == count && replayed.StateHash() == hash;
  }
  const bool pass = s.violations.empty() && replays == 20 && matched == 20;
  return {pass, Fmt("10000 steps, %zu oracle checks, %zu violations%s%s, %zu gate rejections, %.2f s; %d/%d "
                    "crash-point replays reproduce the live state hash",
                    s.checks, s.violations.size(), s.violations.empty() ? "" : ": ",
                    s.violations.empty() ? "" : s.violations.front().c_str(), s.gate_rejections, runtime, matched,
                    replays)};
}

Outcome EndToEndDeterminism(const std::string& cli) {
  const fs::path fixtures = SPEAKLOOP_FIXTURE_DIR;
  const fs::path sub = fixtures / "submission";
  const fs::path out = fs::temp_directory_path() / ("speakloop-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(out);
  std::vector<std::string> bundles;
  const auto start = Clock::now();
  for (int run = 0; run < 5; ++run) {
    const fs::path target = out / ("bundle" + std::to_string(run) + ".json");
    const std::string cmd = "'" + cli + "' analyze --wav '" + (sub / "audio.wav").string() + "' --frames '" +
                            (sub / "frames.tar").string() + "' --transcript '" + (sub / "transcript.json").string() +
                            "' --smile '" + (sub / "smile.txt").string() + "' --feedback '" +
                            (sub / "feedback.json").string() + "' --models '" + (fixtures / "models").string() +
                            "' --out '" + target.string() + "'";
    if (std::system(cmd.c_str()) != 0) return {false, "analyze exited nonzero"};
    std::ifstream in(target, std::ios::binary);
    bundles.emplace_back(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  const double runtime = Seconds(start);
  fs::remove_all(out);
  const bool identical = std::all_of(bundles.begin(), bundles.end(), [&](const auto& b) { return b == bundles[0]; });
  const auto doc = nlohmann::json::parse(bundles[0]);
  std::size_t comments = doc["ranked_comments"]["top"].size() + doc["ranked_comments"]["rest"].size();
  return {identical && runtime < 10.0 && comments == 6,
          Fmt("5 runs %s (%zu bytes, %zu comments, %zu movement samples), total %.2f s (need < 10)",
              identical ? "byte-identical" : "DIFFER", bundles[0].size(), comments,
              doc["series"]["movement"]["values"].size(), runtime)};
}

}  // namespace

int main() {
  Report(1, "dsp fidelity", DspFidelity);
  Report(2, "movement oracle", MovementOracleCheck);
  Report(3, "text analytics oracle", TextOracles);
  Report(4, "ols", OlsRecovery);
  Report(5, "sentiment", SentimentCheck);
  Report(6, "ranking", RankingProperties);
  Report(7, "statistics oracles", StatisticsOracles);
  Report(8, "workflow properties", WorkflowProperties);
  Report(9, "end-to-end determinism", [] { return EndToEndDeterminism(SPEAKLOOP_CLI); });
  std::printf("%d of 9 criteria failed\n", failures);
  return failures;
}
