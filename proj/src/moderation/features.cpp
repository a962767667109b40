#include "moderation/features.hpp"

#include <cctype>

#include "common/error.hpp"
#include "common/util.hpp"

namespace speakloop::moderation {

const std::vector<std::string>& FeatureNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n{"char_count", "has_punctuation", "has_capitals",
                               "pos_noun",   "pos_verb",        "pos_adjective",
                               "pos_adverb", "pos_other"};
    for (media::Signal s : media::kAllSignals) {
      for (double w : kWindowWidths) {
        std::string base = std::string(media::SignalName(s)) + "_" + std::to_string(static_cast<int>(w)) + "s";
        n.push_back(base + "_mean");
        n.push_back(base + "_sd");
      }
    }
    for (double w : kWindowWidths) n.push_back("missing_" + std::to_string(static_cast<int>(w)) + "s");
    return n;
  }();
  return names;
}

CommentFeatures ExtractFeatures(const Comment& comment, const SeriesMap& series) {
  for (media::Signal s : media::kAllSignals)
    if (!series.contains(s))
      Fail(ErrorKind::kInvalidArgument, std::string("features: missing ") + media::SignalName(s) + " series");

  CommentFeatures f;
  f.char_count = Utf8Length(comment.text);
  for (char c : comment.text) {
    auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::ispunct(u)) f.has_punctuation = true;
    if (u < 0x80 && std::isupper(u)) f.has_capitals = true;
  }
  f.pos_counts = CountTags(comment.text);

  if (!comment.video_timestamp) return f;
  for (std::size_t si = 0; si < kSignalCount; ++si) {
    const auto& s = series.at(media::kAllSignals[si]);
    for (std::size_t wi = 0; wi < kWindowCount; ++wi) {
      auto stats = media::SampleWindow(s, *comment.video_timestamp, kWindowWidths[wi]);
      f.multimodal[si][wi] = {stats.mean, stats.sd, stats.missing};
    }
  }
  return f;
}

std::vector<double> FeatureVector(const CommentFeatures& f) {
  std::vector<double> v;
  v.reserve(kFeatureDimension);
  v.push_back(static_cast<double>(f.char_count));
  v.push_back(f.has_punctuation ? 1.0 : 0.0);
  v.push_back(f.has_capitals ? 1.0 : 0.0);
  for (auto c : f.pos_counts) v.push_back(static_cast<double>(c));
  std::array<bool, kWindowCount> any_missing{};
  for (std::size_t si = 0; si < kSignalCount; ++si) {
    for (std::size_t wi = 0; wi < kWindowCount; ++wi) {
      const auto& w = f.multimodal[si][wi];
      v.push_back(w.missing ? 0.0 : w.mean);
      v.push_back(w.missing ? 0.0 : w.sd);
      any_missing[wi] = any_missing[wi] || w.missing;
    }
  }
  for (bool m : any_missing) v.push_back(m ? 1.0 : 0.0);
  return v;
}

}  // namespace speakloop::moderation
