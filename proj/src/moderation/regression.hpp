#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "moderation/comment.hpp"
#include "moderation/features.hpp"

namespace speakloop::moderation {

inline constexpr double kRidgeLambda = 1e-6;

struct OlsFit {
  Eigen::VectorXd weights;
  double intercept = 0.0;
  std::optional<double> r_squared;  // undefined for a constant target
  bool ridge_fallback = false;
};

// Least squares with an unpenalized intercept, solved by column-pivoted QR
// on the centered design. A rank-deficient design falls back to ridge with
// kRidgeLambda on the centered normal matrix. Requires rows >= cols + 1.
OlsFit FitOls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

struct HelpfulnessModel {
  Category category = Category::kSpeech;
  std::vector<double> weights;
  double intercept = 0.0;
  std::string layout_version{kFeatureLayoutVersion};
  std::optional<double> r_squared;
  bool ridge_fallback = false;
  std::size_t training_examples = 0;
};

struct LabeledFeatures {
  CommentFeatures features;
  double score = 0.0;
};

HelpfulnessModel TrainHelpfulness(const std::vector<LabeledFeatures>& labeled, Category category);

// Throws kVersion when the model was trained on another feature layout.
double ScoreHelpfulness(const HelpfulnessModel& model, const CommentFeatures& features);
double ScoreHelpfulness(const HelpfulnessModel& model, const std::vector<double>& feature_vector,
                        std::string_view layout_version);

nlohmann::json HelpfulnessModelToJson(const HelpfulnessModel& model);
HelpfulnessModel HelpfulnessModelFromJson(const nlohmann::json& doc);

}  // namespace speakloop::moderation
