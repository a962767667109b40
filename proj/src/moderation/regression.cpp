#include "moderation/regression.hpp"

#include <cmath>

#include "common/error.hpp"

namespace speakloop::moderation {

namespace {
constexpr int kModelSchemaVersion = 1;
}

OlsFit FitOls(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const auto n = x.rows();
  const auto d = x.cols();
  if (y.size() != n) Fail(ErrorKind::kInvalidArgument, "ols: target length differs from design rows");
  if (n < d + 1)
    Fail(ErrorKind::kTraining, "ols: need at least " + std::to_string(d + 1) + " examples, got " +
                                   std::to_string(n));

  const Eigen::RowVectorXd x_mean = x.colwise().mean();
  const double y_mean = y.mean();
  const Eigen::MatrixXd xc = x.rowwise() - x_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;

  OlsFit fit;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(xc);
  qr.setThreshold(1e-10);
  if (qr.rank() == d) {
    fit.weights = qr.solve(yc);
  } else {
    Eigen::MatrixXd normal = xc.transpose() * xc;
    normal.diagonal().array() += kRidgeLambda;
    fit.weights = normal.ldlt().solve(xc.transpose() * yc);
    fit.ridge_fallback = true;
  }
  fit.intercept = y_mean - x_mean.dot(fit.weights);

  const double ss_tot = yc.squaredNorm();
  if (ss_tot > 0.0) {
    const Eigen::VectorXd residual = yc - xc * fit.weights;
    fit.r_squared = 1.0 - residual.squaredNorm() / ss_tot;
  }
  return fit;
}

HelpfulnessModel TrainHelpfulness(const std::vector<LabeledFeatures>& labeled, Category category) {
  const auto n = static_cast<Eigen::Index>(labeled.size());
  const auto d = static_cast<Eigen::Index>(kFeatureDimension);
  if (n < d + 1)
    Fail(ErrorKind::kTraining, std::string("helpfulness[") + CategoryName(category) + "]: need at least " +
                                   std::to_string(d + 1) + " examples, got " + std::to_string(n));
  Eigen::MatrixXd x(n, d);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    auto v = FeatureVector(labeled[static_cast<std::size_t>(i)].features);
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = v[static_cast<std::size_t>(j)];
    y(i) = labeled[static_cast<std::size_t>(i)].score;
  }
  OlsFit fit = FitOls(x, y);
  HelpfulnessModel m;
  m.category = category;
  m.weights.assign(fit.weights.data(), fit.weights.data() + fit.weights.size());
  m.intercept = fit.intercept;
  m.r_squared = fit.r_squared;
  m.ridge_fallback = fit.ridge_fallback;
  m.training_examples = labeled.size();
  return m;
}

double ScoreHelpfulness(const HelpfulnessModel& model, const std::vector<double>& v,
                        std::string_view layout_version) {
  if (model.layout_version != layout_version)
    Fail(ErrorKind::kVersion, "helpfulness: model layout " + model.layout_version +
                                  " does not match features " + std::string(layout_version));
  if (model.weights.size() != v.size())
    Fail(ErrorKind::kVersion, "helpfulness: weight count does not match feature vector");
  double s = model.intercept;
  for (std::size_t i = 0; i < v.size(); ++i) s += model.weights[i] * v[i];
  return s;
}

double ScoreHelpfulness(const HelpfulnessModel& model, const CommentFeatures& features) {
  return ScoreHelpfulness(model, FeatureVector(features), kFeatureLayoutVersion);
}

nlohmann::json HelpfulnessModelToJson(const HelpfulnessModel& m) {
  nlohmann::json training = {{"examples", m.training_examples}, {"ridge_fallback", m.ridge_fallback}};
  training["r_squared"] = m.r_squared ? nlohmann::json(*m.r_squared) : nlohmann::json(nullptr);
  return {{"schema_version", kModelSchemaVersion},
          {"kind", "helpfulness"},
          {"category", CategoryName(m.category)},
          {"layout_version", m.layout_version},
          {"feature_names", FeatureNames()},
          {"weights", m.weights},
          {"intercept", m.intercept},
          {"training", training}};
}

HelpfulnessModel HelpfulnessModelFromJson(const nlohmann::json& doc) {
  try {
    if (doc.at("schema_version").get<int>() != kModelSchemaVersion || doc.at("kind") != "helpfulness")
      Fail(ErrorKind::kVersion, "helpfulness model: unsupported document");
    HelpfulnessModel m;
    auto cat = ParseCategory(doc.at("category").get<std::string>());
    if (!cat) Fail(ErrorKind::kFormat, "helpfulness model: unknown category");
    m.category = *cat;
    m.layout_version = doc.at("layout_version").get<std::string>();
    m.weights = doc.at("weights").get<std::vector<double>>();
    m.intercept = doc.at("intercept").get<double>();
    const auto& t = doc.at("training");
    m.training_examples = t.at("examples").get<std::size_t>();
    m.ridge_fallback = t.at("ridge_fallback").get<bool>();
    if (!t.at("r_squared").is_null()) m.r_squared = t.at("r_squared").get<double>();
    if (m.layout_version == kFeatureLayoutVersion && m.weights.size() != kFeatureDimension)
      Fail(ErrorKind::kVersion, "helpfulness model: weight vector does not match its layout");
    return m;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorKind::kFormat, std::string("helpfulness model: ") + e.what());
  }
}

}  // namespace speakloop::moderation
