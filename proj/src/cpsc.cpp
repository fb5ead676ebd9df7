#include "icpclean/cpsc.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace icpclean::cpsc {

void CpscConfig::validate() const {
  if (delta < 0.0) throw std::invalid_argument("delta must be >= 0");
  if (temperature <= 0.0) throw std::invalid_argument("temperature must be > 0");
  if (variance_floor <= 0.0) throw std::invalid_argument("variance_floor must be > 0");
}

CpscModel fit(const Dataset& train, const CpscConfig& config) {
  config.validate();
  train.validate();

  const Eigen::Index n = train.n();
  const Eigen::Index d = train.dim();
  const int m = train.n_classes();
  if (m < 2) throw std::invalid_argument("cpsc fit needs at least two classes");
  if (n <= m)
    throw std::invalid_argument("cpsc fit needs n > M (pooled variance divides by n - M)");

  const Eigen::VectorXi counts = train.class_counts();
  for (int c = 0; c < m; ++c) {
    if (counts[c] == 0)
      throw std::invalid_argument("class '" + train.label_space.name_of(c) +
                                  "' has no samples; priors of absent classes are undefined");
  }

  // Class centroids and overall centroid, fixed left-to-right accumulation.
  Eigen::MatrixXd class_sums = Eigen::MatrixXd::Zero(m, d);
  Eigen::VectorXd overall_sum = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    class_sums.row(train.labels[i]) += train.features.row(i);
    overall_sum += train.features.row(i).transpose();
  }
  Eigen::MatrixXd centroids(m, d);
  for (int c = 0; c < m; ++c) centroids.row(c) = class_sums.row(c) / static_cast<double>(counts[c]);
  const Eigen::VectorXd overall = overall_sum / static_cast<double>(n);

  // Pooled per-feature variance over class-centered residuals, divisor n - M.
  Eigen::VectorXd variance = Eigen::VectorXd::Zero(d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd residual =
        train.features.row(i).transpose() - centroids.row(train.labels[i]).transpose();
    variance += residual.cwiseProduct(residual);
  }
  variance /= static_cast<double>(n - m);
  variance = variance.cwiseMax(config.variance_floor);
  const Eigen::VectorXd scale = variance.cwiseSqrt();

  // Standardized contrasts, soft threshold, recentered centroids.
  Eigen::MatrixXd shrunken(m, d);
  for (int c = 0; c < m; ++c) {
    const Eigen::VectorXd contrast =
        (centroids.row(c).transpose() - overall).cwiseQuotient(scale);
    const Eigen::VectorXd soft =
        contrast.array().sign() * (contrast.array().abs() - config.delta).max(0.0);
    shrunken.row(c) = (overall + scale.cwiseProduct(soft)).transpose();
  }

  Eigen::VectorXd log_priors(m);
  for (int c = 0; c < m; ++c)
    log_priors[c] = std::log(static_cast<double>(counts[c]) / static_cast<double>(n));

  return CpscModel{overall, std::move(shrunken), scale, std::move(log_priors),
                   train.label_space, config};
}

Eigen::VectorXd discriminatory_scores(const CpscModel& model,
                                      const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.dim())
    throw std::invalid_argument("feature vector length does not match model dimensionality");
  const int m = model.n_classes();
  Eigen::VectorXd scores(m);
  for (int c = 0; c < m; ++c) {
    const Eigen::VectorXd z =
        (x - model.shrunken_centroids.row(c).transpose()).cwiseQuotient(model.pooled_scale);
    scores[c] = model.log_priors[c] - 0.5 * z.squaredNorm();
  }
  return scores;
}

namespace {

Eigen::VectorXd softmax_scaled(const Eigen::VectorXd& scores, double temperature) {
  const Eigen::VectorXd z = scores / temperature;
  const Eigen::VectorXd shifted = z.array() - z.maxCoeff();
  Eigen::VectorXd p = shifted.array().exp();
  p /= p.sum();
  return p;
}

}  // namespace

Eigen::VectorXd predict_proba(const CpscModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return softmax_scaled(discriminatory_scores(model, x), model.config.temperature);
}

Eigen::MatrixXd predict_proba_batch(const CpscModel& model, const Eigen::MatrixXd& X) {
  if (X.cols() != model.dim())
    throw std::invalid_argument("feature matrix width does not match model dimensionality");
  Eigen::MatrixXd out(X.rows(), model.n_classes());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    out.row(i) = predict_proba(model, X.row(i).transpose()).transpose();
  return out;
}

double nonconformity_from_proba(const Eigen::Ref<const Eigen::VectorXd>& proba, int label) {
  const int m = static_cast<int>(proba.size());
  if (m < 2) throw std::invalid_argument("nonconformity needs at least two classes");
  if (label < 0 || label >= m) throw std::invalid_argument("label id out of range");
  double best_other = 0.0;
  for (int c = 0; c < m; ++c)
    if (c != label && proba[c] > best_other) best_other = proba[c];
  return 0.5 - (proba[label] - best_other) / 2.0;
}

double nonconformity(const CpscModel& model, const Eigen::Ref<const Eigen::VectorXd>& x,
                     int label) {
  return nonconformity_from_proba(predict_proba(model, x), label);
}

nlohmann::json to_json(const CpscModel& model) {
  nlohmann::json doc;
  doc["classes"] = model.label_space.classes();
  doc["overall_centroid"] = std::vector<double>(model.overall_centroid.begin(),
                                                model.overall_centroid.end());
  doc["pooled_scale"] = std::vector<double>(model.pooled_scale.begin(), model.pooled_scale.end());
  doc["log_priors"] = std::vector<double>(model.log_priors.begin(), model.log_priors.end());
  auto rows = nlohmann::json::array();
  for (int c = 0; c < model.n_classes(); ++c) {
    rows.push_back(std::vector<double>(model.shrunken_centroids.row(c).begin(),
                                       model.shrunken_centroids.row(c).end()));
  }
  doc["shrunken_centroids"] = std::move(rows);
  doc["config"] = {{"delta", model.config.delta},
                   {"temperature", model.config.temperature},
                   {"variance_floor", model.config.variance_floor}};
  return doc;
}

CpscModel from_json(const nlohmann::json& doc) {
  CpscModel model;
  model.label_space = LabelSpace(doc.at("classes").get<std::vector<std::string>>());
  const auto overall = doc.at("overall_centroid").get<std::vector<double>>();
  const auto scale = doc.at("pooled_scale").get<std::vector<double>>();
  const auto priors = doc.at("log_priors").get<std::vector<double>>();
  model.overall_centroid = Eigen::Map<const Eigen::VectorXd>(overall.data(),
                                                             static_cast<Eigen::Index>(overall.size()));
  model.pooled_scale = Eigen::Map<const Eigen::VectorXd>(scale.data(),
                                                         static_cast<Eigen::Index>(scale.size()));
  model.log_priors = Eigen::Map<const Eigen::VectorXd>(priors.data(),
                                                       static_cast<Eigen::Index>(priors.size()));
  const auto& rows = doc.at("shrunken_centroids");
  model.shrunken_centroids.resize(static_cast<Eigen::Index>(rows.size()),
                                  model.overall_centroid.size());
  for (Eigen::Index c = 0; c < model.shrunken_centroids.rows(); ++c) {
    const auto row = rows.at(static_cast<std::size_t>(c)).get<std::vector<double>>();
    model.shrunken_centroids.row(c) =
        Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size())).transpose();
  }
  const auto& cfg = doc.at("config");
  model.config.delta = cfg.at("delta").get<double>();
  model.config.temperature = cfg.at("temperature").get<double>();
  model.config.variance_floor = cfg.at("variance_floor").get<double>();
  model.config.validate();
  return model;
}

}  // namespace icpclean::cpsc
