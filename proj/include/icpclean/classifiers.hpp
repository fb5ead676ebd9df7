#pragma once

#include <Eigen/Dense>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "icpclean/dataset.hpp"

namespace icpclean::classifiers {

/// Equal-covariance Gaussian discriminant. Rank-deficient within-class
/// scatter is handled by discarding singular directions below
/// rank_tolerance x the largest singular value; the surviving directions
/// form a whitening basis.
struct LdaModel {
  Eigen::MatrixXd class_means;  // M x D
  Eigen::MatrixXd whitener;     // D x r
  Eigen::VectorXd log_priors;   // M
  double rank_tolerance = 1e-10;

  int n_classes() const { return static_cast<int>(log_priors.size()); }
  Eigen::Index dim() const { return class_means.cols(); }
};

LdaModel lda_fit(const Dataset& train, double rank_tolerance = 1e-10);
Eigen::VectorXd lda_scores(const LdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd lda_predict_proba(const LdaModel& model,
                                  const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXi lda_predict(const LdaModel& model, const Eigen::MatrixXd& X);
Eigen::MatrixXd lda_predict_proba_batch(const LdaModel& model, const Eigen::MatrixXd& X);

struct LrConfig {
  double inverse_strength = 1.0;  // larger = weaker L2 penalty
  double tol = 1e-6;
  int max_iter = 1000;
};

/// Multinomial logistic regression, L2 penalty on weights only, fitted by
/// gradient descent with Armijo backtracking so the objective is monotone.
struct LrModel {
  Eigen::MatrixXd weights;     // M x D
  Eigen::VectorXd intercepts;  // M
  bool converged = true;
  std::vector<double> objective_trace;  // objective value per accepted step

  int n_classes() const { return static_cast<int>(intercepts.size()); }
  Eigen::Index dim() const { return weights.cols(); }
};

LrModel lr_fit(const Dataset& train, const LrConfig& config = {});
Eigen::VectorXd lr_predict_proba(const LrModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXi lr_predict(const LrModel& model, const Eigen::MatrixXd& X);
Eigen::MatrixXd lr_predict_proba_batch(const LrModel& model, const Eigen::MatrixXd& X);

nlohmann::json lda_to_json(const LdaModel& model);
LdaModel lda_from_json(const nlohmann::json& doc);
nlohmann::json lr_to_json(const LrModel& model);
LrModel lr_from_json(const nlohmann::json& doc);

}  // namespace icpclean::classifiers
