#pragma once

#include <Eigen/Dense>

#include <nlohmann/json_fwd.hpp>

#include "icpclean/dataset.hpp"

namespace icpclean::cpsc {

struct CpscConfig {
  double delta = 0.0;            // soft threshold on standardized contrasts
  double temperature = 1.0;      // softmax scaling
  double variance_floor = 1e-8;  // floor on per-feature pooled variance

  void validate() const;
};

/// Shrunken-centroids probabilistic classifier. Centroid contrasts against
/// the overall centroid are standardized by the pooled per-feature scale,
/// soft-thresholded by delta, and folded back into per-class centroids.
/// Immutable after fit; all inference entry points are pure.
struct CpscModel {
  Eigen::VectorXd overall_centroid;    // D
  Eigen::MatrixXd shrunken_centroids;  // M x D
  Eigen::VectorXd pooled_scale;        // D, strictly positive
  Eigen::VectorXd log_priors;          // M
  LabelSpace label_space;
  CpscConfig config;

  Eigen::Index dim() const { return overall_centroid.size(); }
  int n_classes() const { return static_cast<int>(log_priors.size()); }
};

/// Fits centroids, pooled scale (divisor n - M, floored), shrunken contrasts
/// and empirical log priors. Requires at least two classes, at least one
/// sample per declared class, and n > M. Accumulation runs in fixed
/// left-to-right row order so refits are reproducible.
CpscModel fit(const Dataset& train, const CpscConfig& config);

/// Per-class score: log prior minus half the scale-normalized squared
/// distance to the class's shrunken centroid.
Eigen::VectorXd discriminatory_scores(const CpscModel& model,
                                      const Eigen::Ref<const Eigen::VectorXd>& x);

/// Temperature softmax over the discriminatory scores, computed in log space
/// with max subtraction.
Eigen::VectorXd predict_proba(const CpscModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

/// Rows of predict_proba for every sample in X.
Eigen::MatrixXd predict_proba_batch(const CpscModel& model, const Eigen::MatrixXd& X);

/// Margin-based nonconformity in [0, 1]: 0.5 - (p(label) - max p(other)) / 2.
/// Strictly below 0.5 exactly when `label` is the strict argmax.
double nonconformity(const CpscModel& model, const Eigen::Ref<const Eigen::VectorXd>& x, int label);

/// Same, reusing an already computed probability row.
double nonconformity_from_proba(const Eigen::Ref<const Eigen::VectorXd>& proba, int label);

nlohmann::json to_json(const CpscModel& model);
CpscModel from_json(const nlohmann::json& doc);

}  // namespace icpclean::cpsc
