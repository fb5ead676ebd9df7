#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "icpclean/dataset.hpp"

namespace icpclean::preprocess {

struct SmoteConfig {
  bool enabled = false;
  int k_neighbors = 5;
  std::uint64_t seed = 0;
};

struct L1SelectConfig {
  bool enabled = false;
  std::vector<double> c_grid{0.05, 0.1, 1.0, 10.0};
};

struct PreprocessConfig {
  bool standardize = false;
  SmoteConfig smote;
  L1SelectConfig l1_select;
};

/// Per-feature z-score parameters learned from one dataset.
struct Standardization {
  Eigen::VectorXd means;
  Eigen::VectorXd scales;  // sd floored at 1e-8
};

Standardization standardize_fit(const Dataset& fit_on);
Dataset standardize_apply(const Standardization& s, const Dataset& ds);

/// Fits on `fit_on` and applies the same transform to every listed dataset.
std::pair<std::vector<Dataset>, Standardization> standardize_fit_apply(
    const Dataset& fit_on, const std::vector<const Dataset*>& apply_to);

/// Mask of surviving features from L1-penalized selection.
struct FeatureMask {
  std::vector<bool> selected;
  double source_c = 0.0;

  int count() const;
  std::vector<int> indices() const;
  Dataset apply(const Dataset& ds) const;
};

/// Upsamples every minority class to the majority count by convex
/// combinations between a random class member and one of its k nearest
/// in-class neighbors. Synthetic rows are appended with fresh ids; an
/// already balanced dataset is returned unchanged.
Dataset smote_oversample(const Dataset& ds, const SmoteConfig& cfg);

/// L1-penalized logistic feature selection (one-vs-rest beyond two classes)
/// with inverse regularization strength c. Keeps features with any nonzero
/// coefficient across classes; throws if the penalty zeroes everything.
FeatureMask l1_select(const Dataset& train, double c);

nlohmann::json mask_to_json(const FeatureMask& mask);
FeatureMask mask_from_json(const nlohmann::json& doc, Eigen::Index dim);

}  // namespace icpclean::preprocess
