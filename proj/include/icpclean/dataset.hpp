#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace icpclean {

/// Ordered label vocabulary. Class ids are 0..M-1 in list order; the mapping
/// is frozen when a dataset is loaded and shared by every derived dataset.
class LabelSpace {
 public:
  LabelSpace() = default;
  explicit LabelSpace(std::vector<std::string> classes);

  int size() const { return static_cast<int>(classes_.size()); }
  const std::vector<std::string>& classes() const { return classes_; }
  const std::string& name_of(int id) const;
  int id_of(const std::string& name) const;  // -1 when unknown

 private:
  std::vector<std::string> classes_;
  std::unordered_map<std::string, int> index_;
};

/// Feature matrix plus integer labels. Immutable by convention: pipeline
/// stages return fresh datasets instead of mutating in place.
struct Dataset {
  Eigen::MatrixXd features;             // n x D
  Eigen::VectorXi labels;               // n, values in [0, M)
  LabelSpace label_space;
  std::vector<std::string> sample_ids;  // n, opaque

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  int n_classes() const { return label_space.size(); }

  /// Throws std::invalid_argument on NaN/inf features, label ids outside the
  /// label space, or mismatched row counts.
  void validate() const;

  Dataset subset(const std::vector<Eigen::Index>& rows) const;
  Eigen::VectorXi class_counts() const;
};

struct SplitSpec {
  double train_frac = 0.6;
  double val_frac = 0.2;
  double test_frac = 0.2;
  double proper_frac = 0.8;  // share of train that becomes the proper set
  bool stratified = true;
  std::uint64_t seed = 0;

  void validate() const;
};

struct FourWaySplit {
  Dataset proper;
  Dataset calibration;
  Dataset validation;
  Dataset test;
  // Classes too small to reach every part under stratification.
  std::vector<std::string> warnings;
};

struct NoiseSpec {
  enum class Mode { shuffle, flip };
  double fraction = 0.0;  // share of samples whose labels are disturbed
  Mode mode = Mode::shuffle;
  std::uint64_t seed = 0;
};

/// Parses a UTF-8 CSV with a header row. Every non-label, non-"id" column
/// must be a finite decimal literal; violations are reported with their
/// row and column. When `fixed_space` is given, labels are resolved against
/// it instead of building a fresh vocabulary (needed so separately stored
/// split files agree on class ids).
Dataset load_csv(const std::string& path, const std::string& label_column = "label",
                 const LabelSpace* fixed_space = nullptr);

void save_csv(const Dataset& ds, const std::string& path,
              const std::string& label_column = "label");

/// Deterministic seeded partition into proper/calibration/validation/test.
/// Stratified mode apportions every class across parts with largest-remainder
/// rounding, so per-part class counts differ from exact proportionality by at
/// most one sample.
FourWaySplit split(const Dataset& ds, const SplitSpec& spec);

/// Label-noise injection. Picks round(fraction * n) samples uniformly at
/// random; `shuffle` permutes the selected labels among themselves (global
/// label multiset preserved), `flip` reassigns each to a uniformly chosen
/// different class. Returns the noisy dataset and a mask that is true where
/// the label actually changed. Features are shared untouched.
std::pair<Dataset, std::vector<bool>> permute_labels(const Dataset& ds, const NoiseSpec& spec);

/// {part name -> [sample ids]} manifest for reproducibility audits.
nlohmann::json split_manifest(const FourWaySplit& parts);

namespace detail {
/// Shortest round-trip decimal form, used by every CSV/JSON emitter so that
/// identical runs produce byte-identical files.
std::string format_double(double v);
}  // namespace detail

}  // namespace icpclean
