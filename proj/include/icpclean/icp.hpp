#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "icpclean/cpsc.hpp"
#include "icpclean/dataset.hpp"

namespace icpclean::icp {

/// Nonconformity of each calibration sample at its ground-truth label.
/// Calibration is marginal: all samples pool into one reference distribution.
struct CalibrationScores {
  std::vector<double> scores;

  std::size_t size() const { return scores.size(); }
};

/// Per-proper-sample, per-candidate-label conformal p-values.
struct PValueMatrix {
  Eigen::MatrixXd values;               // n_proper x M, entries in (0, 1]
  std::vector<std::string> sample_ids;  // aligned to rows
};

struct CleaningPolicy {
  double detection_threshold = 0.5;  // p-value margin for wrong-label detection
  double outlier_cutoff = 0.1;       // all labels below this => outlier

  void validate() const;
};

enum class VerdictKind { keep, relabel, remove };

struct Verdict {
  VerdictKind kind = VerdictKind::keep;
  int new_label = -1;  // set for relabel verdicts
};

struct CorrectnessBlock {
  int wrong_before = 0;      // noisy != true over the full proper set
  int wrong_after = 0;       // over kept + relabeled samples
  int corrections_made = 0;  // relabel verdicts
};

struct CleaningReport {
  std::vector<std::string> sample_ids;
  std::vector<Verdict> verdicts;
  int corrections_total = 0;
  std::vector<int> corrections_by_class;  // indexed by original class id
  int outliers_total = 0;
  std::optional<CorrectnessBlock> correctness;
};

/// Count of calibration scores >= alpha (ties count), plus the resulting
/// Laplace-smoothed p-value (count + 1) / (size + 1). Exposed separately so
/// the counting can be checked exactly against brute force.
std::size_t count_at_least(const CalibrationScores& cal, double alpha);
double conformal_p_value(const CalibrationScores& cal, double alpha);

/// Nonconformity of every calibration sample at its ground-truth label,
/// row order preserved.
CalibrationScores calibrate(const cpsc::CpscModel& model, const Dataset& calibration);

/// Conformal p-value of every (proper sample, candidate label) pair against
/// the calibration reference distribution.
PValueMatrix p_values(const cpsc::CpscModel& model, const CalibrationScores& cal,
                      const Dataset& proper);

/// Rule-based cleaning. Per sample: remove when every label's p-value falls
/// below the outlier cutoff; relabel to the argmax-p-value label when some
/// other label beats the original by strictly more than the detection
/// threshold; keep otherwise. Argmax ties break toward the original label
/// when it participates, else toward the lowest class id.
std::pair<Dataset, CleaningReport> clean(const Dataset& proper, const PValueMatrix& pvals,
                                         const CleaningPolicy& policy);

/// Ground-truth bookkeeping for reports: wrong labels before/after cleaning
/// and the number of corrections made. Inputs align with the full proper set
/// the report was built from.
CorrectnessBlock assess_correctness(const CleaningReport& report,
                                    const Eigen::VectorXi& noisy_labels,
                                    const Eigen::VectorXi& true_labels);

nlohmann::json report_to_json(const CleaningReport& report, const LabelSpace& space);

/// Number of p_values() invocations so far; lets tests pin down that the
/// baseline arm of an experiment never touches calibration-derived p-values.
std::uint64_t p_value_call_count();

}  // namespace icpclean::icp
