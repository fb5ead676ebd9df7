#include "icpclean/icp.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace icpclean::icp {

namespace {
std::atomic<std::uint64_t> g_p_value_calls{0};
}

std::uint64_t p_value_call_count() { return g_p_value_calls.load(std::memory_order_relaxed); }

void CleaningPolicy::validate() const {
  if (detection_threshold <= 0.0 || detection_threshold >= 1.0)
    throw std::invalid_argument("detection_threshold must lie in (0, 1)");
  if (outlier_cutoff <= 0.0 || outlier_cutoff >= detection_threshold)
    throw std::invalid_argument(
        "outlier_cutoff must satisfy 0 < cutoff < detection_threshold");
}

std::size_t count_at_least(const CalibrationScores& cal, double alpha) {
  std::size_t count = 0;
  for (const double s : cal.scores)
    if (s >= alpha) ++count;
  return count;
}

double conformal_p_value(const CalibrationScores& cal, double alpha) {
  if (cal.size() == 0) throw std::invalid_argument("calibration set must not be empty");
  return static_cast<double>(count_at_least(cal, alpha) + 1) /
         static_cast<double>(cal.size() + 1);
}

CalibrationScores calibrate(const cpsc::CpscModel& model, const Dataset& calibration) {
  calibration.validate();
  if (calibration.dim() != model.dim())
    throw std::invalid_argument("calibration features do not match model dimensionality");
  CalibrationScores out;
  out.scores.reserve(static_cast<std::size_t>(calibration.n()));
  for (Eigen::Index i = 0; i < calibration.n(); ++i) {
    out.scores.push_back(
        cpsc::nonconformity(model, calibration.features.row(i).transpose(), calibration.labels[i]));
  }
  return out;
}

PValueMatrix p_values(const cpsc::CpscModel& model, const CalibrationScores& cal,
                      const Dataset& proper) {
  g_p_value_calls.fetch_add(1, std::memory_order_relaxed);
  proper.validate();
  if (cal.size() == 0) throw std::invalid_argument("calibration set must not be empty");
  if (proper.dim() != model.dim())
    throw std::invalid_argument("proper features do not match model dimensionality");

  // Sorted copy turns each count into a binary search.
  std::vector<double> sorted = cal.scores;
  std::sort(sorted.begin(), sorted.end());
  const double denom = static_cast<double>(cal.size() + 1);

  const int m = model.n_classes();
  PValueMatrix out;
  out.values.resize(proper.n(), m);
  out.sample_ids = proper.sample_ids;
  for (Eigen::Index i = 0; i < proper.n(); ++i) {
    const Eigen::VectorXd proba =
        cpsc::predict_proba(model, proper.features.row(i).transpose());
    for (int y = 0; y < m; ++y) {
      const double alpha = cpsc::nonconformity_from_proba(proba, y);
      const auto below = std::lower_bound(sorted.begin(), sorted.end(), alpha) - sorted.begin();
      const auto at_least = static_cast<std::size_t>(sorted.size() - static_cast<std::size_t>(below));
      out.values(i, y) = static_cast<double>(at_least + 1) / denom;
    }
  }
  return out;
}

std::pair<Dataset, CleaningReport> clean(const Dataset& proper, const PValueMatrix& pvals,
                                         const CleaningPolicy& policy) {
  policy.validate();
  proper.validate();
  if (pvals.values.rows() != proper.n() || pvals.values.cols() != proper.n_classes())
    throw std::invalid_argument("p-value matrix is not aligned with the proper set");

  const int m = proper.n_classes();
  CleaningReport report;
  report.sample_ids = proper.sample_ids;
  report.verdicts.resize(static_cast<std::size_t>(proper.n()));
  report.corrections_by_class.assign(static_cast<std::size_t>(m), 0);

  std::vector<Eigen::Index> survivors;
  std::vector<int> survivor_labels;
  for (Eigen::Index i = 0; i < proper.n(); ++i) {
    const auto row = pvals.values.row(i);
    const int original = proper.labels[i];

    const double p_max = row.maxCoeff();
    if (p_max < policy.outlier_cutoff) {
      report.verdicts[static_cast<std::size_t>(i)] = {VerdictKind::remove, -1};
      report.outliers_total++;
      continue;
    }

    double best_other = -1.0;
    for (int y = 0; y < m; ++y)
      if (y != original && row[y] > best_other) best_other = row[y];

    if (best_other - row[original] > policy.detection_threshold) {
      // Argmax over all labels; the original cannot participate in the top
      // tie here (its p-value is strictly below the max), so ties resolve to
      // the lowest class id.
      int target = 0;
      for (int y = 1; y < m; ++y)
        if (row[y] > row[target]) target = y;
      report.verdicts[static_cast<std::size_t>(i)] = {VerdictKind::relabel, target};
      report.corrections_total++;
      report.corrections_by_class[static_cast<std::size_t>(original)]++;
      survivors.push_back(i);
      survivor_labels.push_back(target);
    } else {
      report.verdicts[static_cast<std::size_t>(i)] = {VerdictKind::keep, -1};
      survivors.push_back(i);
      survivor_labels.push_back(original);
    }
  }

  if (survivors.empty())
    throw std::runtime_error("cleaning removed every sample; nothing left to train on");

  Dataset cleaned = proper.subset(survivors);
  for (std::size_t j = 0; j < survivor_labels.size(); ++j)
    cleaned.labels[static_cast<Eigen::Index>(j)] = survivor_labels[j];
  return {std::move(cleaned), std::move(report)};
}

CorrectnessBlock assess_correctness(const CleaningReport& report,
                                    const Eigen::VectorXi& noisy_labels,
                                    const Eigen::VectorXi& true_labels) {
  const auto n = static_cast<Eigen::Index>(report.verdicts.size());
  if (noisy_labels.size() != n || true_labels.size() != n)
    throw std::invalid_argument("label views are not aligned with the cleaning report");

  CorrectnessBlock block;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (noisy_labels[i] != true_labels[i]) block.wrong_before++;
    const Verdict& v = report.verdicts[static_cast<std::size_t>(i)];
    switch (v.kind) {
      case VerdictKind::keep:
        if (noisy_labels[i] != true_labels[i]) block.wrong_after++;
        break;
      case VerdictKind::relabel:
        block.corrections_made++;
        if (v.new_label != true_labels[i]) block.wrong_after++;
        break;
      case VerdictKind::remove:
        break;
    }
  }
  return block;
}

nlohmann::json report_to_json(const CleaningReport& report, const LabelSpace& space) {
  nlohmann::json verdicts = nlohmann::json::object();
  for (std::size_t i = 0; i < report.verdicts.size(); ++i) {
    const Verdict& v = report.verdicts[i];
    nlohmann::json entry;
    switch (v.kind) {
      case VerdictKind::keep:
        entry["verdict"] = "keep";
        break;
      case VerdictKind::relabel:
        entry["verdict"] = "relabel";
        entry["new_label"] = space.name_of(v.new_label);
        break;
      case VerdictKind::remove:
        entry["verdict"] = "remove";
        break;
    }
    verdicts[report.sample_ids[i]] = std::move(entry);
  }

  nlohmann::json by_class = nlohmann::json::object();
  for (std::size_t c = 0; c < report.corrections_by_class.size(); ++c)
    by_class[space.name_of(static_cast<int>(c))] = report.corrections_by_class[c];

  nlohmann::json doc;
  doc["verdicts"] = std::move(verdicts);
  doc["counts"] = {{"corrections_total", report.corrections_total},
                   {"corrections_by_class", std::move(by_class)},
                   {"outliers", report.outliers_total}};
  if (report.correctness) {
    doc["correctness"] = {{"wrong_before", report.correctness->wrong_before},
                          {"wrong_after", report.correctness->wrong_after},
                          {"corrections_made", report.correctness->corrections_made}};
  }
  return doc;
}

}  // namespace icpclean::icp
