#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

namespace icpclean::eval {

struct MetricSet {
  double accuracy = 0.0;
  std::optional<double> auroc;  // binary tasks only
  std::optional<double> auprc;  // binary tasks only
  double macro_f1 = 0.0;
  int n_eval = 0;
};

struct PairedComparison {
  double mean_a = 0.0;
  double mean_b = 0.0;
  double mean_diff = 0.0;
  std::array<double, 2> ci95_a{0.0, 0.0};
  std::array<double, 2> ci95_b{0.0, 0.0};
  double t_stat = 0.0;
  double p_value = 1.0;
  int n_pairs = 0;
  bool degenerate = false;  // zero variance of the differences
  std::string stars;
};

double accuracy(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth);

/// Mann-Whitney AUROC with half credit for ties, computed by average ranks.
/// `truth` entries are 0/1; both classes must be present.
double auroc(const std::vector<double>& scores, const std::vector<int>& truth);

/// Step-wise average precision; tied scores collapse into one threshold.
double auprc(const std::vector<double>& scores, const std::vector<int>& truth);

/// Unweighted mean of per-class F1 over all `n_classes` classes. A class
/// absent from both pred and truth contributes F1 = 0; `empty_classes`, when
/// given, receives how many classes hit that convention.
double macro_f1(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth, int n_classes,
                int* empty_classes = nullptr);

/// Two-sided paired t-test on a - b with df = n - 1, plus t-based 95%
/// confidence intervals for each series' mean. Zero variance of the
/// differences is flagged: p = 1 when the mean difference is 0, else p = 0.
PairedComparison paired_ttest(const std::vector<double>& a, const std::vector<double>& b);

/// Student-t CDF via the regularized incomplete beta function.
double student_t_cdf(double x, double dof);

/// Inverse of student_t_cdf in its first argument (bisection).
double student_t_quantile(double p, double dof);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double regularized_incomplete_beta(double x, double a, double b);

/// Figure-annotation convention: *** p<0.001, ** p<0.01, * p<0.05, . p<0.1.
std::string significance_stars(double p);

}  // namespace icpclean::eval
