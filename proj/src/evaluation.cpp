#include "icpclean/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace icpclean::eval {

double accuracy(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth) {
  if (pred.size() != truth.size() || pred.size() == 0)
    throw std::invalid_argument("accuracy needs two equal-length non-empty label vectors");
  Eigen::Index hits = 0;
  for (Eigen::Index i = 0; i < pred.size(); ++i)
    if (pred[i] == truth[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double auroc(const std::vector<double>& scores, const std::vector<int>& truth) {
  if (scores.size() != truth.size() || scores.empty())
    throw std::invalid_argument("auroc needs equal-length non-empty inputs");
  const std::size_t n = scores.size();
  std::size_t n_pos = 0;
  for (const int t : truth) n_pos += (t != 0);
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0)
    throw std::invalid_argument("auroc needs both classes present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Average ranks within tie groups; rank arithmetic stays exact in doubles.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k)
      if (truth[order[k]] != 0) rank_sum_pos += avg_rank;
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double auprc(const std::vector<double>& scores, const std::vector<int>& truth) {
  if (scores.size() != truth.size() || scores.empty())
    throw std::invalid_argument("auprc needs equal-length non-empty inputs");
  std::size_t n_pos = 0;
  for (const int t : truth) n_pos += (t != 0);
  if (n_pos == 0) throw std::invalid_argument("auprc needs at least one positive");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double ap = 0.0;
  double recall_prev = 0.0;
  std::size_t tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) {
      if (truth[order[k]] != 0)
        ++tp;
      else
        ++fp;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(n_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - recall_prev) * precision;
    recall_prev = recall;
    i = j + 1;
  }
  return ap;
}

double macro_f1(const Eigen::VectorXi& pred, const Eigen::VectorXi& truth, int n_classes,
                int* empty_classes) {
  if (pred.size() != truth.size() || pred.size() == 0)
    throw std::invalid_argument("macro_f1 needs two equal-length non-empty label vectors");
  if (n_classes < 1) throw std::invalid_argument("macro_f1 needs n_classes >= 1");

  int empties = 0;
  double sum = 0.0;
  for (int c = 0; c < n_classes; ++c) {
    Eigen::Index tp = 0, fp = 0, fn = 0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) {
      const bool p = pred[i] == c;
      const bool t = truth[i] == c;
      tp += (p && t);
      fp += (p && !t);
      fn += (!p && t);
    }
    if (tp + fp + fn == 0) {
      ++empties;  // absent class contributes F1 = 0
      continue;
    }
    sum += 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
  }
  if (empty_classes != nullptr) *empty_classes = empties;
  return sum / static_cast<double>(n_classes);
}

namespace {

// Modified Lentz continued fraction for the incomplete beta function.
double beta_continued_fraction(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-15;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 500; ++m) {
    const double dm = static_cast<double>(m);
    double numer = dm * (b - dm) * x / ((a + 2.0 * dm - 1.0) * (a + 2.0 * dm));
    d = 1.0 + numer * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + numer / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    numer = -(a + dm) * (a + b + dm) * x / ((a + 2.0 * dm) * (a + 2.0 * dm + 1.0));
    d = 1.0 + numer * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + numer / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0 && a > 0.0 && b > 0.0))
    throw std::invalid_argument("regularized_incomplete_beta domain error");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0))
    return std::exp(log_front) * beta_continued_fraction(x, a, b) / a;
  return 1.0 - std::exp(log_front) * beta_continued_fraction(1.0 - x, b, a) / b;
}

double student_t_cdf(double x, double dof) {
  if (dof <= 0.0) throw std::invalid_argument("degrees of freedom must be > 0");
  if (x == 0.0) return 0.5;
  const double tail = 0.5 * regularized_incomplete_beta(dof / (dof + x * x), dof / 2.0, 0.5);
  return x > 0.0 ? 1.0 - tail : tail;
}

double student_t_quantile(double p, double dof) {
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("quantile probability must lie in (0, 1)");
  double lo = -1.0, hi = 1.0;
  while (student_t_cdf(lo, dof) > p) lo *= 2.0;
  while (student_t_cdf(hi, dof) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (student_t_cdf(mid, dof) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  if (p < 0.1) return ".";
  return "";
}

PairedComparison paired_ttest(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired series must have equal length");
  const auto n = static_cast<int>(a.size());
  if (n < 2) throw std::invalid_argument("paired t-test needs at least two pairs");

  const double dn = static_cast<double>(n);
  PairedComparison cmp;
  cmp.n_pairs = n;
  cmp.mean_a = std::accumulate(a.begin(), a.end(), 0.0) / dn;
  cmp.mean_b = std::accumulate(b.begin(), b.end(), 0.0) / dn;
  cmp.mean_diff = cmp.mean_a - cmp.mean_b;

  double ss_diff = 0.0, ss_a = 0.0, ss_b = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = (a[static_cast<std::size_t>(i)] - b[static_cast<std::size_t>(i)]) - cmp.mean_diff;
    ss_diff += d * d;
    const double da = a[static_cast<std::size_t>(i)] - cmp.mean_a;
    ss_a += da * da;
    const double db = b[static_cast<std::size_t>(i)] - cmp.mean_b;
    ss_b += db * db;
  }
  const double dof = dn - 1.0;
  const double tq = student_t_quantile(0.975, dof);
  const double half_a = tq * std::sqrt(ss_a / dof / dn);
  const double half_b = tq * std::sqrt(ss_b / dof / dn);
  cmp.ci95_a = {cmp.mean_a - half_a, cmp.mean_a + half_a};
  cmp.ci95_b = {cmp.mean_b - half_b, cmp.mean_b + half_b};

  const double sd_diff = std::sqrt(ss_diff / dof);
  if (sd_diff == 0.0) {
    cmp.degenerate = true;
    cmp.t_stat = cmp.mean_diff == 0.0 ? 0.0 : std::copysign(HUGE_VAL, cmp.mean_diff);
    cmp.p_value = cmp.mean_diff == 0.0 ? 1.0 : 0.0;
  } else {
    cmp.t_stat = cmp.mean_diff / (sd_diff / std::sqrt(dn));
    cmp.p_value = 2.0 * (1.0 - student_t_cdf(std::abs(cmp.t_stat), dof));
  }
  cmp.stars = significance_stars(cmp.p_value);
  return cmp;
}

}  // namespace icpclean::eval
