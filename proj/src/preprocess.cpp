#include "icpclean/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "icpclean/rng.hpp"

namespace icpclean::preprocess {

Standardization standardize_fit(const Dataset& fit_on) {
  fit_on.validate();
  const double n = static_cast<double>(fit_on.n());
  Standardization s;
  s.means = fit_on.features.colwise().mean();
  const Eigen::MatrixXd centered = fit_on.features.rowwise() - s.means.transpose();
  s.scales = (centered.array().square().colwise().sum() / n).sqrt().max(1e-8);
  return s;
}

Dataset standardize_apply(const Standardization& s, const Dataset& ds) {
  if (ds.dim() != s.means.size())
    throw std::invalid_argument("standardization was fit on a different dimensionality");
  Dataset out = ds;
  out.features = (ds.features.rowwise() - s.means.transpose()).array().rowwise() /
                 s.scales.transpose().array();
  return out;
}

std::pair<std::vector<Dataset>, Standardization> standardize_fit_apply(
    const Dataset& fit_on, const std::vector<const Dataset*>& apply_to) {
  const Standardization s = standardize_fit(fit_on);
  std::vector<Dataset> out;
  out.reserve(apply_to.size());
  for (const Dataset* ds : apply_to) out.push_back(standardize_apply(s, *ds));
  return {std::move(out), s};
}

int FeatureMask::count() const {
  return static_cast<int>(std::count(selected.begin(), selected.end(), true));
}

std::vector<int> FeatureMask::indices() const {
  std::vector<int> idx;
  for (std::size_t j = 0; j < selected.size(); ++j)
    if (selected[j]) idx.push_back(static_cast<int>(j));
  return idx;
}

Dataset FeatureMask::apply(const Dataset& ds) const {
  if (static_cast<std::size_t>(ds.dim()) != selected.size())
    throw std::invalid_argument("feature mask width does not match dataset");
  const std::vector<int> idx = indices();
  Dataset out = ds;
  out.features.resize(ds.n(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j)
    out.features.col(static_cast<Eigen::Index>(j)) = ds.features.col(idx[j]);
  return out;
}

Dataset smote_oversample(const Dataset& ds, const SmoteConfig& cfg) {
  ds.validate();
  if (cfg.k_neighbors < 1) throw std::invalid_argument("smote k_neighbors must be >= 1");

  const Eigen::VectorXi counts = ds.class_counts();
  const int majority = counts.maxCoeff();

  Dataset out = ds;
  Rng rng(cfg.seed);
  for (int c = 0; c < ds.n_classes(); ++c) {
    const int deficit = majority - counts[c];
    if (counts[c] == 0 || deficit == 0) continue;
    if (counts[c] == 1)
      throw std::invalid_argument("smote cannot oversample class '" + ds.label_space.name_of(c) +
                                  "' with a single sample");

    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < ds.n(); ++i)
      if (ds.labels[i] == c) rows.push_back(i);
    const int k = std::min(cfg.k_neighbors, counts[c] - 1);

    // k nearest in-class neighbors per member, excluding itself.
    std::vector<std::vector<Eigen::Index>> neighbors(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      std::vector<std::pair<double, Eigen::Index>> dist;
      dist.reserve(rows.size() - 1);
      for (std::size_t j = 0; j < rows.size(); ++j) {
        if (j == i) continue;
        const double d2 = (ds.features.row(rows[i]) - ds.features.row(rows[j])).squaredNorm();
        dist.emplace_back(d2, rows[j]);
      }
      std::stable_sort(dist.begin(), dist.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      for (int t = 0; t < k; ++t) neighbors[i].push_back(dist[static_cast<std::size_t>(t)].second);
    }

    Eigen::MatrixXd synthetic(deficit, ds.dim());
    for (int t = 0; t < deficit; ++t) {
      const auto pick = static_cast<std::size_t>(rng.next_below(rows.size()));
      const Eigen::Index base = rows[pick];
      const Eigen::Index mate =
          neighbors[pick][static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(k)))];
      const double u = rng.next_unit();
      synthetic.row(t) =
          ds.features.row(base) + u * (ds.features.row(mate) - ds.features.row(base));
    }

    const Eigen::Index old_n = out.features.rows();
    out.features.conservativeResize(old_n + deficit, Eigen::NoChange);
    out.features.bottomRows(deficit) = synthetic;
    out.labels.conservativeResize(old_n + deficit);
    for (int t = 0; t < deficit; ++t) {
      out.labels[old_n + t] = c;
      out.sample_ids.push_back("smote_" + ds.label_space.name_of(c) + "_" + std::to_string(t));
    }
  }
  return out;
}

namespace {

inline double softplus(double u) {
  return std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)));
}

// L1-penalized binary logistic regression via proximal gradient with
// backtracking; intercept unpenalized. Returns the weight vector.
Eigen::VectorXd l1_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                            double tol, int max_iter) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  const double dn = static_cast<double>(n);

  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
  double b = 0.0;

  const auto smooth_loss = [&](const Eigen::VectorXd& wv, double bv) {
    const Eigen::VectorXd z = X * wv + Eigen::VectorXd::Constant(n, bv);
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double sign = y[i] > 0.5 ? 1.0 : -1.0;
      loss += softplus(-sign * z[i]);
    }
    return loss / dn;
  };

  double step = 1.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    const Eigen::VectorXd z = X * w + Eigen::VectorXd::Constant(n, b);
    const Eigen::VectorXd p = (1.0 + (-z.array()).exp()).inverse();
    const Eigen::VectorXd resid = p - y;
    const Eigen::VectorXd grad_w = X.transpose() * resid / dn;
    const double grad_b = resid.sum() / dn;
    const double f0 = smooth_loss(w, b);

    Eigen::VectorXd w_next;
    double b_next = b;
    for (;;) {
      const Eigen::VectorXd raw = w - step * grad_w;
      w_next = raw.array().sign() * (raw.array().abs() - step * lambda).max(0.0);
      b_next = b - step * grad_b;
      const Eigen::VectorXd dw = w_next - w;
      const double db = b_next - b;
      const double quad = f0 + grad_w.dot(dw) + grad_b * db +
                          (dw.squaredNorm() + db * db) / (2.0 * step);
      if (smooth_loss(w_next, b_next) <= quad + 1e-12) break;
      step *= 0.5;
      if (step < 1e-12) break;
    }

    const double change = std::max((w_next - w).cwiseAbs().maxCoeff(), std::abs(b_next - b));
    w = w_next;
    b = b_next;
    if (change < tol) break;
    step = std::min(step * 1.25, 1e6);
  }
  return w;
}

}  // namespace

FeatureMask l1_select(const Dataset& train, double c) {
  train.validate();
  if (c <= 0.0) throw std::invalid_argument("inverse regularization strength c must be > 0");
  const int m = train.n_classes();
  if (m < 2) throw std::invalid_argument("l1_select needs at least two classes");

  const double lambda = 1.0 / (c * static_cast<double>(train.n()));
  constexpr double tol = 1e-6;
  constexpr int max_iter = 1000;

  FeatureMask mask;
  mask.selected.assign(static_cast<std::size_t>(train.dim()), false);
  mask.source_c = c;

  const int n_fits = m == 2 ? 1 : m;
  for (int c_id = 0; c_id < n_fits; ++c_id) {
    Eigen::VectorXd y(train.n());
    for (Eigen::Index i = 0; i < train.n(); ++i) {
      const int target = m == 2 ? 1 : c_id;
      y[i] = train.labels[i] == target ? 1.0 : 0.0;
    }
    const Eigen::VectorXd w = l1_logistic(train.features, y, lambda, tol, max_iter);
    for (Eigen::Index j = 0; j < w.size(); ++j)
      if (std::abs(w[j]) > 1e-10) mask.selected[static_cast<std::size_t>(j)] = true;
  }

  if (mask.count() == 0)
    throw std::runtime_error("l1 selection kept no features at c=" + detail::format_double(c) +
                             "; increase c to weaken the penalty");
  return mask;
}

nlohmann::json mask_to_json(const FeatureMask& mask) {
  return nlohmann::json{{"indices", mask.indices()}, {"source_c", mask.source_c}};
}

FeatureMask mask_from_json(const nlohmann::json& doc, Eigen::Index dim) {
  FeatureMask mask;
  mask.selected.assign(static_cast<std::size_t>(dim), false);
  for (const auto& idx : doc.at("indices")) {
    const auto j = idx.get<Eigen::Index>();
    if (j < 0 || j >= dim) throw std::invalid_argument("feature mask index out of range");
    mask.selected[static_cast<std::size_t>(j)] = true;
  }
  mask.source_c = doc.at("source_c").get<double>();
  return mask;
}

}  // namespace icpclean::preprocess
