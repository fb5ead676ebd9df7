#include "icpclean/classifiers.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace icpclean::classifiers {

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::json& doc) {
  const auto n_rows = static_cast<Eigen::Index>(doc.size());
  if (n_rows == 0) return Eigen::MatrixXd(0, 0);
  const auto first = doc.at(0).get<std::vector<double>>();
  Eigen::MatrixXd m(n_rows, static_cast<Eigen::Index>(first.size()));
  for (Eigen::Index i = 0; i < n_rows; ++i) {
    const auto row = doc.at(static_cast<std::size_t>(i)).get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != m.cols())
      throw std::invalid_argument("ragged matrix in json document");
    m.row(i) = Eigen::Map<const Eigen::VectorXd>(row.data(), m.cols()).transpose();
  }
  return m;
}

Eigen::VectorXd vector_from_json(const nlohmann::json& doc) {
  const auto v = doc.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXd softmax(const Eigen::VectorXd& scores) {
  const Eigen::VectorXd shifted = scores.array() - scores.maxCoeff();
  Eigen::VectorXd p = shifted.array().exp();
  p /= p.sum();
  return p;
}

}  // namespace

LdaModel lda_fit(const Dataset& train, double rank_tolerance) {
  train.validate();
  const int m = train.n_classes();
  if (m < 2) throw std::invalid_argument("lda needs at least two classes");
  const Eigen::VectorXi counts = train.class_counts();
  for (int c = 0; c < m; ++c) {
    if (counts[c] < 2)
      throw std::invalid_argument("lda needs >= 2 samples per class; class '" +
                                  train.label_space.name_of(c) + "' has " +
                                  std::to_string(counts[c]));
  }

  const Eigen::Index n = train.n();
  const Eigen::Index d = train.dim();

  LdaModel model;
  model.rank_tolerance = rank_tolerance;
  model.class_means.setZero(m, d);
  for (Eigen::Index i = 0; i < n; ++i) model.class_means.row(train.labels[i]) += train.features.row(i);
  for (int c = 0; c < m; ++c) model.class_means.row(c) /= static_cast<double>(counts[c]);

  model.log_priors.resize(m);
  for (int c = 0; c < m; ++c)
    model.log_priors[c] = std::log(static_cast<double>(counts[c]) / static_cast<double>(n));

  // Within-class scatter via SVD of the class-centered rows; scaling by
  // sqrt(n - M) makes the squared singular values the pooled covariance
  // eigenvalues.
  Eigen::MatrixXd centered(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    centered.row(i) = train.features.row(i) - model.class_means.row(train.labels[i]);
  centered /= std::sqrt(static_cast<double>(n - m));

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? rank_tolerance * sv[0] : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cutoff && sv[i] > 0.0) ++rank;

  model.whitener.resize(d, rank);
  for (Eigen::Index i = 0; i < rank; ++i)
    model.whitener.col(i) = svd.matrixV().col(i) / sv[i];
  return model;
}

Eigen::VectorXd lda_scores(const LdaModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.dim())
    throw std::invalid_argument("feature vector length does not match lda model");
  Eigen::VectorXd scores(model.n_classes());
  for (int c = 0; c < model.n_classes(); ++c) {
    const Eigen::VectorXd z =
        model.whitener.transpose() * (x - model.class_means.row(c).transpose());
    scores[c] = model.log_priors[c] - 0.5 * z.squaredNorm();
  }
  return scores;
}

Eigen::VectorXd lda_predict_proba(const LdaModel& model,
                                  const Eigen::Ref<const Eigen::VectorXd>& x) {
  return softmax(lda_scores(model, x));
}

Eigen::MatrixXd lda_predict_proba_batch(const LdaModel& model, const Eigen::MatrixXd& X) {
  Eigen::MatrixXd out(X.rows(), model.n_classes());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    out.row(i) = lda_predict_proba(model, X.row(i).transpose()).transpose();
  return out;
}

Eigen::VectorXi lda_predict(const LdaModel& model, const Eigen::MatrixXd& X) {
  Eigen::VectorXi pred(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::Index best;
    lda_scores(model, X.row(i).transpose()).maxCoeff(&best);
    pred[i] = static_cast<int>(best);
  }
  return pred;
}

namespace {

// Row-stable softmax over a score matrix.
Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& Z) {
  const Eigen::VectorXd zmax = Z.rowwise().maxCoeff();
  Eigen::MatrixXd proba = (Z.colwise() - zmax).array().exp();
  proba.array().colwise() /= proba.rowwise().sum().array();
  return proba;
}

double lr_objective(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                    const Eigen::MatrixXd& W, const Eigen::VectorXd& b, double lambda) {
  const Eigen::Index n = X.rows();
  const Eigen::MatrixXd Z = (X * W.transpose()).rowwise() + b.transpose();
  const Eigen::VectorXd zmax = Z.rowwise().maxCoeff();
  const Eigen::VectorXd lse =
      ((Z.colwise() - zmax).array().exp().rowwise().sum()).log() + zmax.array();
  double loss = lse.sum();
  for (Eigen::Index i = 0; i < n; ++i) loss -= Z(i, y[i]);
  return loss / static_cast<double>(n) + 0.5 * lambda * W.squaredNorm();
}

}  // namespace

LrModel lr_fit(const Dataset& train, const LrConfig& config) {
  train.validate();
  const int m = train.n_classes();
  if (m < 2) throw std::invalid_argument("logistic regression needs at least two classes");
  if (config.inverse_strength <= 0.0)
    throw std::invalid_argument("inverse_strength must be > 0");

  const Eigen::Index n = train.n();
  const Eigen::Index d = train.dim();
  const double dn = static_cast<double>(n);
  const double lambda = 1.0 / (config.inverse_strength * dn);

  // Fitting on centered features is the same model with the offset folded
  // into the intercept, but far better conditioned for the solver.
  const Eigen::RowVectorXd center = train.features.colwise().mean();
  const Eigen::MatrixXd X = train.features.rowwise() - center;
  const Eigen::VectorXi& y = train.labels;

  const Eigen::Index n_params = static_cast<Eigen::Index>(m) * d + m;
  const auto as_weights = [&](const Eigen::VectorXd& theta) {
    return Eigen::Map<const Eigen::MatrixXd>(theta.data(), m, d);
  };
  const auto as_intercepts = [&](const Eigen::VectorXd& theta) {
    return Eigen::Map<const Eigen::VectorXd>(theta.data() + m * d, m);
  };

  const auto objective = [&](const Eigen::VectorXd& theta) {
    return lr_objective(X, y, as_weights(theta), as_intercepts(theta), lambda);
  };
  const auto gradient = [&](const Eigen::VectorXd& theta) {
    const Eigen::MatrixXd Z =
        (X * as_weights(theta).transpose()).rowwise() + as_intercepts(theta).transpose();
    Eigen::MatrixXd resid = softmax_rows(Z);
    for (Eigen::Index i = 0; i < n; ++i) resid(i, y[i]) -= 1.0;
    Eigen::VectorXd grad(n_params);
    Eigen::Map<Eigen::MatrixXd>(grad.data(), m, d) =
        resid.transpose() * X / dn + lambda * as_weights(theta);
    Eigen::Map<Eigen::VectorXd>(grad.data() + m * d, m) = resid.colwise().sum() / dn;
    return grad;
  };

  // L-BFGS with Armijo backtracking; the line search keeps every accepted
  // step a strict descent step.
  constexpr int kMemory = 10;
  std::vector<Eigen::VectorXd> s_hist, y_hist;
  std::vector<double> rho_hist;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(n_params);
  Eigen::VectorXd grad = gradient(theta);

  LrModel model;
  model.objective_trace.push_back(objective(theta));

  bool reached_tol = false;
  for (int iter = 0; iter < config.max_iter; ++iter) {
    if (grad.norm() < config.tol) {
      reached_tol = true;
      break;
    }

    // Two-loop recursion for the search direction.
    Eigen::VectorXd direction = -grad;
    const auto k = static_cast<int>(s_hist.size());
    std::vector<double> alpha(static_cast<std::size_t>(k));
    for (int i = k - 1; i >= 0; --i) {
      alpha[static_cast<std::size_t>(i)] =
          rho_hist[static_cast<std::size_t>(i)] * s_hist[static_cast<std::size_t>(i)].dot(direction);
      direction -= alpha[static_cast<std::size_t>(i)] * y_hist[static_cast<std::size_t>(i)];
    }
    if (k > 0) {
      const auto& s = s_hist.back();
      const auto& yv = y_hist.back();
      direction *= s.dot(yv) / yv.squaredNorm();
    }
    for (int i = 0; i < k; ++i) {
      const double beta =
          rho_hist[static_cast<std::size_t>(i)] * y_hist[static_cast<std::size_t>(i)].dot(direction);
      direction += (alpha[static_cast<std::size_t>(i)] - beta) * s_hist[static_cast<std::size_t>(i)];
    }
    double slope = grad.dot(direction);
    if (slope >= 0.0) {  // fall back to steepest descent
      direction = -grad;
      slope = -grad.squaredNorm();
    }

    const double current = model.objective_trace.back();
    double step = 1.0;
    Eigen::VectorXd theta_next;
    double candidate = current;
    for (;;) {
      theta_next = theta + step * direction;
      candidate = objective(theta_next);
      if (candidate <= current + 1e-4 * step * slope) break;
      step *= 0.5;
      if (step < 1e-14) break;
    }
    if (step < 1e-14) break;  // no progress left at double precision

    const Eigen::VectorXd grad_next = gradient(theta_next);
    const Eigen::VectorXd s = theta_next - theta;
    const Eigen::VectorXd yv = grad_next - grad;
    const double sy = s.dot(yv);
    if (sy > 1e-12) {
      s_hist.push_back(s);
      y_hist.push_back(yv);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > kMemory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
    }
    theta = std::move(theta_next);
    grad = grad_next;
    model.objective_trace.push_back(candidate);
  }
  if (!reached_tol && grad.norm() < config.tol) reached_tol = true;

  model.weights = as_weights(theta);
  model.intercepts = as_intercepts(theta) - model.weights * center.transpose();
  model.converged = reached_tol;
  return model;
}

Eigen::VectorXd lr_predict_proba(const LrModel& model,
                                 const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.dim())
    throw std::invalid_argument("feature vector length does not match lr model");
  return softmax(model.weights * x + model.intercepts);
}

Eigen::MatrixXd lr_predict_proba_batch(const LrModel& model, const Eigen::MatrixXd& X) {
  Eigen::MatrixXd out(X.rows(), model.n_classes());
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    out.row(i) = lr_predict_proba(model, X.row(i).transpose()).transpose();
  return out;
}

Eigen::VectorXi lr_predict(const LrModel& model, const Eigen::MatrixXd& X) {
  Eigen::VectorXi pred(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Eigen::Index best;
    (model.weights * X.row(i).transpose() + model.intercepts).maxCoeff(&best);
    pred[i] = static_cast<int>(best);
  }
  return pred;
}

nlohmann::json lda_to_json(const LdaModel& model) {
  return nlohmann::json{{"class_means", matrix_to_json(model.class_means)},
                        {"whitener", matrix_to_json(model.whitener)},
                        {"log_priors", std::vector<double>(model.log_priors.begin(),
                                                           model.log_priors.end())},
                        {"rank_tolerance", model.rank_tolerance}};
}

LdaModel lda_from_json(const nlohmann::json& doc) {
  LdaModel model;
  model.class_means = matrix_from_json(doc.at("class_means"));
  model.whitener = matrix_from_json(doc.at("whitener"));
  model.log_priors = vector_from_json(doc.at("log_priors"));
  model.rank_tolerance = doc.at("rank_tolerance").get<double>();
  if (model.whitener.rows() != model.class_means.cols() && model.whitener.size() != 0)
    throw std::invalid_argument("lda whitener does not match class means width");
  return model;
}

nlohmann::json lr_to_json(const LrModel& model) {
  return nlohmann::json{{"weights", matrix_to_json(model.weights)},
                        {"intercepts", std::vector<double>(model.intercepts.begin(),
                                                           model.intercepts.end())},
                        {"converged", model.converged}};
}

LrModel lr_from_json(const nlohmann::json& doc) {
  LrModel model;
  model.weights = matrix_from_json(doc.at("weights"));
  model.intercepts = vector_from_json(doc.at("intercepts"));
  model.converged = doc.at("converged").get<bool>();
  return model;
}

}  // namespace icpclean::classifiers
