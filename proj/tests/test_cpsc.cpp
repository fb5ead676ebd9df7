#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "icpclean/cpsc.hpp"
#include "test_helpers.hpp"

using namespace icpclean;

namespace {

// 1-D fixture: class a = {0, 2}, class b = {4, 6}.
Dataset worked_example() {
  return testutil::make_dataset({{0.0}, {2.0}, {4.0}, {6.0}}, {0, 0, 1, 1}, {"a", "b"});
}

}  // namespace

TEST_CASE("fit reproduces the hand-evaluated 1-D fixture") {
  const cpsc::CpscModel model = cpsc::fit(worked_example(), {0.41421, 1.0, 1e-8});
  CHECK(model.overall_centroid[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(model.pooled_scale[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
  CHECK(model.shrunken_centroids(0, 0) == doctest::Approx(1.58579).epsilon(1e-5));
  CHECK(model.shrunken_centroids(1, 0) == doctest::Approx(4.41421).epsilon(1e-5));
  CHECK(model.log_priors[0] == doctest::Approx(std::log(0.5)));
  CHECK(model.log_priors.array().exp().sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("priors stay a distribution for skewed class counts") {
  Rng rng(20);
  Dataset ds = testutil::random_dataset(rng, 60, 2, 3);
  for (Eigen::Index i = 0; i < 60; ++i) ds.labels[i] = i < 40 ? 0 : (i < 55 ? 1 : 2);
  const cpsc::CpscModel model = cpsc::fit(ds, {0.1, 1.0, 1e-8});
  CHECK(model.log_priors.array().exp().sum() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(model.log_priors[0] == doctest::Approx(std::log(40.0 / 60.0)));
}

TEST_CASE("large delta collapses both centroids onto the overall centroid") {
  const cpsc::CpscModel model = cpsc::fit(worked_example(), {2.0, 1.0, 1e-8});
  CHECK(model.shrunken_centroids(0, 0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(model.shrunken_centroids(1, 0) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("delta 0 keeps the raw class centroids") {
  const cpsc::CpscModel model = cpsc::fit(worked_example(), {0.0, 1.0, 1e-8});
  CHECK(model.shrunken_centroids(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(model.shrunken_centroids(1, 0) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("discriminatory scores match the hand evaluation at the midpoint") {
  const cpsc::CpscModel model = cpsc::fit(worked_example(), {0.41421, 1.0, 1e-8});
  Eigen::VectorXd x(1);
  x << 3.0;
  const Eigen::VectorXd scores = cpsc::discriminatory_scores(model, x);
  CHECK(scores[0] == doctest::Approx(-1.19315).epsilon(1e-5));
  CHECK(scores[1] == doctest::Approx(-1.19315).epsilon(1e-5));
  CHECK(scores[0] <= model.log_priors[0]);
}

TEST_CASE("fully shrunk model scores differ only by the log priors") {
  Rng rng(21);
  const Dataset ds = testutil::random_dataset(rng, 40, 3, 3);
  const cpsc::CpscModel model = cpsc::fit(ds, {50.0, 1.0, 1e-8});
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd x(3);
    for (int j = 0; j < 3; ++j) x[j] = rng.next_normal();
    const Eigen::VectorXd gap = cpsc::discriminatory_scores(model, x) - model.log_priors;
    CHECK((gap.array() - gap[0]).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("a sample at a shrunken centroid is classified as that class") {
  Rng rng(22);
  const Dataset ds = testutil::random_dataset(rng, 60, 4, 2);
  const cpsc::CpscModel model = cpsc::fit(ds, {0.1, 1.0, 1e-8});
  for (int c = 0; c < 2; ++c) {
    Eigen::Index best;
    cpsc::discriminatory_scores(model, model.shrunken_centroids.row(c).transpose())
        .maxCoeff(&best);
    CHECK(static_cast<int>(best) == c);
  }
}

TEST_CASE("predict_proba matches the hand evaluation") {
  const cpsc::CpscModel model = cpsc::fit(worked_example(), {0.0, 1.0, 1e-8});
  Eigen::VectorXd x(1);

  x << 0.0;
  const Eigen::VectorXd p = cpsc::predict_proba(model, x);
  CHECK(p[0] == doctest::Approx(1.0 / (1.0 + std::exp(-6.0))).epsilon(1e-9));
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));

  x << 3.0;
  const Eigen::VectorXd mid = cpsc::predict_proba(model, x);
  CHECK(mid[0] == doctest::Approx(0.5).epsilon(1e-12));

  cpsc::CpscModel hot = model;
  hot.config.temperature = 1e6;
  const Eigen::VectorXd flat = cpsc::predict_proba(hot, x);
  CHECK(flat[0] == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(flat[1] == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("nonconformity follows the margin formula") {
  Eigen::VectorXd p(2);
  p << 0.9, 0.1;
  CHECK(cpsc::nonconformity_from_proba(p, 0) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(cpsc::nonconformity_from_proba(p, 1) == doctest::Approx(0.9).epsilon(1e-12));

  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(4, 0.25);
  for (int y = 0; y < 4; ++y)
    CHECK(cpsc::nonconformity_from_proba(uniform, y) == doctest::Approx(0.5).epsilon(1e-12));

  Eigen::VectorXd three(3);
  three << 0.6, 0.3, 0.1;
  CHECK(cpsc::nonconformity_from_proba(three, 1) == doctest::Approx(0.65).epsilon(1e-12));
}

TEST_CASE("strict argmax of proba is equivalent to nonconformity below one half") {
  Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = 2 + static_cast<int>(rng.next_below(4));
    const Dataset ds = testutil::random_dataset(rng, 30 + m * 2, 3, m);
    const cpsc::CpscModel model = cpsc::fit(ds, {0.2, 2.0, 1e-8});
    Eigen::VectorXd x(3);
    for (int j = 0; j < 3; ++j) x[j] = 2.0 * rng.next_normal();
    const Eigen::VectorXd p = cpsc::predict_proba(model, x);
    Eigen::Index argmax;
    p.maxCoeff(&argmax);
    for (int y = 0; y < m; ++y) {
      const bool strict_max = y == argmax && (p.array() < p[argmax]).count() == m - 1;
      CHECK((cpsc::nonconformity_from_proba(p, y) < 0.5) == strict_max);
    }
  }
}

TEST_CASE("temperature preserves the argmax and flattens probability ratios") {
  Rng rng(24);
  for (int trial = 0; trial < 30; ++trial) {
    const Dataset ds = testutil::random_dataset(rng, 45, 4, 3);
    cpsc::CpscModel model = cpsc::fit(ds, {0.1, 1.0, 1e-8});
    Eigen::VectorXd x(4);
    for (int j = 0; j < 4; ++j) x[j] = 3.0 * rng.next_normal();

    const Eigen::VectorXd scores = cpsc::discriminatory_scores(model, x);
    Eigen::Index hi, lo;
    scores.maxCoeff(&hi);
    scores.minCoeff(&lo);
    const bool strict_gap = scores[hi] > scores[lo] + 1e-9;

    Eigen::Index ref = -1;
    double prev_ratio = std::numeric_limits<double>::infinity();
    for (const double t : {1.0, 10.0, 100.0}) {
      model.config.temperature = t;
      const Eigen::VectorXd p = cpsc::predict_proba(model, x);
      Eigen::Index argmax;
      p.maxCoeff(&argmax);
      if (ref < 0)
        ref = argmax;
      else
        CHECK(argmax == ref);

      // p_hi / p_lo = exp((score_hi - score_lo) / T) strictly shrinks in T.
      if (strict_gap) {
        const double ratio = p[hi] / p[lo];
        CHECK(ratio < prev_ratio);
        CHECK(ratio ==
              doctest::Approx(std::exp((scores[hi] - scores[lo]) / t)).epsilon(1e-9));
        prev_ratio = ratio;
      }
    }
  }
}

TEST_CASE("shrinkage is elementwise monotone in delta") {
  Rng rng(25);
  const Dataset ds = testutil::random_dataset(rng, 50, 5, 3);
  Eigen::MatrixXd prev_abs;
  for (const double delta : {0.0, 0.1, 0.2, 0.5, 1.0, 2.0}) {
    const cpsc::CpscModel model = cpsc::fit(ds, {delta, 1.0, 1e-8});
    Eigen::MatrixXd dprime(model.n_classes(), model.dim());
    for (int c = 0; c < model.n_classes(); ++c)
      dprime.row(c) = (model.shrunken_centroids.row(c) - model.overall_centroid.transpose())
                          .cwiseQuotient(model.pooled_scale.transpose());
    const Eigen::MatrixXd abs_now = dprime.cwiseAbs();
    if (prev_abs.size() > 0) CHECK(((abs_now.array() - prev_abs.array()) <= 1e-12).all());
    prev_abs = abs_now;
  }
}

TEST_CASE("delta 0 with equal priors reduces to nearest scaled centroid") {
  Rng rng(26);
  for (int trial = 0; trial < 20; ++trial) {
    const Dataset ds = testutil::random_dataset(rng, 40, 3, 2, 6.0);
    const cpsc::CpscModel model = cpsc::fit(ds, {0.0, 1.0, 1e-8});
    for (int probe = 0; probe < 10; ++probe) {
      Eigen::VectorXd x(3);
      for (int j = 0; j < 3; ++j) x[j] = 4.0 * rng.next_normal();
      Eigen::Index via_proba;
      cpsc::predict_proba(model, x).maxCoeff(&via_proba);

      // Brute-force oracle: smallest scale-normalized distance to a centroid.
      int nearest = 0;
      double best = std::numeric_limits<double>::infinity();
      for (int c = 0; c < 2; ++c) {
        const double dist =
            ((x - model.shrunken_centroids.row(c).transpose()).cwiseQuotient(model.pooled_scale))
                .squaredNorm();
        if (dist < best) {
          best = dist;
          nearest = c;
        }
      }
      CHECK(static_cast<int>(via_proba) == nearest);
    }
  }
}

TEST_CASE("fit is row-permutation invariant within tolerance") {
  Rng rng(27);
  const Dataset ds = testutil::random_dataset(rng, 64, 4, 3);
  std::vector<Eigen::Index> order(64);
  for (Eigen::Index i = 0; i < 64; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng shuffler(99);
  shuffler.shuffle(order);
  const Dataset shuffled = ds.subset(order);

  const cpsc::CpscModel a = cpsc::fit(ds, {0.1, 1.0, 1e-8});
  const cpsc::CpscModel b = cpsc::fit(shuffled, {0.1, 1.0, 1e-8});
  CHECK((a.shrunken_centroids - b.shrunken_centroids).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((a.pooled_scale - b.pooled_scale).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((a.log_priors - b.log_priors).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("fit input validation") {
  SUBCASE("single class is rejected") {
    const Dataset ds = testutil::make_dataset({{0}, {1}, {2}}, {0, 0, 0}, {"a"});
    CHECK_THROWS_AS(cpsc::fit(ds, {}), std::invalid_argument);
  }
  SUBCASE("n <= M is rejected") {
    const Dataset ds = testutil::make_dataset({{0}, {4}}, {0, 1}, {"a", "b"});
    CHECK_THROWS_AS(cpsc::fit(ds, {}), std::invalid_argument);
  }
  SUBCASE("declared class without samples is rejected") {
    const Dataset ds =
        testutil::make_dataset({{0}, {1}, {4}, {5}}, {0, 0, 1, 1}, {"a", "b", "ghost"});
    CHECK_THROWS_WITH_AS(cpsc::fit(ds, {}), doctest::Contains("ghost"), std::invalid_argument);
  }
  SUBCASE("dimension mismatch at inference is rejected") {
    const cpsc::CpscModel model = cpsc::fit(worked_example(), {});
    Eigen::VectorXd wide(2);
    wide << 1.0, 2.0;
    CHECK_THROWS_AS(cpsc::discriminatory_scores(model, wide), std::invalid_argument);
  }
  SUBCASE("nonconformity needs at least two classes") {
    Eigen::VectorXd lonely(1);
    lonely << 1.0;
    CHECK_THROWS_AS(cpsc::nonconformity_from_proba(lonely, 0), std::invalid_argument);
  }
}

TEST_CASE("constant feature is saved by the variance floor") {
  Dataset ds = testutil::make_dataset({{0.0, 1.0}, {2.0, 1.0}, {4.0, 1.0}, {6.0, 1.0}},
                                      {0, 0, 1, 1}, {"a", "b"});
  const cpsc::CpscModel model = cpsc::fit(ds, {0.0, 1.0, 1e-8});
  CHECK(model.pooled_scale[1] == doctest::Approx(1e-4).epsilon(1e-9));  // sqrt(1e-8)
  Eigen::VectorXd x(2);
  x << 1.0, 1.0;
  CHECK(std::isfinite(cpsc::predict_proba(model, x)[0]));
}

TEST_CASE("model json round trip is value-exact") {
  const cpsc::CpscModel model = cpsc::fit(worked_example(), {0.41421, 10.0, 1e-8});
  const cpsc::CpscModel back = cpsc::from_json(cpsc::to_json(model));
  CHECK((back.shrunken_centroids - model.shrunken_centroids).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.pooled_scale - model.pooled_scale).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.log_priors - model.log_priors).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.config.temperature == model.config.temperature);
  CHECK(back.label_space.classes() == model.label_space.classes());
}
