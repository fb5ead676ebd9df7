#include <doctest.h>

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "icpclean/preprocess.hpp"
#include "test_helpers.hpp"

using namespace icpclean;

TEST_CASE("standardize zeroes a constant feature via the floor") {
  const Dataset ds =
      testutil::make_dataset({{1.0, 7.0}, {2.0, 7.0}, {3.0, 7.0}}, {0, 0, 1}, {"a", "b"});
  const auto s = preprocess::standardize_fit(ds);
  CHECK(s.scales[1] == doctest::Approx(1e-8));
  const Dataset z = preprocess::standardize_apply(s, ds);
  CHECK(z.features.col(1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("standardize on itself yields zero mean unit sd") {
  Rng rng(51);
  const Dataset ds = testutil::random_dataset(rng, 200, 4, 2);
  const auto [transformed, s] = preprocess::standardize_fit_apply(ds, {&ds});
  const Eigen::VectorXd means = transformed[0].features.colwise().mean();
  CHECK(means.cwiseAbs().maxCoeff() < 1e-10);
  for (Eigen::Index j = 0; j < 4; ++j) {
    const auto col = transformed[0].features.col(j);
    const double sd = std::sqrt(col.array().square().mean());
    CHECK(sd == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("standardize is not idempotent off the fixed point") {
  const Dataset ds = testutil::make_dataset({{10.0}, {12.0}, {14.0}}, {0, 0, 1}, {"a", "b"});
  const auto s = preprocess::standardize_fit(ds);
  const Dataset once = preprocess::standardize_apply(s, ds);
  const Dataset twice = preprocess::standardize_apply(s, once);
  CHECK((once.features - twice.features).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("smote synthetics stay on the segment between the two minority points") {
  const Dataset ds = testutil::make_dataset(
      {{0.0, 0.0}, {1.0, 1.0}, {5.0, 0.0}, {5.0, 1.0}, {6.0, 0.0}, {6.0, 1.0}},
      {0, 0, 1, 1, 1, 1}, {"minority", "majority"});
  const Dataset out = preprocess::smote_oversample(ds, {true, 1, 7});
  REQUIRE(out.n() == 8);
  for (Eigen::Index i = 6; i < 8; ++i) {
    CHECK(out.labels[i] == 0);
    CHECK(out.features(i, 0) == doctest::Approx(out.features(i, 1)).epsilon(1e-12));
    CHECK(out.features(i, 0) >= 0.0);
    CHECK(out.features(i, 0) <= 1.0);
  }
}

TEST_CASE("smote leaves a balanced dataset unchanged") {
  Rng rng(52);
  const Dataset ds = testutil::random_dataset(rng, 40, 3, 2);
  const Dataset out = preprocess::smote_oversample(ds, {true, 5, 1});
  CHECK(out.n() == ds.n());
  CHECK((out.features - ds.features).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("smote reaches parity and keeps originals as a prefix") {
  Rng rng(53);
  Dataset ds = testutil::random_dataset(rng, 100, 3, 2);
  for (Eigen::Index i = 0; i < 100; ++i) ds.labels[i] = i < 90 ? 0 : 1;  // 90/10
  const Dataset out = preprocess::smote_oversample(ds, {true, 5, 9});
  CHECK(out.n() == 180);
  const Eigen::VectorXi counts = out.class_counts();
  CHECK(counts[0] == 90);
  CHECK(counts[1] == 90);
  CHECK((out.features.topRows(100) - ds.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK(out.sample_ids[99] == ds.sample_ids[99]);
  CHECK(out.sample_ids[100].substr(0, 6) == "smote_");
}

TEST_CASE("every smote synthetic lies on a segment between two minority members") {
  Rng rng(54);
  Dataset ds = testutil::random_dataset(rng, 30, 3, 2);
  for (Eigen::Index i = 0; i < 30; ++i) ds.labels[i] = i < 8 ? 0 : 1;
  const Dataset out = preprocess::smote_oversample(ds, {true, 3, 11});

  for (Eigen::Index s = 30; s < out.n(); ++s) {
    const Eigen::VectorXd point = out.features.row(s).transpose();
    bool on_some_segment = false;
    for (Eigen::Index i = 0; i < 8 && !on_some_segment; ++i) {
      for (Eigen::Index j = 0; j < 8 && !on_some_segment; ++j) {
        if (i == j) continue;
        const Eigen::VectorXd a = ds.features.row(i).transpose();
        const Eigen::VectorXd b = ds.features.row(j).transpose();
        const Eigen::VectorXd dir = b - a;
        const double t = dir.dot(point - a) / dir.squaredNorm();
        if (t < -1e-12 || t > 1.0 + 1e-12) continue;
        if ((point - (a + t * dir)).norm() < 1e-9) on_some_segment = true;
      }
    }
    CHECK(on_some_segment);
  }
}

TEST_CASE("smote rejects a singleton minority class") {
  Dataset ds = testutil::make_dataset({{0.0}, {1.0}, {2.0}, {3.0}}, {0, 1, 1, 1}, {"a", "b"});
  CHECK_THROWS_AS(preprocess::smote_oversample(ds, {true, 5, 1}), std::invalid_argument);
}

TEST_CASE("smote is deterministic per seed") {
  Rng rng(55);
  Dataset ds = testutil::random_dataset(rng, 60, 2, 2);
  for (Eigen::Index i = 0; i < 60; ++i) ds.labels[i] = i < 45 ? 0 : 1;
  const Dataset a = preprocess::smote_oversample(ds, {true, 5, 31});
  const Dataset b = preprocess::smote_oversample(ds, {true, 5, 31});
  CHECK((a.features - b.features).cwiseAbs().maxCoeff() == 0.0);
}

namespace {

// Blobs whose class means differ only in the first two coordinates; the
// remaining features are pure noise.
Dataset informative_blobs(Rng& rng, Eigen::Index n, Eigen::Index noise_dims,
                          bool duplicate_informative = false) {
  const Eigen::Index d = 2 + noise_dims + (duplicate_informative ? 1 : 0);
  Dataset ds;
  ds.label_space = LabelSpace({"neg", "pos"});
  ds.features.resize(n, d);
  ds.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % 2);
    ds.labels[i] = c;
    ds.features(i, 0) = (c == 0 ? -2.0 : 2.0) + rng.next_normal();
    ds.features(i, 1) = (c == 0 ? 1.5 : -1.5) + rng.next_normal();
    for (Eigen::Index j = 2; j < 2 + noise_dims; ++j) ds.features(i, j) = rng.next_normal();
    if (duplicate_informative) ds.features(i, d - 1) = ds.features(i, 0);
    ds.sample_ids.push_back(std::to_string(i));
  }
  return ds;
}

}  // namespace

TEST_CASE("l1 selection keeps the informative features") {
  Rng rng(56);
  const Dataset ds = informative_blobs(rng, 400, 8);
  const preprocess::FeatureMask mask = preprocess::l1_select(ds, 1.0);
  CHECK(mask.selected[0]);
  CHECK(mask.selected[1]);
  CHECK(mask.count() < 10);  // the pure-noise block is mostly dropped
  CHECK(mask.source_c == 1.0);
}

TEST_CASE("weak penalty keeps a superset of the strong-penalty mask") {
  Rng rng(57);
  const Dataset ds = informative_blobs(rng, 400, 8);
  const preprocess::FeatureMask strong = preprocess::l1_select(ds, 1.0);
  const preprocess::FeatureMask weak = preprocess::l1_select(ds, 1e6);
  for (std::size_t j = 0; j < strong.selected.size(); ++j)
    if (strong.selected[j]) CHECK(weak.selected[j]);
  CHECK(weak.count() >= strong.count());
}

TEST_CASE("a duplicated informative feature keeps at least one copy") {
  Rng rng(58);
  const Dataset ds = informative_blobs(rng, 400, 4, true);
  const preprocess::FeatureMask mask = preprocess::l1_select(ds, 1.0);
  CHECK((mask.selected[0] || mask.selected[static_cast<std::size_t>(ds.dim() - 1)]));
}

TEST_CASE("overwhelming penalty reports an actionable error") {
  Rng rng(59);
  const Dataset ds = informative_blobs(rng, 100, 2);
  CHECK_THROWS_WITH_AS(preprocess::l1_select(ds, 1e-9), doctest::Contains("increase c"),
                       std::runtime_error);
}

TEST_CASE("l1 selection is deterministic") {
  Rng rng(60);
  const Dataset ds = informative_blobs(rng, 200, 6);
  const auto a = preprocess::l1_select(ds, 0.1);
  const auto b = preprocess::l1_select(ds, 0.1);
  CHECK(a.selected == b.selected);
}

TEST_CASE("mask application commutes with row subsetting") {
  Rng rng(61);
  const Dataset ds = informative_blobs(rng, 50, 4);
  const preprocess::FeatureMask mask = preprocess::l1_select(ds, 1.0);
  const std::vector<Eigen::Index> rows{3, 9, 17, 40};
  const Dataset a = mask.apply(ds).subset(rows);
  const Dataset b = mask.apply(ds.subset(rows));
  CHECK((a.features - b.features).cwiseAbs().maxCoeff() == 0.0);
  CHECK(testutil::same_labels(a.labels, b.labels));
}

TEST_CASE("multi-class selection runs one-vs-rest") {
  Rng rng(62);
  Dataset ds = testutil::random_dataset(rng, 240, 5, 3, 4.0);
  const preprocess::FeatureMask mask = preprocess::l1_select(ds, 1.0);
  CHECK(mask.selected[0]);  // the class-separating axis survives
}

TEST_CASE("feature mask json round trip") {
  preprocess::FeatureMask mask;
  mask.selected = {true, false, true, false};
  mask.source_c = 0.1;
  const preprocess::FeatureMask back = preprocess::mask_from_json(preprocess::mask_to_json(mask), 4);
  CHECK(back.selected == mask.selected);
  CHECK(back.source_c == 0.1);
  CHECK_THROWS_AS(preprocess::mask_from_json(preprocess::mask_to_json(mask), 2),
                  std::invalid_argument);
}
