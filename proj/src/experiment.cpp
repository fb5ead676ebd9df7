#include "icpclean/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "icpclean/classifiers.hpp"
#include "icpclean/cpsc.hpp"
#include "icpclean/rng.hpp"

namespace icpclean::experiment {

namespace {

Dataset concat(const Dataset& a, const Dataset& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("cannot concat datasets of unequal width");
  Dataset out;
  out.label_space = a.label_space;
  out.features.resize(a.n() + b.n(), a.dim());
  out.features.topRows(a.n()) = a.features;
  out.features.bottomRows(b.n()) = b.features;
  out.labels.resize(a.n() + b.n());
  out.labels.head(a.n()) = a.labels;
  out.labels.tail(b.n()) = b.labels;
  out.sample_ids = a.sample_ids;
  out.sample_ids.insert(out.sample_ids.end(), b.sample_ids.begin(), b.sample_ids.end());
  return out;
}

struct FittedClassifier {
  std::optional<classifiers::LdaModel> lda;
  std::optional<classifiers::LrModel> lr;

  Eigen::VectorXi predict(const Eigen::MatrixXd& X) const {
    return lda ? classifiers::lda_predict(*lda, X) : classifiers::lr_predict(*lr, X);
  }
  Eigen::MatrixXd proba(const Eigen::MatrixXd& X) const {
    return lda ? classifiers::lda_predict_proba_batch(*lda, X)
               : classifiers::lr_predict_proba_batch(*lr, X);
  }
};

FittedClassifier fit_classifier(const std::string& name, const Dataset& train) {
  FittedClassifier fitted;
  if (name == "lda")
    fitted.lda = classifiers::lda_fit(train);
  else if (name == "lr")
    fitted.lr = classifiers::lr_fit(train);
  else
    throw std::invalid_argument("unknown classifier '" + name + "'");
  return fitted;
}

eval::MetricSet evaluate_on(const FittedClassifier& fitted, const Dataset& ds) {
  eval::MetricSet metrics;
  metrics.n_eval = static_cast<int>(ds.n());
  const Eigen::VectorXi pred = fitted.predict(ds.features);
  metrics.accuracy = eval::accuracy(pred, ds.labels);
  metrics.macro_f1 = eval::macro_f1(pred, ds.labels, ds.n_classes());
  if (ds.n_classes() == 2) {
    // Positive class = class id 1 (second name in the label space).
    const Eigen::MatrixXd proba = fitted.proba(ds.features);
    std::vector<double> scores(static_cast<std::size_t>(ds.n()));
    std::vector<int> truth(static_cast<std::size_t>(ds.n()));
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
      scores[static_cast<std::size_t>(i)] = proba(i, 1);
      truth[static_cast<std::size_t>(i)] = ds.labels[i] == 1 ? 1 : 0;
    }
    metrics.auroc = eval::auroc(scores, truth);
    metrics.auprc = eval::auprc(scores, truth);
  }
  return metrics;
}

double objective_value(Objective objective, const eval::MetricSet& metrics) {
  switch (objective) {
    case Objective::accuracy:
      return metrics.accuracy;
    case Objective::auroc_plus_auprc:
      if (!metrics.auroc || !metrics.auprc)
        throw std::invalid_argument("auroc_plus_auprc objective needs a binary task");
      return *metrics.auroc + *metrics.auprc;
    case Objective::accuracy_plus_macro_f1:
      return metrics.accuracy + metrics.macro_f1;
  }
  throw std::logic_error("unhandled objective");
}

}  // namespace

void SyntheticSpec::validate() const {
  if (n_classes < 1) throw std::invalid_argument("synthetic spec needs at least one class");
  if (n < 2 * static_cast<Eigen::Index>(n_classes))
    throw std::invalid_argument("synthetic spec needs n >= 2M");
  if (dims < 1) throw std::invalid_argument("synthetic spec needs dims >= 1");
  if (separation < 0.0) throw std::invalid_argument("separation must be >= 0");
  if (within_sd <= 0.0) throw std::invalid_argument("within_sd must be > 0");
  if (!weights.empty()) {
    if (static_cast<int>(weights.size()) != n_classes)
      throw std::invalid_argument("weights must have one entry per class");
    double sum = 0.0;
    for (const double w : weights) {
      if (w <= 0.0) throw std::invalid_argument("weights must be positive");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("weights must sum to 1");
  }
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  const int m = spec.n_classes;

  std::vector<double> weights = spec.weights;
  if (weights.empty()) weights.assign(static_cast<std::size_t>(m), 1.0 / m);

  // Largest-remainder class counts, then a seeded shuffle of the row order.
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(m), 0);
  std::vector<double> remainders(static_cast<std::size_t>(m), 0.0);
  Eigen::Index assigned = 0;
  for (int c = 0; c < m; ++c) {
    const double quota = static_cast<double>(spec.n) * weights[static_cast<std::size_t>(c)];
    counts[static_cast<std::size_t>(c)] = static_cast<Eigen::Index>(std::floor(quota));
    remainders[static_cast<std::size_t>(c)] = quota - std::floor(quota);
    assigned += counts[static_cast<std::size_t>(c)];
  }
  std::vector<int> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return remainders[static_cast<std::size_t>(a)] > remainders[static_cast<std::size_t>(b)];
  });
  for (std::size_t i = 0; assigned < spec.n; ++i, ++assigned)
    counts[static_cast<std::size_t>(order[i % order.size()])]++;

  std::vector<int> labels;
  labels.reserve(static_cast<std::size_t>(spec.n));
  for (int c = 0; c < m; ++c)
    labels.insert(labels.end(), static_cast<std::size_t>(counts[static_cast<std::size_t>(c)]), c);

  Rng rng(spec.seed);
  rng.shuffle(labels);

  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(m));
  for (int c = 0; c < m; ++c) names.push_back("c" + std::to_string(c));

  Dataset ds;
  ds.label_space = LabelSpace(names);
  ds.features.resize(spec.n, spec.dims);
  ds.labels.resize(spec.n);
  ds.sample_ids.reserve(static_cast<std::size_t>(spec.n));
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    ds.labels[i] = c;
    ds.sample_ids.push_back("s" + std::to_string(i));
    for (Eigen::Index j = 0; j < spec.dims; ++j) {
      const double mean = (j == static_cast<Eigen::Index>(c) % spec.dims) ? spec.separation : 0.0;
      ds.features(i, j) = mean + spec.within_sd * rng.next_normal();
    }
  }
  return ds;
}

void ExperimentConfig::validate() const {
  split.validate();
  if (noise_grid.empty() || threshold_grid.empty() || delta_grid.empty() ||
      temperature_grid.empty())
    throw std::invalid_argument("config grids must not be empty");
  for (const double f : noise_grid)
    if (f < 0.0 || f > 1.0) throw std::invalid_argument("noise fractions must lie in [0, 1]");
  for (const double t : threshold_grid)
    icp::CleaningPolicy{t, outlier_cutoff}.validate();
  for (const double d : delta_grid)
    if (d < 0.0) throw std::invalid_argument("delta grid entries must be >= 0");
  for (const double t : temperature_grid)
    if (t <= 0.0) throw std::invalid_argument("temperature grid entries must be > 0");
  if (variance_floor <= 0.0) throw std::invalid_argument("variance_floor must be > 0");
  if (classifiers.empty()) throw std::invalid_argument("classifier set must not be empty");
  for (const auto& name : classifiers)
    if (name != "lda" && name != "lr")
      throw std::invalid_argument("unknown classifier '" + name + "'");
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  if (preprocess.l1_select.enabled && preprocess.l1_select.c_grid.empty())
    throw std::invalid_argument("l1 selection is enabled but the C grid is empty");
  if (preprocess.smote.k_neighbors < 1)
    throw std::invalid_argument("smote k_neighbors must be >= 1");
  if (csv_path.empty()) synthetic.validate();
}

Dataset load_experiment_dataset(const ExperimentConfig& cfg) {
  if (!cfg.csv_path.empty()) return load_csv(cfg.csv_path, cfg.label_column);
  return generate_synthetic(cfg.synthetic);
}

std::string ScenarioKey::to_string() const {
  return "noise=" + detail::format_double(noise_fraction) +
         " threshold=" + detail::format_double(threshold) + " classifier=" + classifier;
}

RepeatOutcome run_repeat(const ExperimentConfig& cfg, const Dataset& ds, double noise_fraction,
                         double threshold, const std::string& classifier, int repeat_index) {
  const auto repeat = static_cast<std::uint64_t>(repeat_index);

  SplitSpec split_spec = cfg.split;
  split_spec.seed = derive_seed(cfg.base_seed, {repeat, seeds::kSplit});
  FourWaySplit parts = split(ds, split_spec);

  NoiseSpec noise{noise_fraction, cfg.noise_mode,
                  derive_seed(cfg.base_seed, {repeat, seeds::kNoise})};
  auto [noisy_proper, changed_mask] = permute_labels(parts.proper, noise);
  const Eigen::VectorXi true_proper_labels = parts.proper.labels;

  if (cfg.preprocess.standardize) {
    const auto stats = preprocess::standardize_fit(concat(noisy_proper, parts.calibration));
    noisy_proper = preprocess::standardize_apply(stats, noisy_proper);
    parts.calibration = preprocess::standardize_apply(stats, parts.calibration);
    parts.validation = preprocess::standardize_apply(stats, parts.validation);
    parts.test = preprocess::standardize_apply(stats, parts.test);
  }

  // C options: the L1 grid when enabled (first entry only when frozen),
  // otherwise a single "no mask" pass.
  std::vector<std::optional<double>> c_options;
  if (cfg.preprocess.l1_select.enabled) {
    if (cfg.freeze_c)
      c_options.push_back(cfg.preprocess.l1_select.c_grid.front());
    else
      for (const double c : cfg.preprocess.l1_select.c_grid) c_options.push_back(c);
  } else {
    c_options.push_back(std::nullopt);
  }

  struct MaskedParts {
    Dataset proper, calibration, validation, test;
    Dataset proper_fit;  // post-SMOTE view used to fit the nonconformity model
  };
  const std::uint64_t smote_proper_seed =
      derive_seed(cfg.base_seed, {repeat, seeds::kSmoteProper});
  const std::uint64_t smote_train_seed = derive_seed(cfg.base_seed, {repeat, seeds::kSmoteTrain});

  std::vector<MaskedParts> masked;
  masked.reserve(c_options.size());
  for (const auto& c : c_options) {
    MaskedParts mp;
    if (c) {
      const preprocess::FeatureMask mask = preprocess::l1_select(
          concat(noisy_proper, parts.calibration), *c);
      mp.proper = mask.apply(noisy_proper);
      mp.calibration = mask.apply(parts.calibration);
      mp.validation = mask.apply(parts.validation);
      mp.test = mask.apply(parts.test);
    } else {
      mp.proper = noisy_proper;
      mp.calibration = parts.calibration;
      mp.validation = parts.validation;
      mp.test = parts.test;
    }
    mp.proper_fit = cfg.preprocess.smote.enabled
                        ? preprocess::smote_oversample(
                              mp.proper, {true, cfg.preprocess.smote.k_neighbors,
                                          smote_proper_seed})
                        : mp.proper;
    masked.push_back(std::move(mp));
  }

  const icp::CleaningPolicy policy{threshold, cfg.outlier_cutoff};

  RepeatOutcome outcome;
  double best_objective = -std::numeric_limits<double>::infinity();
  bool have_best = false;

  const Eigen::Index n_real = noisy_proper.n();
  for (std::size_t ci = 0; ci < c_options.size(); ++ci) {
    const MaskedParts& mp = masked[ci];
    for (const double delta : cfg.delta_grid) {
      for (const double temperature : cfg.temperature_grid) {
        // The cleaning target is the proper set as the classifier would see
        // it, synthetic SMOTE rows included; the cleaning rules get to fix
        // oversampling artifacts as well as injected label noise.
        const cpsc::CpscModel model =
            cpsc::fit(mp.proper_fit, {delta, temperature, cfg.variance_floor});
        const icp::CalibrationScores cal = icp::calibrate(model, mp.calibration);
        const icp::PValueMatrix pvals = icp::p_values(model, cal, mp.proper_fit);
        auto [cleaned, report] = icp::clean(mp.proper_fit, pvals, policy);

        // Ground-truth bookkeeping covers the real samples only, which sit
        // at the front of the post-SMOTE proper set.
        icp::CleaningReport real_view;
        real_view.sample_ids.assign(report.sample_ids.begin(),
                                    report.sample_ids.begin() + n_real);
        real_view.verdicts.assign(report.verdicts.begin(), report.verdicts.begin() + n_real);
        report.correctness =
            icp::assess_correctness(real_view, mp.proper.labels, true_proper_labels);

        Dataset train = concat(cleaned, mp.calibration);
        if (cfg.preprocess.smote.enabled)
          train = preprocess::smote_oversample(
              train, {true, cfg.preprocess.smote.k_neighbors, smote_train_seed});

        const FittedClassifier fitted = fit_classifier(classifier, train);
        const eval::MetricSet val_metrics = evaluate_on(fitted, mp.validation);
        const double score = objective_value(cfg.objective, val_metrics);
        if (!have_best || score > best_objective) {
          have_best = true;
          best_objective = score;
          outcome.cleaned_validation = val_metrics;
          outcome.cleaned_test = evaluate_on(fitted, mp.test);
          outcome.chosen = {delta, temperature, c_options[ci]};
          outcome.report = std::move(report);
        }
      }
    }
  }

  // Baseline arm: identical preprocessing stages, no cleaning step. Its only
  // tunable is C when L1 selection is tuned.
  double best_baseline = -std::numeric_limits<double>::infinity();
  for (std::size_t ci = 0; ci < c_options.size(); ++ci) {
    const MaskedParts& mp = masked[ci];
    Dataset train = concat(mp.proper_fit, mp.calibration);
    if (cfg.preprocess.smote.enabled)
      train = preprocess::smote_oversample(
          train, {true, cfg.preprocess.smote.k_neighbors, smote_train_seed});
    const FittedClassifier fitted = fit_classifier(classifier, train);
    const eval::MetricSet val_metrics = evaluate_on(fitted, mp.validation);
    const double score = objective_value(cfg.objective, val_metrics);
    if (ci == 0 || score > best_baseline) {
      best_baseline = score;
      outcome.baseline_validation = val_metrics;
      outcome.baseline_test = evaluate_on(fitted, mp.test);
      outcome.baseline_c = c_options[ci];
    }
  }
  return outcome;
}

ScenarioResult run_scenario(const ExperimentConfig& cfg, const Dataset& ds,
                            const ScenarioKey& key) {
  ScenarioResult result;
  result.key = key;
  try {
    result.repeats.reserve(static_cast<std::size_t>(cfg.repeats));
    for (int r = 0; r < cfg.repeats; ++r)
      result.repeats.push_back(
          run_repeat(cfg, ds, key.noise_fraction, key.threshold, key.classifier, r));
  } catch (const std::exception& e) {
    result.failed = true;
    result.error = "[" + key.to_string() + "] " + e.what();
    result.repeats.clear();
  }
  return result;
}

SuiteResult run_suite(const ExperimentConfig& cfg) {
  cfg.validate();
  const Dataset ds = load_experiment_dataset(cfg);

  SuiteResult suite;
  suite.config = cfg;
  suite.class_names = ds.label_space.classes();
  for (const double noise : cfg.noise_grid) {
    for (const double threshold : cfg.threshold_grid) {
      for (const auto& classifier : cfg.classifiers) {
        ScenarioResult scenario =
            run_scenario(cfg, ds, ScenarioKey{noise, threshold, classifier});
        suite.n_failed += scenario.failed ? 1 : 0;
        suite.scenarios.push_back(std::move(scenario));
      }
    }
  }
  return suite;
}

namespace {

const char* objective_name(Objective o) {
  switch (o) {
    case Objective::accuracy:
      return "accuracy";
    case Objective::auroc_plus_auprc:
      return "auroc_plus_auprc";
    case Objective::accuracy_plus_macro_f1:
      return "accuracy_plus_macro_f1";
  }
  return "accuracy";
}

Objective objective_from_name(const std::string& name) {
  if (name == "accuracy") return Objective::accuracy;
  if (name == "auroc_plus_auprc") return Objective::auroc_plus_auprc;
  if (name == "accuracy_plus_macro_f1") return Objective::accuracy_plus_macro_f1;
  throw std::invalid_argument("unknown tuning objective '" + name + "'");
}

void require_keys(const nlohmann::json& doc, std::initializer_list<const char*> allowed,
                  const std::string& where) {
  for (const auto& [key, value] : doc.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* k) { return key == k; }) == allowed.end())
      throw std::invalid_argument("unknown key '" + key + "' in " + where);
  }
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& doc) {
  ExperimentConfig cfg;
  require_keys(doc,
               {"dataset", "split", "noise", "cleaning", "cpsc", "preprocess", "classifiers",
                "tuning_objective", "repeats", "base_seed"},
               "config");

  if (doc.contains("dataset")) {
    const auto& d = doc.at("dataset");
    require_keys(d, {"csv_path", "label_column", "synthetic"}, "dataset");
    if (d.contains("csv_path")) cfg.csv_path = d.at("csv_path").get<std::string>();
    if (d.contains("label_column")) cfg.label_column = d.at("label_column").get<std::string>();
    if (d.contains("synthetic")) {
      const auto& s = d.at("synthetic");
      require_keys(s, {"n", "dims", "classes", "separation", "within_sd", "weights", "seed"},
                   "dataset.synthetic");
      if (s.contains("n")) cfg.synthetic.n = s.at("n").get<Eigen::Index>();
      if (s.contains("dims")) cfg.synthetic.dims = s.at("dims").get<Eigen::Index>();
      if (s.contains("classes")) cfg.synthetic.n_classes = s.at("classes").get<int>();
      if (s.contains("separation")) cfg.synthetic.separation = s.at("separation").get<double>();
      if (s.contains("within_sd")) cfg.synthetic.within_sd = s.at("within_sd").get<double>();
      if (s.contains("weights")) cfg.synthetic.weights = s.at("weights").get<std::vector<double>>();
      if (s.contains("seed")) cfg.synthetic.seed = s.at("seed").get<std::uint64_t>();
    }
  }

  if (doc.contains("split")) {
    const auto& s = doc.at("split");
    require_keys(s, {"train_frac", "val_frac", "test_frac", "proper_frac", "stratified"}, "split");
    if (s.contains("train_frac")) cfg.split.train_frac = s.at("train_frac").get<double>();
    if (s.contains("val_frac")) cfg.split.val_frac = s.at("val_frac").get<double>();
    if (s.contains("test_frac")) cfg.split.test_frac = s.at("test_frac").get<double>();
    if (s.contains("proper_frac")) cfg.split.proper_frac = s.at("proper_frac").get<double>();
    if (s.contains("stratified")) cfg.split.stratified = s.at("stratified").get<bool>();
  }

  if (doc.contains("noise")) {
    const auto& n = doc.at("noise");
    require_keys(n, {"fractions", "mode"}, "noise");
    if (n.contains("fractions")) cfg.noise_grid = n.at("fractions").get<std::vector<double>>();
    if (n.contains("mode")) {
      const auto mode = n.at("mode").get<std::string>();
      if (mode == "shuffle")
        cfg.noise_mode = NoiseSpec::Mode::shuffle;
      else if (mode == "flip")
        cfg.noise_mode = NoiseSpec::Mode::flip;
      else
        throw std::invalid_argument("unknown noise mode '" + mode + "'");
    }
  }

  if (doc.contains("cleaning")) {
    const auto& c = doc.at("cleaning");
    require_keys(c, {"detection_thresholds", "outlier_cutoff"}, "cleaning");
    if (c.contains("detection_thresholds"))
      cfg.threshold_grid = c.at("detection_thresholds").get<std::vector<double>>();
    if (c.contains("outlier_cutoff")) cfg.outlier_cutoff = c.at("outlier_cutoff").get<double>();
  }

  if (doc.contains("cpsc")) {
    const auto& c = doc.at("cpsc");
    require_keys(c, {"delta_grid", "temperature_grid", "variance_floor"}, "cpsc");
    if (c.contains("delta_grid")) cfg.delta_grid = c.at("delta_grid").get<std::vector<double>>();
    if (c.contains("temperature_grid"))
      cfg.temperature_grid = c.at("temperature_grid").get<std::vector<double>>();
    if (c.contains("variance_floor")) cfg.variance_floor = c.at("variance_floor").get<double>();
  }

  if (doc.contains("preprocess")) {
    const auto& p = doc.at("preprocess");
    require_keys(p, {"standardize", "smote", "l1_select"}, "preprocess");
    if (p.contains("standardize")) cfg.preprocess.standardize = p.at("standardize").get<bool>();
    if (p.contains("smote")) {
      const auto& s = p.at("smote");
      require_keys(s, {"enabled", "k_neighbors"}, "preprocess.smote");
      if (s.contains("enabled")) cfg.preprocess.smote.enabled = s.at("enabled").get<bool>();
      if (s.contains("k_neighbors"))
        cfg.preprocess.smote.k_neighbors = s.at("k_neighbors").get<int>();
    }
    if (p.contains("l1_select")) {
      const auto& l = p.at("l1_select");
      require_keys(l, {"enabled", "c_grid", "freeze_c"}, "preprocess.l1_select");
      if (l.contains("enabled")) cfg.preprocess.l1_select.enabled = l.at("enabled").get<bool>();
      if (l.contains("c_grid"))
        cfg.preprocess.l1_select.c_grid = l.at("c_grid").get<std::vector<double>>();
      if (l.contains("freeze_c")) cfg.freeze_c = l.at("freeze_c").get<bool>();
    }
  }

  if (doc.contains("classifiers"))
    cfg.classifiers = doc.at("classifiers").get<std::vector<std::string>>();
  if (doc.contains("tuning_objective"))
    cfg.objective = objective_from_name(doc.at("tuning_objective").get<std::string>());
  if (doc.contains("repeats")) cfg.repeats = doc.at("repeats").get<int>();
  if (doc.contains("base_seed")) cfg.base_seed = doc.at("base_seed").get<std::uint64_t>();

  cfg.validate();
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json doc;
  nlohmann::json dataset;
  if (!cfg.csv_path.empty()) {
    dataset["csv_path"] = cfg.csv_path;
    dataset["label_column"] = cfg.label_column;
  } else {
    dataset["synthetic"] = {{"n", cfg.synthetic.n},
                            {"dims", cfg.synthetic.dims},
                            {"classes", cfg.synthetic.n_classes},
                            {"separation", cfg.synthetic.separation},
                            {"within_sd", cfg.synthetic.within_sd},
                            {"seed", cfg.synthetic.seed}};
    if (!cfg.synthetic.weights.empty())
      dataset["synthetic"]["weights"] = cfg.synthetic.weights;
  }
  doc["dataset"] = std::move(dataset);
  doc["split"] = {{"train_frac", cfg.split.train_frac},
                  {"val_frac", cfg.split.val_frac},
                  {"test_frac", cfg.split.test_frac},
                  {"proper_frac", cfg.split.proper_frac},
                  {"stratified", cfg.split.stratified}};
  doc["noise"] = {{"fractions", cfg.noise_grid},
                  {"mode", cfg.noise_mode == NoiseSpec::Mode::shuffle ? "shuffle" : "flip"}};
  doc["cleaning"] = {{"detection_thresholds", cfg.threshold_grid},
                     {"outlier_cutoff", cfg.outlier_cutoff}};
  doc["cpsc"] = {{"delta_grid", cfg.delta_grid},
                 {"temperature_grid", cfg.temperature_grid},
                 {"variance_floor", cfg.variance_floor}};
  doc["preprocess"] = {{"standardize", cfg.preprocess.standardize},
                       {"smote",
                        {{"enabled", cfg.preprocess.smote.enabled},
                         {"k_neighbors", cfg.preprocess.smote.k_neighbors}}},
                       {"l1_select",
                        {{"enabled", cfg.preprocess.l1_select.enabled},
                         {"c_grid", cfg.preprocess.l1_select.c_grid},
                         {"freeze_c", cfg.freeze_c}}}};
  doc["classifiers"] = cfg.classifiers;
  doc["tuning_objective"] = objective_name(cfg.objective);
  doc["repeats"] = cfg.repeats;
  doc["base_seed"] = cfg.base_seed;
  return doc;
}

}  // namespace icpclean::experiment
