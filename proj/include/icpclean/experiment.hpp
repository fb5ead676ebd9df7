#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "icpclean/dataset.hpp"
#include "icpclean/evaluation.hpp"
#include "icpclean/icp.hpp"
#include "icpclean/preprocess.hpp"
#include "icpclean/rng.hpp"

namespace icpclean::experiment {

struct SyntheticSpec {
  Eigen::Index n = 1000;
  Eigen::Index dims = 20;
  int n_classes = 2;
  double separation = 4.0;  // scale of the class-mean basis directions
  double within_sd = 1.0;
  std::vector<double> weights;  // empty = uniform
  std::uint64_t seed = 0;

  void validate() const;
};

/// Isotropic Gaussian blobs with class m centered at
/// separation * e_(m mod dims). Class sizes follow the weights with
/// largest-remainder rounding; rows are shuffled, ids are s0..s(n-1) and
/// class names c0..c(M-1).
Dataset generate_synthetic(const SyntheticSpec& spec);

enum class Objective { accuracy, auroc_plus_auprc, accuracy_plus_macro_f1 };

// Documented seed-mixing scheme: every randomized stage of repeat r draws
// from derive_seed(base_seed, {r, stage_tag}). Both experiment arms share
// these streams; nothing is reseeded between grid points.
namespace seeds {
constexpr std::uint64_t kSplit = 1;
constexpr std::uint64_t kNoise = 2;
constexpr std::uint64_t kSmoteProper = 3;
constexpr std::uint64_t kSmoteTrain = 4;
}  // namespace seeds

struct ExperimentConfig {
  // Dataset source: a CSV path, or the synthetic generator when empty.
  std::string csv_path;
  std::string label_column = "label";
  SyntheticSpec synthetic;

  SplitSpec split;  // its seed field is ignored; per-repeat seeds are derived
  std::vector<double> noise_grid{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8};
  NoiseSpec::Mode noise_mode = NoiseSpec::Mode::shuffle;
  std::vector<double> threshold_grid{0.8, 0.5, 0.2};
  double outlier_cutoff = 0.1;
  std::vector<double> delta_grid{0.0, 0.1, 0.2, 0.3};
  std::vector<double> temperature_grid{1.0, 10.0, 100.0};
  double variance_floor = 1e-8;
  preprocess::PreprocessConfig preprocess;
  bool freeze_c = false;  // pin C to the first grid entry instead of tuning it
  std::vector<std::string> classifiers{"lda", "lr"};
  Objective objective = Objective::accuracy;
  int repeats = 30;
  std::uint64_t base_seed = 0;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct ChosenHyperparams {
  double delta = 0.0;
  double temperature = 1.0;
  std::optional<double> c;
};

struct RepeatOutcome {
  eval::MetricSet cleaned_validation;
  eval::MetricSet cleaned_test;
  eval::MetricSet baseline_validation;
  eval::MetricSet baseline_test;
  ChosenHyperparams chosen;           // winning cleaned-arm grid point
  std::optional<double> baseline_c;   // winning baseline C when L1 is tuned
  icp::CleaningReport report;         // from the winning grid point
};

struct ScenarioKey {
  double noise_fraction = 0.0;
  double threshold = 0.5;
  std::string classifier;

  std::string to_string() const;
};

struct ScenarioResult {
  ScenarioKey key;
  std::vector<RepeatOutcome> repeats;
  bool failed = false;
  std::string error;
};

/// One paired repeat: split, pollute, preprocess, tune the cleaned pipeline
/// on validation, and evaluate both arms. Cleaned and baseline arms share
/// split, permutation, preprocessing and derived seeds; only the cleaning
/// stage differs, and the baseline never touches calibration p-values.
RepeatOutcome run_repeat(const ExperimentConfig& cfg, const Dataset& ds, double noise_fraction,
                         double threshold, const std::string& classifier, int repeat_index);

/// All repeats of one (noise, threshold, classifier) cell. Exceptions are
/// reported with the scenario key attached.
ScenarioResult run_scenario(const ExperimentConfig& cfg, const Dataset& ds,
                            const ScenarioKey& key);

struct SuiteResult {
  ExperimentConfig config;
  std::vector<std::string> class_names;
  std::vector<ScenarioResult> scenarios;
  int n_failed = 0;
};

Dataset load_experiment_dataset(const ExperimentConfig& cfg);

/// Full Cartesian product noise grid x threshold grid x classifier set.
/// Scenario failures are recorded and the suite continues.
SuiteResult run_suite(const ExperimentConfig& cfg);

/// Emits metrics.csv, summary.json, cleaning_counts.csv and plotdata/*.csv
/// under out_dir. Identical suites produce byte-identical files.
void write_suite_outputs(const SuiteResult& suite, const std::string& out_dir);

/// Renders the summary.json in out_dir as a human-readable table.
std::string render_report(const std::string& out_dir);

}  // namespace icpclean::experiment
