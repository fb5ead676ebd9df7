// Command-line surface for the conformal label-cleaning toolkit: synthetic
// data generation, splitting, noise injection, cleaning, training/eval and
// the full repeated-experiment suite.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "icpclean/classifiers.hpp"
#include "icpclean/cpsc.hpp"
#include "icpclean/dataset.hpp"
#include "icpclean/evaluation.hpp"
#include "icpclean/experiment.hpp"
#include "icpclean/icp.hpp"

namespace fs = std::filesystem;
using namespace icpclean;

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitDataError = 3;
constexpr int kExitPartialFailure = 4;

void write_json(const nlohmann::json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file '" + path + "'");
  out << doc.dump(2) << '\n';
}

int run_synth(const experiment::SyntheticSpec& spec, const std::string& out_path) {
  save_csv(experiment::generate_synthetic(spec), out_path);
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

int run_split(const std::string& data_path, const std::string& label_column,
              const SplitSpec& spec, const std::string& out_dir) {
  const Dataset ds = load_csv(data_path, label_column);
  const FourWaySplit parts = split(ds, spec);
  for (const auto& warning : parts.warnings) std::cerr << "warning: " << warning << '\n';
  fs::create_directories(out_dir);
  save_csv(parts.proper, (fs::path(out_dir) / "proper.csv").string(), label_column);
  save_csv(parts.calibration, (fs::path(out_dir) / "calibration.csv").string(), label_column);
  save_csv(parts.validation, (fs::path(out_dir) / "validation.csv").string(), label_column);
  save_csv(parts.test, (fs::path(out_dir) / "test.csv").string(), label_column);
  write_json(split_manifest(parts), (fs::path(out_dir) / "manifest.json").string());
  std::cout << "wrote 4 parts + manifest under " << out_dir << '\n';
  return 0;
}

int run_permute(const std::string& data_path, const std::string& label_column,
                const NoiseSpec& spec, const std::string& out_path,
                const std::string& audit_path) {
  const Dataset ds = load_csv(data_path, label_column);
  const auto [noisy, changed] = permute_labels(ds, spec);
  save_csv(noisy, out_path, label_column);
  if (!audit_path.empty()) {
    std::ofstream audit(audit_path);
    if (!audit) throw std::runtime_error("cannot write file '" + audit_path + "'");
    audit << "id,original,permuted,changed\n";
    for (Eigen::Index i = 0; i < ds.n(); ++i) {
      audit << ds.sample_ids[static_cast<std::size_t>(i)] << ','
            << ds.label_space.name_of(ds.labels[i]) << ','
            << noisy.label_space.name_of(noisy.labels[i]) << ','
            << (changed[static_cast<std::size_t>(i)] ? 1 : 0) << '\n';
    }
  }
  std::cout << "wrote " << out_path << '\n';
  return 0;
}

int run_clean(const std::string& proper_path, const std::string& calibration_path,
              const std::string& label_column, const cpsc::CpscConfig& cpsc_cfg,
              const icp::CleaningPolicy& policy, const std::string& truth_path,
              const std::string& report_path, const std::string& cleaned_path) {
  const Dataset proper = load_csv(proper_path, label_column);
  const Dataset calibration = load_csv(calibration_path, label_column, &proper.label_space);

  const cpsc::CpscModel model = cpsc::fit(proper, cpsc_cfg);
  const icp::CalibrationScores cal = icp::calibrate(model, calibration);
  const icp::PValueMatrix pvals = icp::p_values(model, cal, proper);
  auto [cleaned, report] = icp::clean(proper, pvals, policy);

  if (!truth_path.empty()) {
    const Dataset truth = load_csv(truth_path, label_column, &proper.label_space);
    std::unordered_map<std::string, int> truth_by_id;
    for (Eigen::Index i = 0; i < truth.n(); ++i)
      truth_by_id[truth.sample_ids[static_cast<std::size_t>(i)]] = truth.labels[i];
    Eigen::VectorXi true_labels(proper.n());
    for (Eigen::Index i = 0; i < proper.n(); ++i) {
      const auto it = truth_by_id.find(proper.sample_ids[static_cast<std::size_t>(i)]);
      if (it == truth_by_id.end())
        throw std::runtime_error("truth file misses sample id '" +
                                 proper.sample_ids[static_cast<std::size_t>(i)] + "'");
      true_labels[i] = it->second;
    }
    report.correctness = icp::assess_correctness(report, proper.labels, true_labels);
  }

  write_json(icp::report_to_json(report, proper.label_space), report_path);
  if (!cleaned_path.empty()) save_csv(cleaned, cleaned_path, label_column);
  std::cout << "corrections=" << report.corrections_total << " outliers=" << report.outliers_total
            << " kept=" << cleaned.n() << '\n';
  return 0;
}

int run_train_eval(const std::string& train_path, const std::string& eval_path,
                   const std::string& label_column, const std::string& classifier,
                   const std::string& out_path) {
  const Dataset train = load_csv(train_path, label_column);
  const Dataset eval_ds = load_csv(eval_path, label_column, &train.label_space);

  Eigen::VectorXi pred;
  Eigen::MatrixXd proba;
  if (classifier == "lda") {
    const auto model = classifiers::lda_fit(train);
    pred = classifiers::lda_predict(model, eval_ds.features);
    proba = classifiers::lda_predict_proba_batch(model, eval_ds.features);
  } else if (classifier == "lr") {
    const auto model = classifiers::lr_fit(train);
    if (!model.converged) std::cerr << "warning: lr solver did not reach tolerance\n";
    pred = classifiers::lr_predict(model, eval_ds.features);
    proba = classifiers::lr_predict_proba_batch(model, eval_ds.features);
  } else {
    throw std::invalid_argument("unknown classifier '" + classifier + "'");
  }

  nlohmann::json metrics;
  metrics["accuracy"] = eval::accuracy(pred, eval_ds.labels);
  metrics["macro_f1"] = eval::macro_f1(pred, eval_ds.labels, eval_ds.n_classes());
  metrics["n_eval"] = eval_ds.n();
  if (eval_ds.n_classes() == 2) {
    std::vector<double> scores(static_cast<std::size_t>(eval_ds.n()));
    std::vector<int> truth(static_cast<std::size_t>(eval_ds.n()));
    for (Eigen::Index i = 0; i < eval_ds.n(); ++i) {
      scores[static_cast<std::size_t>(i)] = proba(i, 1);
      truth[static_cast<std::size_t>(i)] = eval_ds.labels[i] == 1 ? 1 : 0;
    }
    metrics["auroc"] = eval::auroc(scores, truth);
    metrics["auprc"] = eval::auprc(scores, truth);
  }
  if (out_path.empty())
    std::cout << metrics.dump(2) << '\n';
  else
    write_json(metrics, out_path);
  return 0;
}

int run_suite_cmd(const std::string& config_path, const std::string& out_dir) {
  std::ifstream in(config_path);
  if (!in) throw std::invalid_argument("cannot open config '" + config_path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config parse error: " + std::string(e.what()));
  }
  const experiment::ExperimentConfig cfg = experiment::config_from_json(doc);
  const experiment::SuiteResult suite = experiment::run_suite(cfg);
  experiment::write_suite_outputs(suite, out_dir);
  std::cout << "suite finished: " << suite.scenarios.size() << " scenarios, " << suite.n_failed
            << " failed; outputs under " << out_dir << '\n';
  return suite.n_failed > 0 ? kExitPartialFailure : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal-prediction label cleaning toolkit"};
  app.require_subcommand(1);

  // synth
  experiment::SyntheticSpec synth_spec;
  std::string synth_out = "synthetic.csv";
  std::vector<double> synth_weights;
  auto* synth = app.add_subcommand("synth", "Generate a Gaussian-blob dataset CSV");
  synth->add_option("--n", synth_spec.n, "Number of samples");
  synth->add_option("--dims", synth_spec.dims, "Feature dimensionality");
  synth->add_option("--classes", synth_spec.n_classes, "Number of classes");
  synth->add_option("--separation", synth_spec.separation, "Class-mean separation");
  synth->add_option("--within-sd", synth_spec.within_sd, "Within-class standard deviation");
  synth->add_option("--weights", synth_weights, "Class weights (must sum to 1)");
  synth->add_option("--seed", synth_spec.seed, "Generator seed");
  synth->add_option("--out", synth_out, "Output CSV path");

  // split
  std::string split_data, split_out = "splits";
  std::string split_label = "label";
  SplitSpec split_spec;
  auto* split_cmd = app.add_subcommand("split", "Partition a CSV into proper/calibration/validation/test");
  split_cmd->add_option("--data", split_data, "Input CSV")->required();
  split_cmd->add_option("--label-column", split_label, "Label column name");
  split_cmd->add_option("--train", split_spec.train_frac, "Train fraction");
  split_cmd->add_option("--val", split_spec.val_frac, "Validation fraction");
  split_cmd->add_option("--test", split_spec.test_frac, "Test fraction");
  split_cmd->add_option("--proper", split_spec.proper_frac, "Proper share of train");
  split_cmd->add_flag("--stratified,!--no-stratified", split_spec.stratified, "Stratify by class");
  split_cmd->add_option("--seed", split_spec.seed, "Split seed");
  split_cmd->add_option("--out-dir", split_out, "Output directory");

  // permute
  std::string permute_data, permute_out = "permuted.csv", permute_audit;
  std::string permute_label = "label";
  std::string permute_mode = "shuffle";
  NoiseSpec noise_spec;
  auto* permute_cmd = app.add_subcommand("permute", "Inject label noise into a CSV");
  permute_cmd->add_option("--data", permute_data, "Input CSV")->required();
  permute_cmd->add_option("--label-column", permute_label, "Label column name");
  permute_cmd->add_option("--fraction", noise_spec.fraction, "Fraction of labels to disturb");
  permute_cmd->add_option("--mode", permute_mode, "shuffle | flip")
      ->check(CLI::IsMember({"shuffle", "flip"}));
  permute_cmd->add_option("--seed", noise_spec.seed, "Noise seed");
  permute_cmd->add_option("--out", permute_out, "Output CSV path");
  permute_cmd->add_option("--audit-out", permute_audit, "Optional per-sample audit CSV");

  // clean
  std::string clean_proper, clean_cal, clean_truth;
  std::string clean_label = "label";
  std::string clean_report = "cleaning_report.json", clean_out;
  cpsc::CpscConfig clean_cpsc;
  icp::CleaningPolicy clean_policy;
  auto* clean_cmd = app.add_subcommand("clean", "Detect and correct wrong labels and outliers");
  clean_cmd->add_option("--proper", clean_proper, "Noisy proper training CSV")->required();
  clean_cmd->add_option("--calibration", clean_cal, "Trusted calibration CSV")->required();
  clean_cmd->add_option("--label-column", clean_label, "Label column name");
  clean_cmd->add_option("--delta", clean_cpsc.delta, "Shrinkage soft threshold");
  clean_cmd->add_option("--temperature", clean_cpsc.temperature, "Softmax temperature");
  clean_cmd->add_option("--variance-floor", clean_cpsc.variance_floor, "Pooled variance floor");
  clean_cmd->add_option("--threshold", clean_policy.detection_threshold,
                        "Wrong-label detection threshold");
  clean_cmd->add_option("--cutoff", clean_policy.outlier_cutoff, "Outlier p-value cutoff");
  clean_cmd->add_option("--truth", clean_truth, "Ground-truth CSV for correctness bookkeeping");
  clean_cmd->add_option("--report-out", clean_report, "Cleaning report JSON path");
  clean_cmd->add_option("--cleaned-out", clean_out, "Cleaned dataset CSV path");

  // train-eval
  std::string te_train, te_eval, te_out;
  std::string te_label = "label";
  std::string te_classifier = "lr";
  auto* te_cmd = app.add_subcommand("train-eval", "Train a classifier and report metrics");
  te_cmd->add_option("--train", te_train, "Training CSV")->required();
  te_cmd->add_option("--eval", te_eval, "Evaluation CSV")->required();
  te_cmd->add_option("--label-column", te_label, "Label column name");
  te_cmd->add_option("--classifier", te_classifier, "lda | lr")
      ->check(CLI::IsMember({"lda", "lr"}));
  te_cmd->add_option("--out", te_out, "Metrics JSON path (default: stdout)");

  // suite
  std::string suite_config, suite_out = "suite_out";
  auto* suite_cmd = app.add_subcommand("suite", "Run the full repeated-experiment suite");
  suite_cmd->add_option("--config", suite_config, "Experiment config JSON")->required();
  suite_cmd->add_option("--out", suite_out, "Output directory");

  // report
  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "Render a suite output directory as a table");
  report_cmd->add_option("dir", report_dir, "Suite output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (synth->parsed()) {
      synth_spec.weights = synth_weights;
      return run_synth(synth_spec, synth_out);
    }
    if (split_cmd->parsed()) return run_split(split_data, split_label, split_spec, split_out);
    if (permute_cmd->parsed()) {
      noise_spec.mode =
          permute_mode == "flip" ? NoiseSpec::Mode::flip : NoiseSpec::Mode::shuffle;
      return run_permute(permute_data, permute_label, noise_spec, permute_out, permute_audit);
    }
    if (clean_cmd->parsed())
      return run_clean(clean_proper, clean_cal, clean_label, clean_cpsc, clean_policy,
                       clean_truth, clean_report, clean_out);
    if (te_cmd->parsed()) return run_train_eval(te_train, te_eval, te_label, te_classifier, te_out);
    if (suite_cmd->parsed()) return run_suite_cmd(suite_config, suite_out);
    if (report_cmd->parsed()) {
      std::cout << experiment::render_report(report_dir);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return 0;
}
