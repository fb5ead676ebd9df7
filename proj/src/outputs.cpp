#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "icpclean/experiment.hpp"

namespace icpclean::experiment {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) { return detail::format_double(v); }

void metric_rows(std::ofstream& out, const ScenarioKey& key, int repeat, const char* arm,
                 const char* split, const eval::MetricSet& m) {
  const auto row = [&](const char* name, double value) {
    out << fmt(key.noise_fraction) << ',' << fmt(key.threshold) << ',' << key.classifier << ','
        << repeat << ',' << arm << ',' << split << ',' << name << ',' << fmt(value) << '\n';
  };
  row("accuracy", m.accuracy);
  row("macro_f1", m.macro_f1);
  if (m.auroc) row("auroc", *m.auroc);
  if (m.auprc) row("auprc", *m.auprc);
}

struct MetricPull {
  const char* split;
  const char* name;
  double (*get)(const eval::MetricSet&);
  bool (*present)(const eval::MetricSet&);
};

const MetricPull kPulls[] = {
    {"validation", "accuracy", [](const eval::MetricSet& m) { return m.accuracy; },
     [](const eval::MetricSet&) { return true; }},
    {"validation", "macro_f1", [](const eval::MetricSet& m) { return m.macro_f1; },
     [](const eval::MetricSet&) { return true; }},
    {"validation", "auroc", [](const eval::MetricSet& m) { return *m.auroc; },
     [](const eval::MetricSet& m) { return m.auroc.has_value(); }},
    {"validation", "auprc", [](const eval::MetricSet& m) { return *m.auprc; },
     [](const eval::MetricSet& m) { return m.auprc.has_value(); }},
    {"test", "accuracy", [](const eval::MetricSet& m) { return m.accuracy; },
     [](const eval::MetricSet&) { return true; }},
    {"test", "macro_f1", [](const eval::MetricSet& m) { return m.macro_f1; },
     [](const eval::MetricSet&) { return true; }},
    {"test", "auroc", [](const eval::MetricSet& m) { return *m.auroc; },
     [](const eval::MetricSet& m) { return m.auroc.has_value(); }},
    {"test", "auprc", [](const eval::MetricSet& m) { return *m.auprc; },
     [](const eval::MetricSet& m) { return m.auprc.has_value(); }},
};

const eval::MetricSet& pick(const RepeatOutcome& r, bool cleaned, bool validation) {
  if (cleaned) return validation ? r.cleaned_validation : r.cleaned_test;
  return validation ? r.baseline_validation : r.baseline_test;
}

nlohmann::json comparison_json(const eval::PairedComparison& cmp) {
  return nlohmann::json{{"mean_cleaned", cmp.mean_a},
                        {"mean_baseline", cmp.mean_b},
                        {"mean_diff", cmp.mean_diff},
                        {"ci95_cleaned", {cmp.ci95_a[0], cmp.ci95_a[1]}},
                        {"ci95_baseline", {cmp.ci95_b[0], cmp.ci95_b[1]}},
                        {"t", cmp.t_stat},
                        {"p", cmp.p_value},
                        {"n_pairs", cmp.n_pairs},
                        {"degenerate_variance", cmp.degenerate},
                        {"stars", cmp.stars}};
}

}  // namespace

void write_suite_outputs(const SuiteResult& suite, const std::string& out_dir) {
  fs::create_directories(out_dir);
  fs::create_directories(fs::path(out_dir) / "plotdata");

  // metrics.csv: one row per scenario x repeat x arm x split x metric.
  {
    std::ofstream out(fs::path(out_dir) / "metrics.csv");
    out << "noise,threshold,classifier,repeat,arm,split,metric,value\n";
    for (const auto& sc : suite.scenarios) {
      for (std::size_t r = 0; r < sc.repeats.size(); ++r) {
        const auto& rep = sc.repeats[r];
        const int ri = static_cast<int>(r);
        metric_rows(out, sc.key, ri, "cleaned", "validation", rep.cleaned_validation);
        metric_rows(out, sc.key, ri, "cleaned", "test", rep.cleaned_test);
        metric_rows(out, sc.key, ri, "baseline", "validation", rep.baseline_validation);
        metric_rows(out, sc.key, ri, "baseline", "test", rep.baseline_test);
      }
    }
  }

  // cleaning_counts.csv: per-repeat cleaning diagnostics of the winning
  // grid point, including ground-truth correctness bookkeeping.
  {
    std::ofstream out(fs::path(out_dir) / "cleaning_counts.csv");
    out << "noise,threshold,classifier,repeat,corrections_total";
    for (const auto& name : suite.class_names) out << ",corrections_" << name;
    out << ",outliers,wrong_before,wrong_after,chosen_delta,chosen_temperature,chosen_c\n";
    for (const auto& sc : suite.scenarios) {
      for (std::size_t r = 0; r < sc.repeats.size(); ++r) {
        const auto& rep = sc.repeats[r];
        out << fmt(sc.key.noise_fraction) << ',' << fmt(sc.key.threshold) << ','
            << sc.key.classifier << ',' << r << ',' << rep.report.corrections_total;
        for (const int count : rep.report.corrections_by_class) out << ',' << count;
        out << ',' << rep.report.outliers_total;
        if (rep.report.correctness)
          out << ',' << rep.report.correctness->wrong_before << ','
              << rep.report.correctness->wrong_after;
        else
          out << ",,";
        out << ',' << fmt(rep.chosen.delta) << ',' << fmt(rep.chosen.temperature) << ','
            << (rep.chosen.c ? fmt(*rep.chosen.c) : "") << '\n';
      }
    }
  }

  // summary.json: per scenario, paired cleaned-vs-baseline comparison per
  // split and metric.
  nlohmann::json summary;
  summary["config"] = config_to_json(suite.config);
  summary["n_failed"] = suite.n_failed;
  auto scenarios = nlohmann::json::array();
  for (const auto& sc : suite.scenarios) {
    nlohmann::json entry;
    entry["noise"] = sc.key.noise_fraction;
    entry["threshold"] = sc.key.threshold;
    entry["classifier"] = sc.key.classifier;
    if (sc.failed) {
      entry["failed"] = true;
      entry["error"] = sc.error;
      scenarios.push_back(std::move(entry));
      continue;
    }
    entry["n_pairs"] = sc.repeats.size();
    nlohmann::json comparisons = nlohmann::json::object();
    for (const auto& pull : kPulls) {
      // Paired statistics need at least two repeats.
      if (sc.repeats.size() < 2 || !pull.present(sc.repeats.front().cleaned_validation)) continue;
      std::vector<double> cleaned, baseline;
      cleaned.reserve(sc.repeats.size());
      baseline.reserve(sc.repeats.size());
      const bool validation = std::string(pull.split) == "validation";
      for (const auto& rep : sc.repeats) {
        cleaned.push_back(pull.get(pick(rep, true, validation)));
        baseline.push_back(pull.get(pick(rep, false, validation)));
      }
      comparisons[std::string(pull.split) + ":" + pull.name] =
          comparison_json(eval::paired_ttest(cleaned, baseline));
    }
    entry["comparisons"] = std::move(comparisons);
    scenarios.push_back(std::move(entry));
  }
  summary["scenarios"] = std::move(scenarios);
  {
    std::ofstream out(fs::path(out_dir) / "summary.json");
    out << summary.dump(2) << '\n';
  }

  // plotdata/: metric-vs-noise curves with CI bands per classifier,
  // threshold, split and metric, plus cleaning-count curves.
  for (const auto& classifier : suite.config.classifiers) {
    for (const double threshold : suite.config.threshold_grid) {
      const auto cell_scenarios = [&](double noise) -> const ScenarioResult* {
        for (const auto& sc : suite.scenarios)
          if (sc.key.classifier == classifier && sc.key.threshold == threshold &&
              sc.key.noise_fraction == noise && !sc.failed)
            return &sc;
        return nullptr;
      };

      for (const auto& pull : kPulls) {
        std::ostringstream name;
        name << "curve_" << classifier << "_thr" << fmt(threshold) << '_' << pull.split << '_'
             << pull.name << ".csv";
        std::ostringstream body;
        bool any = false;
        for (const double noise : suite.config.noise_grid) {
          const ScenarioResult* sc = cell_scenarios(noise);
          if (sc == nullptr || sc->repeats.size() < 2 ||
              !pull.present(sc->repeats.front().cleaned_validation))
            continue;
          const bool validation = std::string(pull.split) == "validation";
          std::vector<double> cleaned, baseline;
          for (const auto& rep : sc->repeats) {
            cleaned.push_back(pull.get(pick(rep, true, validation)));
            baseline.push_back(pull.get(pick(rep, false, validation)));
          }
          const eval::PairedComparison cmp = eval::paired_ttest(cleaned, baseline);
          body << fmt(noise) << ',' << fmt(cmp.mean_a) << ',' << fmt(cmp.ci95_a[0]) << ','
               << fmt(cmp.ci95_a[1]) << ',' << fmt(cmp.mean_b) << ',' << fmt(cmp.ci95_b[0]) << ','
               << fmt(cmp.ci95_b[1]) << ',' << fmt(cmp.p_value) << ',' << cmp.stars << '\n';
          any = true;
        }
        if (!any) continue;
        std::ofstream out(fs::path(out_dir) / "plotdata" / name.str());
        out << "noise,cleaned_mean,cleaned_lo,cleaned_hi,baseline_mean,baseline_lo,baseline_hi,"
               "p_value,stars\n"
            << body.str();
      }

      // Cleaning-process curves: corrections, outliers, ground-truth wrong
      // label counts before/after, averaged over repeats.
      std::ostringstream body;
      bool any = false;
      for (const double noise : suite.config.noise_grid) {
        const ScenarioResult* sc = cell_scenarios(noise);
        if (sc == nullptr || sc->repeats.empty()) continue;
        const double dn = static_cast<double>(sc->repeats.size());
        double corrections = 0.0, outliers = 0.0, before = 0.0, after = 0.0;
        std::vector<double> by_class(suite.class_names.size(), 0.0);
        for (const auto& rep : sc->repeats) {
          corrections += rep.report.corrections_total;
          outliers += rep.report.outliers_total;
          for (std::size_t c = 0; c < by_class.size(); ++c)
            by_class[c] += rep.report.corrections_by_class[c];
          if (rep.report.correctness) {
            before += rep.report.correctness->wrong_before;
            after += rep.report.correctness->wrong_after;
          }
        }
        body << fmt(noise) << ',' << fmt(corrections / dn);
        for (const double v : by_class) body << ',' << fmt(v / dn);
        body << ',' << fmt(outliers / dn) << ',' << fmt(before / dn) << ',' << fmt(after / dn)
             << '\n';
        any = true;
      }
      if (any) {
        std::ostringstream name;
        name << "cleaning_" << classifier << "_thr" << fmt(threshold) << ".csv";
        std::ofstream out(fs::path(out_dir) / "plotdata" / name.str());
        out << "noise,corrections_mean";
        for (const auto& cls : suite.class_names) out << ",corrections_" << cls << "_mean";
        out << ",outliers_mean,wrong_before_mean,wrong_after_mean\n" << body.str();
      }
    }
  }
}

std::string render_report(const std::string& out_dir) {
  const fs::path summary_path = fs::path(out_dir) / "summary.json";
  std::ifstream in(summary_path);
  if (!in) throw std::runtime_error("cannot open '" + summary_path.string() + "'");
  nlohmann::json summary;
  in >> summary;

  std::ostringstream out;
  out << std::left << std::setw(7) << "noise" << std::setw(11) << "threshold" << std::setw(12)
      << "classifier" << std::setw(10) << "metric" << std::setw(22) << "cleaned" << std::setw(22)
      << "baseline" << std::setw(12) << "p" << "sig\n";
  out << std::string(100, '-') << '\n';

  for (const auto& sc : summary.at("scenarios")) {
    if (sc.value("failed", false)) {
      out << "FAILED: " << sc.at("error").get<std::string>() << '\n';
      continue;
    }
    for (const auto& [key, cmp] : sc.at("comparisons").items()) {
      if (key.rfind("test:", 0) != 0) continue;  // report table shows test metrics
      std::ostringstream cleaned, baseline;
      cleaned << std::fixed << std::setprecision(4) << cmp.at("mean_cleaned").get<double>()
              << " [" << cmp.at("ci95_cleaned")[0].get<double>() << ", "
              << cmp.at("ci95_cleaned")[1].get<double>() << "]";
      baseline << std::fixed << std::setprecision(4) << cmp.at("mean_baseline").get<double>()
               << " [" << cmp.at("ci95_baseline")[0].get<double>() << ", "
               << cmp.at("ci95_baseline")[1].get<double>() << "]";
      std::ostringstream pv;
      pv << std::scientific << std::setprecision(2) << cmp.at("p").get<double>();
      out << std::left << std::setw(7) << sc.at("noise").get<double>() << std::setw(11)
          << sc.at("threshold").get<double>() << std::setw(12)
          << sc.at("classifier").get<std::string>() << std::setw(10) << key.substr(5)
          << std::setw(22) << cleaned.str() << std::setw(22) << baseline.str() << std::setw(12)
          << pv.str() << cmp.at("stars").get<std::string>() << '\n';
    }
  }
  return out.str();
}

}  // namespace icpclean::experiment
