#include "icpclean/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <nlohmann/json.hpp>

#include "icpclean/rng.hpp"

namespace icpclean {

LabelSpace::LabelSpace(std::vector<std::string> classes) : classes_(std::move(classes)) {
  if (classes_.empty()) throw std::invalid_argument("label space must not be empty");
  for (int i = 0; i < static_cast<int>(classes_.size()); ++i) {
    if (!index_.emplace(classes_[i], i).second)
      throw std::invalid_argument("duplicate class name '" + classes_[i] + "'");
  }
}

const std::string& LabelSpace::name_of(int id) const {
  if (id < 0 || id >= size()) throw std::out_of_range("class id out of range");
  return classes_[static_cast<std::size_t>(id)];
}

int LabelSpace::id_of(const std::string& name) const {
  const auto it = index_.find(name);
  return it == index_.end() ? -1 : it->second;
}

void Dataset::validate() const {
  if (n() < 1) throw std::invalid_argument("dataset must contain at least one sample");
  if (labels.size() != n() || static_cast<Eigen::Index>(sample_ids.size()) != n())
    throw std::invalid_argument("features, labels and sample ids disagree on sample count");
  if (!features.allFinite()) throw std::invalid_argument("features contain NaN or infinity");
  for (Eigen::Index i = 0; i < n(); ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes())
      throw std::invalid_argument("label id out of range at row " + std::to_string(i));
  }
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), dim());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  out.label_space = label_space;
  out.sample_ids.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
    out.labels[static_cast<Eigen::Index>(i)] = labels[rows[i]];
    out.sample_ids.push_back(sample_ids[static_cast<std::size_t>(rows[i])]);
  }
  return out;
}

Eigen::VectorXi Dataset::class_counts() const {
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(n_classes());
  for (Eigen::Index i = 0; i < n(); ++i) counts[labels[i]]++;
  return counts;
}

void SplitSpec::validate() const {
  const auto in_open_unit = [](double f) { return f > 0.0 && f < 1.0; };
  if (!in_open_unit(train_frac) || !in_open_unit(val_frac) || !in_open_unit(test_frac))
    throw std::invalid_argument("split fractions must lie in (0, 1)");
  if (std::abs(train_frac + val_frac + test_frac - 1.0) > 1e-9)
    throw std::invalid_argument("train/val/test fractions must sum to 1");
  if (!in_open_unit(proper_frac))
    throw std::invalid_argument("proper_frac must lie in (0, 1)");
}

namespace detail {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_feature(const std::string& cell, std::size_t line_no, const std::string& column) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  while (begin != end && (*begin == ' ' || *begin == '\t')) ++begin;
  while (end != begin && (*(end - 1) == ' ' || *(end - 1) == '\t')) --end;
  if (begin != end && *begin == '+') ++begin;  // from_chars rejects a leading plus
  const auto res = std::from_chars(begin, end, value);
  if (res.ec != std::errc() || res.ptr != end)
    throw std::runtime_error("non-numeric feature cell '" + cell + "' at row " +
                             std::to_string(line_no) + ", column '" + column + "'");
  if (!std::isfinite(value))
    throw std::runtime_error("non-finite feature cell '" + cell + "' at row " +
                             std::to_string(line_no) + ", column '" + column + "'");
  return value;
}

// Largest-remainder apportionment of `total` into |fracs| buckets; remainder
// ties go to the earlier bucket.
std::vector<Eigen::Index> apportion(Eigen::Index total, const std::vector<double>& fracs) {
  std::vector<Eigen::Index> counts(fracs.size(), 0);
  std::vector<double> remainders(fracs.size(), 0.0);
  Eigen::Index assigned = 0;
  for (std::size_t i = 0; i < fracs.size(); ++i) {
    const double quota = static_cast<double>(total) * fracs[i];
    counts[i] = static_cast<Eigen::Index>(std::floor(quota));
    remainders[i] = quota - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(fracs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainders[a] > remainders[b]; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) counts[order[i % order.size()]]++;
  return counts;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const LabelSpace* fixed_space) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open file '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("file '" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);

  int label_col = -1;
  int id_col = -1;
  std::vector<int> feature_cols;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    if (header[c] == label_column)
      label_col = c;
    else if (header[c] == "id")
      id_col = c;
    else
      feature_cols.push_back(c);
  }
  if (label_col < 0)
    throw std::runtime_error("label column '" + label_column + "' not found in '" + path + "'");

  std::vector<std::vector<double>> rows;
  std::vector<std::string> raw_labels;
  std::vector<std::string> ids;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("row " + std::to_string(line_no) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
    std::vector<double> row;
    row.reserve(feature_cols.size());
    for (const int c : feature_cols)
      row.push_back(parse_feature(cells[static_cast<std::size_t>(c)], line_no, header[static_cast<std::size_t>(c)]));
    rows.push_back(std::move(row));
    const std::string& label = cells[static_cast<std::size_t>(label_col)];
    if (label.empty())
      throw std::runtime_error("empty label at row " + std::to_string(line_no));
    raw_labels.push_back(label);
    ids.push_back(id_col >= 0 ? cells[static_cast<std::size_t>(id_col)]
                              : std::to_string(rows.size() - 1));
  }
  if (rows.empty()) throw std::runtime_error("file '" + path + "' has no data rows");

  Dataset ds;
  if (fixed_space != nullptr) {
    ds.label_space = *fixed_space;
  } else {
    std::vector<std::string> classes;
    for (const auto& name : raw_labels)
      if (std::find(classes.begin(), classes.end(), name) == classes.end())
        classes.push_back(name);
    ds.label_space = LabelSpace(classes);
  }

  ds.features.resize(static_cast<Eigen::Index>(rows.size()),
                     static_cast<Eigen::Index>(feature_cols.size()));
  ds.labels.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    const int id = ds.label_space.id_of(raw_labels[i]);
    if (id < 0)
      throw std::runtime_error("label '" + raw_labels[i] + "' at data row " + std::to_string(i) +
                               " is not part of the expected label space");
    ds.labels[static_cast<Eigen::Index>(i)] = id;
  }
  ds.sample_ids = std::move(ids);
  ds.validate();
  return ds;
}

void save_csv(const Dataset& ds, const std::string& path, const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file '" + path + "'");
  out << "id";
  for (Eigen::Index j = 0; j < ds.dim(); ++j) out << ",f" << j;
  out << ',' << label_column << '\n';
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    out << ds.sample_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < ds.dim(); ++j) out << ',' << detail::format_double(ds.features(i, j));
    out << ',' << ds.label_space.name_of(ds.labels[i]) << '\n';
  }
}

FourWaySplit split(const Dataset& ds, const SplitSpec& spec) {
  spec.validate();
  ds.validate();

  // Row indices per part, assembled either per class (stratified) or globally.
  std::vector<Eigen::Index> part_rows[4];
  std::vector<std::string> warnings;
  Rng rng(spec.seed);

  const std::vector<double> outer{spec.train_frac, spec.val_frac, spec.test_frac};
  const std::vector<double> inner{spec.proper_frac, 1.0 - spec.proper_frac};

  const auto assign_group = [&](std::vector<Eigen::Index>& rows, const std::string& group_name) {
    std::vector<std::size_t> order(rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);

    const std::vector<Eigen::Index> outer_counts =
        apportion(static_cast<Eigen::Index>(rows.size()), outer);
    const std::vector<Eigen::Index> inner_counts = apportion(outer_counts[0], inner);
    const Eigen::Index bounds[4] = {inner_counts[0], outer_counts[0],
                                    outer_counts[0] + outer_counts[1],
                                    static_cast<Eigen::Index>(rows.size())};
    Eigen::Index cursor = 0;
    for (int part = 0; part < 4; ++part) {
      const Eigen::Index begin = cursor;
      for (; cursor < bounds[part]; ++cursor)
        part_rows[part].push_back(rows[order[static_cast<std::size_t>(cursor)]]);
      if (cursor == begin && !group_name.empty())
        warnings.push_back("class '" + group_name + "' has no samples in part " +
                           std::to_string(part));
    }
  };

  if (spec.stratified) {
    for (int c = 0; c < ds.n_classes(); ++c) {
      std::vector<Eigen::Index> rows;
      for (Eigen::Index i = 0; i < ds.n(); ++i)
        if (ds.labels[i] == c) rows.push_back(i);
      if (rows.empty()) continue;
      if (rows.size() < 4)
        throw std::invalid_argument("stratified split impossible: class '" +
                                    ds.label_space.name_of(c) + "' has only " +
                                    std::to_string(rows.size()) + " samples for 4 parts");
      assign_group(rows, ds.label_space.name_of(c));
    }
  } else {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(ds.n()));
    for (Eigen::Index i = 0; i < ds.n(); ++i) rows[static_cast<std::size_t>(i)] = i;
    assign_group(rows, "");
  }

  for (int part = 0; part < 4; ++part) {
    if (part_rows[part].empty())
      throw std::invalid_argument("split fractions leave part " + std::to_string(part) + " empty");
    std::sort(part_rows[part].begin(), part_rows[part].end());
  }

  FourWaySplit out{ds.subset(part_rows[0]), ds.subset(part_rows[1]), ds.subset(part_rows[2]),
                   ds.subset(part_rows[3]), std::move(warnings)};
  return out;
}

std::pair<Dataset, std::vector<bool>> permute_labels(const Dataset& ds, const NoiseSpec& spec) {
  ds.validate();
  if (spec.fraction < 0.0 || spec.fraction > 1.0)
    throw std::invalid_argument("noise fraction must lie in [0, 1]");

  const Eigen::Index n = ds.n();
  const auto k = static_cast<std::size_t>(std::llround(spec.fraction * static_cast<double>(n)));

  Rng rng(spec.seed);
  const std::vector<std::size_t> selected =
      rng.sample_without_replacement(static_cast<std::size_t>(n), k);

  Eigen::VectorXi noisy = ds.labels;
  if (spec.mode == NoiseSpec::Mode::shuffle) {
    std::vector<int> pool;
    pool.reserve(selected.size());
    for (const std::size_t i : selected) pool.push_back(ds.labels[static_cast<Eigen::Index>(i)]);
    rng.shuffle(pool);
    for (std::size_t j = 0; j < selected.size(); ++j)
      noisy[static_cast<Eigen::Index>(selected[j])] = pool[j];
  } else {
    const int m = ds.n_classes();
    if (m < 2)
      throw std::invalid_argument("flip mode needs at least two classes");
    for (const std::size_t i : selected) {
      const int old = noisy[static_cast<Eigen::Index>(i)];
      const int draw = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(m - 1)));
      noisy[static_cast<Eigen::Index>(i)] = draw >= old ? draw + 1 : draw;
    }
  }

  std::vector<bool> changed(static_cast<std::size_t>(n), false);
  for (Eigen::Index i = 0; i < n; ++i) changed[static_cast<std::size_t>(i)] = noisy[i] != ds.labels[i];

  Dataset out{ds.features, std::move(noisy), ds.label_space, ds.sample_ids};
  return {std::move(out), std::move(changed)};
}

nlohmann::json split_manifest(const FourWaySplit& parts) {
  nlohmann::json manifest;
  const auto ids = [](const Dataset& d) { return nlohmann::json(d.sample_ids); };
  manifest["proper"] = ids(parts.proper);
  manifest["calibration"] = ids(parts.calibration);
  manifest["validation"] = ids(parts.validation);
  manifest["test"] = ids(parts.test);
  return manifest;
}

}  // namespace icpclean
