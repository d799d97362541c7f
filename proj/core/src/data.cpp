#include "hrafl/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "hrafl/error.hpp"
#include "hrafl/rng.hpp"
#include "text_format.hpp"

namespace hrafl {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_decimal(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

bool is_hex_literal(std::string_view s) {
  if (s.size() < 3 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X')) return false;
  return std::all_of(s.begin() + 2, s.end(),
                     [](char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; });
}

double parse_hex(std::string_view s) {
  double value = 0.0;
  for (char c : s.substr(2)) {
    int digit = 0;
    if (c >= '0' && c <= '9') digit = c - '0';
    else if (c >= 'a' && c <= 'f') digit = c - 'a' + 10;
    else digit = c - 'A' + 10;
    value = value * 16.0 + digit;
  }
  return value;
}

// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
std::vector<std::string> split_record(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

double median_of(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

void check_partition_args(std::size_t n, std::size_t clients) {
  if (clients == 0) throw InvalidArgument("partition: client count must be >= 1");
  if (n < clients) {
    throw InvalidArgument("partition: " + std::to_string(n) + " samples cannot cover " +
                          std::to_string(clients) + " clients");
  }
}

void sort_parts(PartitionPlan& plan) {
  for (auto& part : plan.assignments) std::sort(part.begin(), part.end());
}

}  // namespace

Cell classify_cell(std::string_view field) {
  std::string_view s = trim(field);
  if (s.empty() || s == "NaN" || s == "nan" || s == "-") return {CellKind::missing, {}};
  if (is_hex_literal(s)) return {CellKind::hex, std::string(s)};
  if (parse_decimal(s)) return {CellKind::number, std::string(s)};
  return {CellKind::text, std::string(s)};
}

FeatureMatrix FeatureMatrix::subset(const std::vector<std::size_t>& indices) const {
  FeatureMatrix out;
  out.feature_names = feature_names;
  out.X = Matrix(indices.size(), features());
  out.y.resize(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::size_t src = indices.at(i);
    if (src >= samples()) throw InvalidArgument("subset: row index out of range");
    std::copy(X.row(src).begin(), X.row(src).end(), out.X.row(i).begin());
    out.y[i] = y[src];
  }
  return out;
}

void SyntheticSpec::validate() const {
  if (n_train < 1 || n_test < 1 || features < 1) {
    throw InvalidArgument("synthetic spec: sample and feature counts must be >= 1");
  }
  if (!(positive_fraction > 0.0 && positive_fraction < 1.0)) {
    throw InvalidArgument("synthetic spec: positive fraction must lie in (0,1)");
  }
  if (!(separation >= 0.0)) throw InvalidArgument("synthetic spec: separation must be >= 0");
  if (!(noise > 0.0)) throw InvalidArgument("synthetic spec: noise scale must be > 0");
}

RawTable load_csv(const std::filesystem::path& path, const std::string& label_column,
                  LabelSpec labels) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file '" + path.string() + "'");

  RawTable table;
  table.label_column = label_column;
  table.labels = std::move(labels);

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split_record(line);
    if (!have_header) {
      for (auto& f : fields) table.columns.emplace_back(trim(f));
      have_header = true;
      continue;
    }
    if (fields.size() != table.columns.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(table.columns.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(classify_cell(f));
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw DataError(path.string() + ": missing header row");
  if (std::find(table.columns.begin(), table.columns.end(), label_column) == table.columns.end()) {
    throw DataError(path.string() + ": label column '" + label_column + "' not in header");
  }
  return table;
}

FeatureMatrix coerce_numeric(const RawTable& table) {
  const auto label_it = std::find(table.columns.begin(), table.columns.end(), table.label_column);
  if (label_it == table.columns.end()) {
    throw DataError("label column '" + table.label_column + "' not in table");
  }
  const auto label_idx = static_cast<std::size_t>(label_it - table.columns.begin());

  std::vector<std::size_t> feature_cols;
  FeatureMatrix out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c == label_idx) continue;
    feature_cols.push_back(c);
    out.feature_names.push_back(table.columns[c]);
  }

  const std::size_t n = table.rows.size();
  out.X = Matrix(n, feature_cols.size());
  out.y.resize(n);

  for (std::size_t j = 0; j < feature_cols.size(); ++j) {
    const std::size_t c = feature_cols[j];
    const bool categorical = std::any_of(table.rows.begin(), table.rows.end(), [&](const auto& row) {
      return row[c].kind == CellKind::text;
    });
    std::map<std::string, double> codes;
    for (std::size_t i = 0; i < n; ++i) {
      const Cell& cell = table.rows[i].at(c);
      double value = kMissing;
      if (cell.kind == CellKind::missing) {
        value = kMissing;
      } else if (categorical) {
        auto [it, inserted] = codes.try_emplace(cell.text, static_cast<double>(codes.size()));
        value = it->second;
      } else if (cell.kind == CellKind::hex) {
        value = parse_hex(cell.text);
      } else {
        value = *parse_decimal(cell.text);
      }
      out.X(i, j) = value;
    }
  }

  const LabelSpec& spec = table.labels;
  for (std::size_t i = 0; i < n; ++i) {
    const Cell& cell = table.rows[i].at(label_idx);
    if (cell.kind == CellKind::missing) {
      throw DataError("row " + std::to_string(i + 1) + ": missing label");
    }
    const std::string& value = cell.text;
    if (spec.positive.empty()) {
      // No declared sets: labels must already be 0/1.
      if (value == "1" || value == "1.0") out.y[i] = 1.0;
      else if (value == "0" || value == "0.0") out.y[i] = 0.0;
      else throw DataError("label value '" + value + "' is not 0/1 and no positive set declared");
    } else if (spec.positive.count(value) != 0) {
      out.y[i] = 1.0;
    } else if (spec.negative.empty() || spec.negative.count(value) != 0) {
      out.y[i] = 0.0;
    } else {
      throw DataError("label value '" + value + "' is in neither the positive nor negative set");
    }
  }
  return out;
}

std::vector<double> feature_medians(const FeatureMatrix& matrix) {
  std::vector<double> medians(matrix.features());
  for (std::size_t j = 0; j < matrix.features(); ++j) {
    std::vector<double> present;
    for (std::size_t i = 0; i < matrix.samples(); ++i) {
      if (!std::isnan(matrix.X(i, j))) present.push_back(matrix.X(i, j));
    }
    if (present.empty()) {
      throw DataError("feature '" + matrix.feature_names.at(j) +
                      "' has no observed values; cannot impute");
    }
    medians[j] = median_of(std::move(present));
  }
  return medians;
}

FeatureMatrix impute_median(const FeatureMatrix& matrix,
                            const std::optional<std::vector<double>>& medians) {
  bool any_missing = std::any_of(matrix.X.values().begin(), matrix.X.values().end(),
                                 [](double v) { return std::isnan(v); });
  if (!any_missing) return matrix;

  const std::vector<double> fill = medians ? *medians : feature_medians(matrix);
  if (fill.size() != matrix.features()) {
    throw InvalidArgument("impute_median: median vector length does not match feature count");
  }
  FeatureMatrix out = matrix;
  for (std::size_t i = 0; i < out.samples(); ++i) {
    for (std::size_t j = 0; j < out.features(); ++j) {
      if (std::isnan(out.X(i, j))) out.X(i, j) = fill[j];
    }
  }
  return out;
}

std::pair<FeatureMatrix, std::vector<std::size_t>> drop_constant_features(
    const FeatureMatrix& matrix) {
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < matrix.features(); ++j) {
    bool constant = true;
    for (std::size_t i = 1; i < matrix.samples() && constant; ++i) {
      constant = matrix.X(i, j) == matrix.X(0, j);
    }
    if (!constant) kept.push_back(j);
  }
  if (kept.empty()) throw DataError("all features are constant; nothing left to train on");
  return {select_features(matrix, kept), kept};
}

FeatureMatrix select_features(const FeatureMatrix& matrix, const std::vector<std::size_t>& kept) {
  FeatureMatrix out;
  out.y = matrix.y;
  out.X = Matrix(matrix.samples(), kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const std::size_t j = kept[k];
    if (j >= matrix.features()) throw InvalidArgument("select_features: column out of range");
    out.feature_names.push_back(matrix.feature_names.at(j));
    for (std::size_t i = 0; i < matrix.samples(); ++i) out.X(i, k) = matrix.X(i, j);
  }
  return out;
}

NormalizationStats fit_normalizer(const FeatureMatrix& train) {
  const std::size_t n = train.samples();
  const std::size_t d = train.features();
  if (n == 0) throw InvalidArgument("fit_normalizer: empty matrix");
  NormalizationStats stats{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t j = 0; j < d; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += train.X(i, j);
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double diff = train.X(i, j) - mean;
      sq += diff * diff;
    }
    const double sigma = std::sqrt(sq / static_cast<double>(n));
    if (!(sigma > 0.0)) {
      throw InvalidArgument("fit_normalizer: feature '" + train.feature_names.at(j) +
                            "' has zero standard deviation; run drop_constant_features first");
    }
    stats.mu[j] = mean;
    stats.sigma[j] = sigma;
  }
  return stats;
}

FeatureMatrix apply_normalizer(const FeatureMatrix& matrix, const NormalizationStats& stats) {
  if (stats.mu.size() != matrix.features() || stats.sigma.size() != matrix.features()) {
    throw InvalidArgument("apply_normalizer: statistics fitted on a different feature count");
  }
  FeatureMatrix out = matrix;
  for (std::size_t i = 0; i < out.samples(); ++i) {
    for (std::size_t j = 0; j < out.features(); ++j) {
      out.X(i, j) = (out.X(i, j) - stats.mu[j]) / stats.sigma[j];
    }
  }
  return out;
}

PreparedData preprocess(const FeatureMatrix& train, const FeatureMatrix& test) {
  if (train.features() != test.features()) {
    throw DataError("train and test feature counts differ");
  }
  const auto medians = feature_medians(train);
  auto train_imputed = impute_median(train, medians);
  auto test_imputed = impute_median(test, medians);
  auto [train_kept, kept] = drop_constant_features(train_imputed);
  auto test_kept = select_features(test_imputed, kept);
  const auto stats = fit_normalizer(train_kept);
  return {apply_normalizer(train_kept, stats), apply_normalizer(test_kept, stats)};
}

PreparedData split_train_test(const FeatureMatrix& all, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InvalidArgument("split_train_test: test fraction must lie in (0,1)");
  }
  const std::size_t n = all.samples();
  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  n_test = std::clamp<std::size_t>(n_test, 1, n > 1 ? n - 1 : 1);
  if (n < 2) throw DataError("split_train_test: need at least two rows");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(seed, {stream::kSplit});
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::size_t> test_idx(order.begin(), order.begin() + static_cast<long>(n_test));
  std::vector<std::size_t> train_idx(order.begin() + static_cast<long>(n_test), order.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(train_idx.begin(), train_idx.end());
  return {all.subset(train_idx), all.subset(test_idx)};
}

PartitionPlan partition_uniform(std::size_t n, std::size_t clients, std::uint64_t seed) {
  check_partition_args(n, clients);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(seed, {stream::kPartition});
  std::shuffle(order.begin(), order.end(), rng);

  PartitionPlan plan;
  plan.assignments.resize(clients);
  const std::size_t base = n / clients;
  const std::size_t extra = n % clients;
  std::size_t pos = 0;
  for (std::size_t j = 0; j < clients; ++j) {
    const std::size_t size = base + (j < extra ? 1 : 0);
    plan.assignments[j].assign(order.begin() + static_cast<long>(pos),
                               order.begin() + static_cast<long>(pos + size));
    pos += size;
  }
  sort_parts(plan);
  return plan;
}

PartitionPlan partition_dirichlet(const std::vector<double>& y, std::size_t clients, double alpha,
                                  std::uint64_t seed) {
  check_partition_args(y.size(), clients);
  if (!(alpha > 0.0)) throw InvalidArgument("partition_dirichlet: alpha must be > 0");

  PartitionPlan plan;
  plan.assignments.resize(clients);
  auto rng = make_rng(seed, {stream::kPartition});

  for (double label : {0.0, 1.0}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == label) members.push_back(i);
    }
    if (members.empty()) continue;
    std::shuffle(members.begin(), members.end(), rng);

    std::gamma_distribution<double> gamma(alpha, 1.0);
    std::vector<double> proportions(clients);
    for (auto& p : proportions) p = gamma(rng);
    double total = std::accumulate(proportions.begin(), proportions.end(), 0.0);
    if (!(total > 0.0)) {
      std::fill(proportions.begin(), proportions.end(), 1.0);
      total = static_cast<double>(clients);
    }

    // Cumulative cut points, last one pinned to the class size.
    double cumulative = 0.0;
    std::size_t start = 0;
    for (std::size_t j = 0; j < clients; ++j) {
      cumulative += proportions[j] / total;
      std::size_t stop = (j + 1 == clients)
                             ? members.size()
                             : std::min(members.size(),
                                        static_cast<std::size_t>(std::floor(
                                            cumulative * static_cast<double>(members.size()))));
      stop = std::max(stop, start);
      plan.assignments[j].insert(plan.assignments[j].end(),
                                 members.begin() + static_cast<long>(start),
                                 members.begin() + static_cast<long>(stop));
      start = stop;
    }
  }

  // Empty clients take one index from the currently largest client.
  for (std::size_t j = 0; j < clients; ++j) {
    if (!plan.assignments[j].empty()) continue;
    auto largest = std::max_element(
        plan.assignments.begin(), plan.assignments.end(),
        [](const auto& a, const auto& b) { return a.size() < b.size(); });
    plan.assignments[j].push_back(largest->back());
    largest->pop_back();
  }
  sort_parts(plan);
  return plan;
}

PreparedData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  spec.validate();
  auto rng = make_rng(seed, {stream::kData});
  std::normal_distribution<double> normal(0.0, 1.0);
  const double shift = 0.5 * spec.separation / std::sqrt(static_cast<double>(spec.features));

  auto make = [&](std::size_t n) {
    FeatureMatrix m;
    m.X = Matrix(n, spec.features);
    m.y.assign(n, 0.0);
    for (std::size_t j = 0; j < spec.features; ++j) m.feature_names.push_back("f" + std::to_string(j));
    const auto positives = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::llround(spec.positive_fraction * static_cast<double>(n))));
    std::fill(m.y.begin(), m.y.begin() + static_cast<long>(positives), 1.0);
    std::shuffle(m.y.begin(), m.y.end(), rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double sign = m.y[i] == 1.0 ? 1.0 : -1.0;
      for (std::size_t j = 0; j < spec.features; ++j) {
        m.X(i, j) = sign * shift + spec.noise * normal(rng);
      }
    }
    return m;
  };

  PreparedData out;
  out.train = make(spec.n_train);
  out.test = make(spec.n_test);
  return out;
}

void write_csv(const FeatureMatrix& matrix, const std::filesystem::path& path,
               const std::string& label_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write CSV file '" + path.string() + "'");
  for (const auto& name : matrix.feature_names) out << name << ',';
  out << label_column << '\n';
  for (std::size_t i = 0; i < matrix.samples(); ++i) {
    for (std::size_t j = 0; j < matrix.features(); ++j) {
      out << detail::format_double(matrix.X(i, j)) << ',';
    }
    out << (matrix.y[i] == 1.0 ? '1' : '0') << '\n';
  }
  if (!out) throw DataError("error while writing '" + path.string() + "'");
}

}  // namespace hrafl
