#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hrafl/matrix.hpp"

namespace hrafl {

enum class CellKind { missing, number, hex, text };

struct Cell {
  CellKind kind = CellKind::missing;
  std::string text;

  friend bool operator==(const Cell&, const Cell&) = default;
};

// Classifies one raw CSV field. Empty, "NaN", "nan" and "-" are missing.
Cell classify_cell(std::string_view field);

// How label text maps to {0,1}. A label is 1 iff it is in `positive`.
// When `negative` is non-empty, labels in neither set are rejected.
struct LabelSpec {
  std::set<std::string> positive;
  std::set<std::string> negative;

  friend bool operator==(const LabelSpec&, const LabelSpec&) = default;
};

struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::string label_column;
  LabelSpec labels;
};

// Features plus binary labels. Before imputation, missing entries are NaN.
struct FeatureMatrix {
  Matrix X;
  std::vector<double> y;
  std::vector<std::string> feature_names;

  std::size_t samples() const noexcept { return X.rows(); }
  std::size_t features() const noexcept { return X.cols(); }

  // Rows selected by `indices`, in that order.
  FeatureMatrix subset(const std::vector<std::size_t>& indices) const;

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

struct NormalizationStats {
  std::vector<double> mu;
  std::vector<double> sigma;
};

struct PartitionPlan {
  std::vector<std::vector<std::size_t>> assignments;

  std::size_t clients() const noexcept { return assignments.size(); }
  friend bool operator==(const PartitionPlan&, const PartitionPlan&) = default;
};

struct SyntheticSpec {
  std::size_t n_train = 1000;
  std::size_t n_test = 250;
  std::size_t features = 10;
  double positive_fraction = 0.5;
  double separation = 4.0;
  double noise = 1.0;

  void validate() const;
  friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

RawTable load_csv(const std::filesystem::path& path, const std::string& label_column,
                  LabelSpec labels);

// Hex cells parse base-16, text columns get first-appearance integer codes,
// missing cells become NaN.
FeatureMatrix coerce_numeric(const RawTable& table);

// Per-feature medians over non-missing entries.
std::vector<double> feature_medians(const FeatureMatrix& matrix);

FeatureMatrix impute_median(const FeatureMatrix& matrix,
                            const std::optional<std::vector<double>>& medians = std::nullopt);

std::pair<FeatureMatrix, std::vector<std::size_t>> drop_constant_features(
    const FeatureMatrix& matrix);

FeatureMatrix select_features(const FeatureMatrix& matrix, const std::vector<std::size_t>& kept);

NormalizationStats fit_normalizer(const FeatureMatrix& train);
FeatureMatrix apply_normalizer(const FeatureMatrix& matrix, const NormalizationStats& stats);

struct PreparedData {
  FeatureMatrix train;
  FeatureMatrix test;
};

// Imputation, constant-column removal and standardization, all fit on the
// training side and replayed on the test side.
PreparedData preprocess(const FeatureMatrix& train, const FeatureMatrix& test);

// Seeded shuffled split into a training and a held-out part.
PreparedData split_train_test(const FeatureMatrix& all, double test_fraction, std::uint64_t seed);

PartitionPlan partition_uniform(std::size_t n, std::size_t clients, std::uint64_t seed);
PartitionPlan partition_dirichlet(const std::vector<double>& y, std::size_t clients, double alpha,
                                  std::uint64_t seed);

PreparedData generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

void write_csv(const FeatureMatrix& matrix, const std::filesystem::path& path,
               const std::string& label_column = "label");

}  // namespace hrafl
