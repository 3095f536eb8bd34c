#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "accent/mfcc.hpp"

namespace accent {

/// Labelled feature matrix, one point per row. Labels are class indices
/// 0..S-1; the accent task uses 0 = US and 1 = non-US.
struct Dataset {
  Eigen::MatrixXd points;
  std::vector<int> labels;
  std::vector<std::string> ids;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
  /// One more than the largest label.
  int num_classes() const;
  std::vector<Eigen::Index> class_counts() const;
};

/// Throws InvalidArgument unless the set has n >= 2 finite points, labels in
/// 0..S-1 with every class present, and S >= 2.
void validate_training_set(const Dataset& data);

Dataset subset(const Dataset& data, std::span<const Eigen::Index> rows);

/// Keeps the first q feature columns.
Dataset truncate_features(const Dataset& data, Eigen::Index q);

/// Requires every row to carry a label.
Dataset to_dataset(const std::vector<FeatureVector>& rows);

/// Contents of a feature CSV: rows plus the `# key=value` header block.
struct FeatureTable {
  std::vector<FeatureVector> rows;
  int first_coeff = 0;  // 0 when columns start at c0, 1 when at c1
  std::vector<std::pair<std::string, std::string>> metadata;
};

/// Layout: optional `# key=value` lines, then `source_id,label,c0,...` and one
/// row per vector. Values use 17 significant digits; a missing label is an
/// empty field.
void write_feature_csv(std::ostream& out, const FeatureTable& table);
void save_feature_csv(const std::filesystem::path& path, const FeatureTable& table);
FeatureTable read_feature_csv(std::istream& in);
FeatureTable load_feature_csv(const std::filesystem::path& path);

}  // namespace accent
