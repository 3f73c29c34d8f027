#pragma once

#include "mer/common.hpp"

#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mer::selection {

enum class Modality { audio, sentiment, tfidf, xanew };

std::string_view to_string(Modality m);
Modality parse_modality(std::string_view name);

// N x d values with named, modality-tagged columns and one song id per row.
struct FeatureMatrix {
  Matrix values;
  std::vector<std::string> names;
  std::vector<Modality> tags;
  std::vector<std::string> row_ids;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }

  // Throws on NaN/Inf, duplicate names or inconsistent lengths.
  void validate() const;

  // Column position of `name`, or -1.
  Index column(std::string_view name) const;
  FeatureMatrix select_columns(std::span<const std::string> columns) const;
  FeatureMatrix select_rows(std::span<const Index> rows) const;
  FeatureMatrix with_modalities(std::initializer_list<Modality> keep) const;
};

/// Column-wise concatenation. Every part must carry the same row ids in the
/// same order.
FeatureMatrix fuse(std::span<const FeatureMatrix> parts);
FeatureMatrix fuse(std::initializer_list<FeatureMatrix> parts);

/// CSV with header `song_id,<tag>/<name>,...` and shortest round-trip doubles.
std::string to_csv(const FeatureMatrix& m);
FeatureMatrix parse_feature_csv(std::string_view csv);
void save_feature_csv(const std::filesystem::path& path, const FeatureMatrix& m);
FeatureMatrix load_feature_csv(const std::filesystem::path& path);

}  // namespace mer::selection
