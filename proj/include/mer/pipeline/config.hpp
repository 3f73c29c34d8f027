#pragma once

#include "mer/common.hpp"
#include "mer/data/dataset.hpp"
#include "mer/regressors/regressor.hpp"
#include "mer/selection/selection.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace mer::pipeline {

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Run settings. The file format is one `key = value` per line with `#`
// comments; relative paths resolve against the directory of the file that
// set them (the working directory for command-line overrides).
//
// Keys:
//   dataset_csv, lyrics_dir, audio_store, vader_lexicon, xanew_lexicon,
//   output_dir, features_dir (default <output_dir>/features)
//   seed, train_ratio, validation_ratio, test_ratio
//   max_vocab, pca_k, alpha, rfe_n_keep, folds, jobs
//   families (comma list), modalities (comma list), combination_ranking
//   grid.<family>.<name> = v1,v2,...   replaces or appends a grid axis
//   param.<family>.<name> = v          fixed hyperparameter under the grid
//   spotify_token_url, spotify_api_base, spotify_concurrency, match_threshold
struct RunConfig {
  std::filesystem::path dataset_csv, lyrics_dir, audio_store, vader_lexicon, xanew_lexicon, output_dir;
  std::filesystem::path features_dir;  // empty -> output_dir/features
  std::uint64_t seed = 42;
  data::SplitRatios ratios;
  std::size_t max_vocab = 20000;
  Index pca_k = 100;
  double alpha = 0.05;
  Index rfe_n_keep = 10;
  int folds = 5;
  int jobs = 1;
  std::vector<regressors::Family> families = {regressors::kFamilies[0], regressors::kFamilies[1],
                                              regressors::kFamilies[2], regressors::kFamilies[3]};
  std::vector<std::string> modalities = {"audio", "lyrics", "multi"};
  selection::CombinationRanking ranking = selection::CombinationRanking::mean_rank;
  std::map<regressors::Family, regressors::HyperparameterGrid> grids;
  std::map<regressors::Family, regressors::Hyperparameters> base_params;
  std::string spotify_token_url = "https://accounts.spotify.com/api/token";
  std::string spotify_api_base = "https://api.spotify.com/v1";
  int spotify_concurrency = 4;
  double match_threshold = 0.5;

  // Every setting applied so far, in key order, with values as written.
  std::map<std::string, std::string> settings;

  std::filesystem::path features_path() const { return features_dir.empty() ? output_dir / "features" : features_dir; }
  regressors::HyperparameterGrid grid(regressors::Family f) const;

  /// Applies one setting; throws ConfigError for unknown keys or bad values.
  void set(const std::string& key, const std::string& value, const std::filesystem::path& base_dir);
  /// Checks cross-field invariants (ratios, pca_k >= 1, ...).
  void validate() const;
  /// Settings without machine-specific path prefixes, for report metadata.
  nlohmann::ordered_json to_json() const;
};

/// Defaults with the bundled lexicons under `data_dir`.
RunConfig default_config(const std::filesystem::path& data_dir);
void apply_config_text(RunConfig& config, std::string_view text, const std::filesystem::path& base_dir);
void apply_config_file(RunConfig& config, const std::filesystem::path& path);

}  // namespace mer::pipeline
