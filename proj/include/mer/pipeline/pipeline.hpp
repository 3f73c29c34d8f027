#pragma once

#include "mer/evaluation/evaluation.hpp"
#include "mer/pipeline/config.hpp"
#include "mer/selection/feature_matrix.hpp"
#include "mer/selection/selection.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mer::spotify {
class HttpTransport;
}

namespace mer::pipeline {

// Missing inputs and other problems outside the data (exit code 2).
class InfrastructureError : public Error {
 public:
  using Error::Error;
};

/// Loads the corpus, assigns splits and writes one CSV per feature family
/// (audio, sentiment, tfidf, xanew) plus splits.csv, the fitted vocabulary
/// and PCA models and a manifest into config.features_path(). Vocabulary and
/// PCA are fitted on the training split only. Returns the manifest.
nlohmann::ordered_json build_features(const RunConfig& config);

struct FeatureSet {
  selection::FeatureMatrix audio, sentiment, tfidf, xanew;
  std::vector<std::string> row_ids;
  Matrix targets;  // N x 2 (valence, arousal)
  std::vector<data::Split> splits;

  selection::FeatureMatrix fused() const;   // audio, sentiment, tfidf, xanew
  selection::FeatureMatrix lyrics() const;  // sentiment, tfidf, xanew
  evaluation::TargetStore target_store() const;
};

/// Reads the files written by build_features. Throws InfrastructureError
/// naming the first missing file.
FeatureSet load_features(const std::filesystem::path& dir);

struct Selections {
  selection::FeatureSubset audio;
  selection::CombinationSearchResult lyrics;
};

/// Significance-filtered audio columns and the winning lyric combination,
/// both from training (and, for the lyric search, validation) rows.
Selections select_features(const FeatureSet& features, const evaluation::TargetStore& targets, const RunConfig& config);

evaluation::EvaluationOptions evaluation_options(const RunConfig& config);

/// Full evaluation: selections, modality grid, feature-subset comparison
/// (when MLP is among the families and all three modalities are active),
/// coefficient table and RFE. Writes the report into
/// <output_dir>/report and returns it.
evaluation::EvaluationReport evaluate(const RunConfig& config);

/// Grid-searches one model per (modality, family, target) on the training
/// split, scores it on validation and saves the models under
/// <output_dir>/models. Returns the summary that is also written there.
nlohmann::ordered_json train(const RunConfig& config);

/// RFE down to config.rfe_n_keep on the selected multi-modal columns, per
/// target. Writes <output_dir>/rfe/rfe.json and rfe.md.
std::array<selection::RfeResult, 2> run_rfe(const RunConfig& config);

/// Re-renders the Markdown/CSV tables from <output_dir>/report/report.json
/// and returns the Table 1 Markdown.
std::string render_report(const RunConfig& config);

struct FetchOutcome {
  std::size_t songs = 0;
  std::size_t matched = 0;
  std::size_t unmatched = 0;
  std::size_t fetched = 0;
  std::size_t skipped_cached = 0;
  std::size_t without_features = 0;
};

/// Resolves every dataset song on Spotify and fills config.audio_store.
/// Unmatched songs are listed in <output_dir>/unmatched.csv.
FetchOutcome fetch(const RunConfig& config, std::shared_ptr<spotify::HttpTransport> transport);

evaluation::EvaluationReport report_from_json(const nlohmann::ordered_json& j);

}  // namespace mer::pipeline
