#pragma once

#include "mer/common.hpp"
#include "mer/data/dataset.hpp"
#include "mer/regressors/regressor.hpp"
#include "mer/selection/feature_matrix.hpp"
#include "mer/selection/selection.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mer::evaluation {

using data::Split;
using regressors::Family;

/// 1 - RSS/TSS. Throws InvalidArgument for fewer than 2 values or constant y_true.
double r2(const Vector& y_true, const Vector& y_pred);

// Valence/arousal targets per row with split bookkeeping. Test-split targets
// are only handed out after open_test_split(); an earlier request is counted
// in the audit and throws.
class TargetStore {
 public:
  TargetStore(std::vector<std::string> row_ids, Matrix targets, std::vector<Split> splits);

  const std::vector<std::string>& row_ids() const { return row_ids_; }
  const std::vector<Index>& rows(Split s) const { return rows_[static_cast<std::size_t>(s)]; }
  Vector targets(Target t, Split s) const;

  void open_test_split() { test_open_ = true; }
  bool test_open() const { return test_open_; }
  int early_test_requests() const { return early_requests_; }
  int test_reads() const { return test_reads_; }

 private:
  std::vector<std::string> row_ids_;
  Matrix targets_;
  std::array<std::vector<Index>, 3> rows_;
  bool test_open_ = false;
  mutable int early_requests_ = 0;
  mutable int test_reads_ = 0;
};

struct EvaluationOptions {
  std::uint64_t seed = 0;
  int jobs = 1;
  int folds = 5;
  std::vector<Family> families = {Family::mlr, Family::rfr, Family::svr, Family::mlp};
  std::vector<std::string> modalities = {"audio", "lyrics", "multi"};
  std::map<Family, regressors::HyperparameterGrid> grids;      // missing -> default_grid
  std::map<Family, regressors::Hyperparameters> base_params;  // layered under the grid
};

// Column sets behind the three modalities of the grid.
struct ModalitySubsets {
  std::vector<std::string> audio;
  std::vector<std::string> lyrics;
  std::vector<std::string> columns(const std::string& modality) const;  // multi = audio then lyrics
};

struct GridCell {
  std::string modality;
  Family family = Family::mlr;
  Target target = Target::valence;
  Index n_features = 0;
  bool ok = false;
  double test_r2 = 0.0;
  double train_r2 = 0.0;
  double cv_r2 = 0.0;
  regressors::Hyperparameters best;
  std::string error;
};

/// Grid-searches every (modality, family, target) cell on the training split,
/// then opens the test split and scores each cell. A failing cell is recorded
/// with its error and the run continues.
std::vector<GridCell> run_modality_grid(const selection::FeatureMatrix& features, TargetStore& targets,
                                        const ModalitySubsets& subsets, const EvaluationOptions& options);

struct SubsetRow {
  std::string modality;  // audio, lyrics, multi
  std::string feature_set;
  Index n_features = 0;
  std::array<double, 2> r2{};  // valence, arousal; NaN when the cell failed
};

struct FeatureSubsetDefinitions {
  std::vector<std::string> all_audio, selected_audio, all_lyrics, selected_lyrics;
};

/// Grid-searched MLP test R^2 for the all-features and selected rows of each
/// modality (6 rows). Selected rows reuse matching MLP cells of `grid` when
/// given.
std::vector<SubsetRow> run_feature_subset_comparison(const selection::FeatureMatrix& features, TargetStore& targets,
                                                     const FeatureSubsetDefinitions& subsets,
                                                     const EvaluationOptions& options,
                                                     const std::vector<GridCell>* grid = nullptr);

struct CoefficientRow {
  std::string label;   // e.g. "Energy"
  std::string column;  // empty for the constant
  double coefficient = 0.0;
  double std_error = 0.0;
  double p_value = 0.0;
  bool significant = false;  // p < 0.05
};

// Row order of the coefficient table: Constant, Danceability, Energy,
// Loudness, Speechiness, Acousticness, Instrumentalness, Liveness, Valence,
// Tempo, Mode, Compound sentiment.
const std::vector<std::pair<std::string, std::string>>& coefficient_table_layout();

/// MLR on the 10 non-key audio features plus compound sentiment, fitted on
/// the training split, one table per target.
std::array<std::vector<CoefficientRow>, 2> coefficient_report(const selection::FeatureMatrix& features,
                                                             const TargetStore& targets);

struct EvaluationReport {
  nlohmann::ordered_json metadata;
  std::vector<GridCell> cells;
  std::vector<SubsetRow> feature_subsets;
  std::optional<std::array<std::vector<CoefficientRow>, 2>> coefficients;
  std::optional<selection::CombinationSearchResult> combination;
  std::optional<selection::FeatureSubset> audio_selection;
  std::array<std::optional<selection::RfeResult>, 2> rfe;
  int early_test_requests = 0;
  int test_reads = 0;

  bool any_failed() const;
  nlohmann::ordered_json to_json() const;
};

std::string table1_markdown(const EvaluationReport& r);
std::string table1_csv(const EvaluationReport& r);
std::string table2_markdown(const EvaluationReport& r);
std::string table2_csv(const EvaluationReport& r);
std::string table3_markdown(const EvaluationReport& r);
std::string table3_csv(const EvaluationReport& r);
std::string combination_markdown(const selection::CombinationSearchResult& c);
std::string combination_csv(const selection::CombinationSearchResult& c);
std::string rfe_markdown(const EvaluationReport& r);

/// Writes report.json plus CSV and Markdown tables for every section present.
void write_report(const EvaluationReport& report, const std::filesystem::path& dir);

}  // namespace mer::evaluation
