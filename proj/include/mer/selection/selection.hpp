#pragma once

#include "mer/common.hpp"
#include "mer/regressors/regressor.hpp"
#include "mer/selection/feature_matrix.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mer::selection {

struct FeatureSubset {
  std::vector<std::string> columns;
  std::string procedure;
  nlohmann::ordered_json provenance;
};

/// Per-target MLR significance filter over the dummy-encoded audio block.
/// A base feature is kept when its coefficient p-value is below alpha for
/// either target. The key indicators are tested as contrasts against the most
/// frequent key in the data (its column is left out of the fit), and the whole
/// indicator group is kept when any contrast is significant. Throws
/// InvalidArgument when N <= d + 1.
FeatureSubset select_significant_audio(const FeatureMatrix& audio, std::span<const Vector> targets, double alpha = 0.05);

// The seven non-empty combinations of the three lyric families, in the order
// tfidf, anew, vader, tfidf+anew, tfidf+vader, anew+vader, tfidf+anew+vader.
struct LyricCombination {
  std::string name;
  std::vector<Modality> parts;
};
const std::vector<LyricCombination>& lyric_combinations();

enum class CombinationRanking { mean_rank, mean_r2 };

struct CombinationRow {
  std::string name;
  Index n_features = 0;
  // Family-major: mlr valence, mlr arousal, rfr valence, ... NaN for failed fits.
  std::array<double, 8> scores{};
  double aggregate = 0.0;  // mean rank (lower is better) or mean R^2
};

struct CombinationSearchResult {
  std::vector<CombinationRow> rows;
  std::size_t best = 0;
  CombinationRanking ranking = CombinationRanking::mean_rank;
  FeatureSubset subset;  // columns of the winning combination
};

/// Fits every family with default hyperparameters on each combination and
/// scores validation R^2 for both targets. The winner has the best aggregate
/// over the 8 cells (mean rank, average ranks for ties, failed cells ranked
/// last); remaining ties go to fewer features, then enumeration order.
/// `lyrics` holds the tfidf, xanew and sentiment columns for every row;
/// `train_rows` and `validation_rows` pick the rows to fit and score.
CombinationSearchResult search_lyric_combination(const FeatureMatrix& lyrics, std::span<const Index> train_rows,
                                                 std::span<const Index> validation_rows,
                                                 std::span<const Vector> train_targets,
                                                 std::span<const Vector> validation_targets, std::uint64_t seed,
                                                 int jobs = 1,
                                                 CombinationRanking ranking = CombinationRanking::mean_rank);

struct RfeResult {
  FeatureSubset survivors;
  std::vector<std::string> elimination_order;  // first eliminated first
};

/// Recursive feature elimination on standardized MLR coefficients: drops the
/// feature with the smallest |coefficient| (earliest column on ties) one at a
/// time until n_keep remain.
RfeResult rfe(const FeatureMatrix& x, const Vector& y, Index n_keep);

}  // namespace mer::selection
