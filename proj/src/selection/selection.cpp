#include "mer/selection/selection.hpp"

#include "mer/numerics/ols.hpp"
#include "mer/numerics/standardize.hpp"
#include "mer/util/parallel.hpp"
#include "mer/util/random.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mer::selection {
namespace {

bool is_key_column(const std::string& name) { return name.rfind("key_", 0) == 0; }

nlohmann::ordered_json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json();
}

}  // namespace

FeatureSubset select_significant_audio(const FeatureMatrix& audio, std::span<const Vector> targets, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("alpha must be in [0, 1]");
  if (targets.empty()) throw InvalidArgument("select_significant_audio: no targets");
  const Index n = audio.rows(), d = audio.cols();
  if (n <= d + 1) {
    throw InvalidArgument("select_significant_audio: need N > d + 1 for coefficient inference (N = " +
                          std::to_string(n) + ", d = " + std::to_string(d) + ")");
  }

  // Reference key level: most frequent indicator, first on ties.
  Index reference = -1;
  double best_count = -1.0;
  for (Index j = 0; j < d; ++j) {
    if (!is_key_column(audio.names[static_cast<std::size_t>(j)])) continue;
    const double c = audio.values.col(j).sum();
    if (c > best_count) {
      best_count = c;
      reference = j;
    }
  }
  std::vector<Index> fit_cols;
  for (Index j = 0; j < d; ++j)
    if (j != reference) fit_cols.push_back(j);
  Matrix x(n, static_cast<Index>(fit_cols.size()));
  for (std::size_t k = 0; k < fit_cols.size(); ++k) x.col(static_cast<Index>(k)) = audio.values.col(fit_cols[k]);

  std::vector<bool> keep(static_cast<std::size_t>(d), false);
  bool keep_keys = false;
  FeatureSubset subset;
  subset.procedure = "mlr_significance";
  subset.provenance["alpha"] = alpha;
  if (reference >= 0) subset.provenance["key_reference"] = audio.names[static_cast<std::size_t>(reference)];
  auto& per_target = subset.provenance["targets"] = nlohmann::ordered_json::array();

  for (std::size_t t = 0; t < targets.size(); ++t) {
    if (targets[t].size() != n) throw DimensionMismatch("select_significant_audio: target length mismatch");
    const auto ols = numerics::ols_fit(x, targets[t]);
    if (!ols.inference_available) throw InvalidArgument("select_significant_audio: coefficient inference unavailable");
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < fit_cols.size(); ++k) {
      const Index j = fit_cols[k];
      const auto c = static_cast<Index>(k) + 1;
      const double p = ols.p_values(c);
      const bool significant = p <= alpha;
      const auto& name = audio.names[static_cast<std::size_t>(j)];
      if (significant) {
        if (is_key_column(name)) keep_keys = true;
        else keep[static_cast<std::size_t>(j)] = true;
      }
      rows.push_back({{"feature", name},
                      {"coefficient", number_or_null(ols.coefficients(c))},
                      {"p_value", number_or_null(p)},
                      {"significant", significant}});
    }
    per_target.push_back({{"index", t}, {"coefficients", rows}});
  }
  for (Index j = 0; j < d; ++j) {
    const auto& name = audio.names[static_cast<std::size_t>(j)];
    if (is_key_column(name) ? keep_keys : keep[static_cast<std::size_t>(j)]) subset.columns.push_back(name);
  }
  return subset;
}

const std::vector<LyricCombination>& lyric_combinations() {
  static const std::vector<LyricCombination> combos = {
      {"tfidf", {Modality::tfidf}},
      {"anew", {Modality::xanew}},
      {"vader", {Modality::sentiment}},
      {"tfidf+anew", {Modality::tfidf, Modality::xanew}},
      {"tfidf+vader", {Modality::tfidf, Modality::sentiment}},
      {"anew+vader", {Modality::xanew, Modality::sentiment}},
      {"tfidf+anew+vader", {Modality::tfidf, Modality::xanew, Modality::sentiment}},
  };
  return combos;
}

CombinationSearchResult search_lyric_combination(const FeatureMatrix& lyrics, std::span<const Index> train_rows,
                                                 std::span<const Index> validation_rows,
                                                 std::span<const Vector> train_targets,
                                                 std::span<const Vector> validation_targets, std::uint64_t seed,
                                                 int jobs, CombinationRanking ranking) {
  if (train_rows.empty() || validation_rows.empty()) {
    throw InvalidArgument("search_lyric_combination: train and validation splits must be non-empty");
  }
  if (train_targets.size() != 2 || validation_targets.size() != 2) {
    throw InvalidArgument("search_lyric_combination: expected valence and arousal targets");
  }
  const auto& combos = lyric_combinations();
  const FeatureMatrix train = lyrics.select_rows(train_rows);
  const FeatureMatrix val = lyrics.select_rows(validation_rows);

  std::vector<std::vector<std::string>> columns(combos.size());
  for (std::size_t c = 0; c < combos.size(); ++c) {
    for (std::size_t j = 0; j < lyrics.names.size(); ++j)
      if (std::find(combos[c].parts.begin(), combos[c].parts.end(), lyrics.tags[j]) != combos[c].parts.end())
        columns[c].push_back(lyrics.names[j]);
    if (columns[c].empty()) {
      throw InvalidArgument("search_lyric_combination: no columns for combination '" + combos[c].name + "'");
    }
  }

  const std::size_t n_cells = combos.size() * 8;
  std::vector<double> scores(n_cells, std::numeric_limits<double>::quiet_NaN());
  parallel_for(n_cells, jobs, [&](std::size_t cell) {
    const std::size_t c = cell / 8, k = cell % 8;
    const auto family = regressors::kFamilies[k / 2];
    const std::size_t t = k % 2;
    const auto xt = train.select_columns(columns[c]);
    const auto xv = val.select_columns(columns[c]);
    try {
      const auto model = regressors::fit({family, {}, derive_seed(seed, "lyric-combination")}, xt.values,
                                         train_targets[t], xt.names);
      scores[cell] = regressors::r2_score(validation_targets[t], model.predict(xv.values));
    } catch (const Error& e) {
      spdlog::warn("combination {} / {} failed: {}", combos[c].name, regressors::to_string(family), e.what());
    }
  });

  CombinationSearchResult result;
  result.ranking = ranking;
  for (std::size_t c = 0; c < combos.size(); ++c) {
    CombinationRow row;
    row.name = combos[c].name;
    row.n_features = static_cast<Index>(columns[c].size());
    for (std::size_t k = 0; k < 8; ++k) row.scores[k] = scores[c * 8 + k];
    result.rows.push_back(row);
  }

  const std::size_t m = result.rows.size();
  if (ranking == CombinationRanking::mean_rank) {
    std::vector<double> rank_sum(m, 0.0);
    for (std::size_t k = 0; k < 8; ++k) {
      auto value = [&](std::size_t r) {
        const double s = result.rows[r].scores[k];
        return std::isnan(s) ? -std::numeric_limits<double>::infinity() : s;
      };
      for (std::size_t r = 0; r < m; ++r) {
        std::size_t better = 0, equal = 0;
        for (std::size_t q = 0; q < m; ++q) {
          if (value(q) > value(r)) ++better;
          else if (value(q) == value(r)) ++equal;
        }
        rank_sum[r] += static_cast<double>(better) + (static_cast<double>(equal) + 1.0) / 2.0;
      }
    }
    for (std::size_t r = 0; r < m; ++r) result.rows[r].aggregate = rank_sum[r] / 8.0;
  } else {
    for (auto& row : result.rows) {
      double s = 0.0;
      for (double v : row.scores) s += v;
      row.aggregate = s / 8.0;
    }
  }

  auto better = [&](const CombinationRow& a, const CombinationRow& b) {
    const double x = a.aggregate, y = b.aggregate;
    if (std::isnan(x) != std::isnan(y)) return !std::isnan(x);
    if (x != y && !std::isnan(x)) return ranking == CombinationRanking::mean_rank ? x < y : x > y;
    return a.n_features < b.n_features;
  };
  for (std::size_t r = 1; r < m; ++r)
    if (better(result.rows[r], result.rows[result.best])) result.best = r;

  result.subset.columns = columns[result.best];
  result.subset.procedure = "lyric_combination_search";
  result.subset.provenance["combination"] = result.rows[result.best].name;
  result.subset.provenance["ranking"] = ranking == CombinationRanking::mean_rank ? "mean_rank" : "mean_r2";
  return result;
}

RfeResult rfe(const FeatureMatrix& x, const Vector& y, Index n_keep) {
  const Index d = x.cols();
  if (n_keep < 1 || n_keep > d) throw InvalidArgument("rfe: n_keep must be in [1, d]");
  if (y.size() != x.rows()) throw DimensionMismatch("rfe: target length mismatch");
  const Matrix z = numerics::Standardizer::fit(x.values).apply(x.values);

  std::vector<Index> alive(static_cast<std::size_t>(d));
  std::iota(alive.begin(), alive.end(), 0);
  RfeResult result;
  while (static_cast<Index>(alive.size()) > n_keep) {
    Matrix sub(z.rows(), static_cast<Index>(alive.size()));
    for (std::size_t k = 0; k < alive.size(); ++k) sub.col(static_cast<Index>(k)) = z.col(alive[k]);
    const auto ols = numerics::ols_fit(sub, y);
    std::size_t weakest = 0;
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < alive.size(); ++k) {
      const double c = std::fabs(ols.coefficients(static_cast<Index>(k) + 1));
      if (c < smallest) {
        smallest = c;
        weakest = k;
      }
    }
    result.elimination_order.push_back(x.names[static_cast<std::size_t>(alive[weakest])]);
    alive.erase(alive.begin() + static_cast<std::ptrdiff_t>(weakest));
  }
  for (Index j : alive) result.survivors.columns.push_back(x.names[static_cast<std::size_t>(j)]);
  result.survivors.procedure = "rfe";
  result.survivors.provenance["n_keep"] = n_keep;
  result.survivors.provenance["elimination_order"] = result.elimination_order;
  return result;
}

}  // namespace mer::selection
