#pragma once

#include "mer/common.hpp"
#include "mer/numerics/ols.hpp"
#include "mer/regressors/forest.hpp"
#include "mer/regressors/mlp.hpp"
#include "mer/regressors/svr.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mer::regressors {

enum class Family { mlr, rfr, svr, mlp };

inline constexpr Family kFamilies[] = {Family::mlr, Family::rfr, Family::svr, Family::mlp};

std::string_view to_string(Family f);
// Accepts mlr/rfr/svr/mlp in any case.
Family parse_family(std::string_view name);

using Hyperparameters = std::map<std::string, double>;

struct RegressorSpec {
  Family family = Family::mlr;
  Hyperparameters hyperparameters;  // unset names take the family default
  std::uint64_t seed = 0;

  nlohmann::json to_json() const;
  static RegressorSpec from_json(const nlohmann::json& j);
};

// Names a family accepts, with defaults:
//   rfr: n_trees 100, min_samples_leaf 1, bootstrap 1
//   svr: C 1, epsilon 0.1, gamma 0 (scale), tol 1e-3, max_iter 1e7
//   mlp: hidden 100, alpha 1e-4, learning_rate 1e-3, batch_size 200,
//        max_epochs 200, early_stopping 1, validation_fraction 0.1,
//        patience 10, tol 1e-6, full_batch 0
//   mlr: none
const Hyperparameters& default_hyperparameters(Family f);

ForestParams forest_params(const RegressorSpec& spec);
SvrParams svr_params(const RegressorSpec& spec);
MlpParams mlp_params(const RegressorSpec& spec);

class TrainedRegressor {
 public:
  Family family() const { return spec_.family; }
  const RegressorSpec& spec() const { return spec_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  Index n_features() const { return static_cast<Index>(feature_names_.size()); }
  double train_r2() const { return train_r2_; }
  // Present for MLR only.
  const numerics::OlsSummary* ols() const { return std::get_if<numerics::OlsSummary>(&model_); }
  const RandomForest* forest() const { return std::get_if<RandomForest>(&model_); }
  const SvrModel* svr() const { return std::get_if<SvrModel>(&model_); }
  const MlpModel* mlp() const { return std::get_if<MlpModel>(&model_); }

  Vector predict(const Matrix& x) const;

  nlohmann::json to_json() const;
  static TrainedRegressor from_json(const nlohmann::json& j);

 private:
  friend TrainedRegressor fit(const RegressorSpec&, const Matrix&, const Vector&, std::vector<std::string>, int);

  RegressorSpec spec_;
  std::vector<std::string> feature_names_;
  double train_r2_ = 0.0;
  std::variant<numerics::OlsSummary, RandomForest, SvrModel, MlpModel> model_;
};

/// Fits one family. `feature_names` may be empty, in which case columns are
/// named x0, x1, ... `jobs` only parallelises forest trees; results do not
/// depend on it.
TrainedRegressor fit(const RegressorSpec& spec, const Matrix& x, const Vector& y,
                     std::vector<std::string> feature_names = {}, int jobs = 1);

/// 1 - RSS/TSS; NaN when y is constant.
double r2_score(const Vector& y_true, const Vector& y_pred);

// Ordered parameter axes; the first axis varies slowest.
using HyperparameterGrid = std::vector<std::pair<std::string, std::vector<double>>>;

std::vector<Hyperparameters> expand_grid(const HyperparameterGrid& grid);
const HyperparameterGrid& default_grid(Family f);

struct GridSearchResult {
  std::vector<Hyperparameters> candidates;  // enumeration order
  std::vector<double> mean_cv_r2;
  std::size_t best_index = 0;
  RegressorSpec best_spec;
  TrainedRegressor model;  // best_spec refitted on all training rows

  nlohmann::json to_json() const;  // candidates and scores only
};

/// Seeded k-fold cross-validation over every grid point (fold assignment from
/// `seed`, the same folds for every point), mean out-of-fold R^2 per point,
/// argmax with ties to the earlier point, then a refit on the full data.
/// Candidate hyperparameters are layered over `base.hyperparameters`.
GridSearchResult grid_search(const RegressorSpec& base, const HyperparameterGrid& grid, const Matrix& x,
                             const Vector& y, int folds = 5, std::uint64_t seed = 0, int jobs = 1,
                             std::vector<std::string> feature_names = {});

}  // namespace mer::regressors
