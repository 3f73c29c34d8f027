#include "mer/regressors/regressor.hpp"

#include "mer/util/parallel.hpp"
#include "mer/util/random.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>

namespace mer::regressors {
namespace {

double param(const RegressorSpec& spec, const char* name) {
  if (auto it = spec.hyperparameters.find(name); it != spec.hyperparameters.end()) return it->second;
  return default_hyperparameters(spec.family).at(name);
}

int int_param(const RegressorSpec& spec, const char* name) {
  const double v = param(spec, name);
  if (v != std::floor(v) || std::fabs(v) > 1e9) {
    throw InvalidArgument(std::string(to_string(spec.family)) + " hyperparameter " + name + " must be an integer");
  }
  return static_cast<int>(v);
}

void check_names(const RegressorSpec& spec) {
  const auto& defaults = default_hyperparameters(spec.family);
  for (const auto& [name, value] : spec.hyperparameters) {
    if (!defaults.contains(name)) {
      throw InvalidArgument("unknown " + std::string(to_string(spec.family)) + " hyperparameter '" + name + "'");
    }
    if (!std::isfinite(value)) throw InvalidArgument("hyperparameter '" + name + "' must be finite");
  }
}

Matrix take_rows(const Matrix& x, const std::vector<Index>& rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Index>(k)) = x.row(rows[k]);
  return out;
}

Vector take(const Vector& y, const std::vector<Index>& rows) {
  Vector out(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) out(static_cast<Index>(k)) = y(rows[k]);
  return out;
}

}  // namespace

std::string_view to_string(Family f) {
  switch (f) {
    case Family::mlr:
      return "mlr";
    case Family::rfr:
      return "rfr";
    case Family::svr:
      return "svr";
    case Family::mlp:
      return "mlp";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  std::string lower(name);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (Family f : kFamilies)
    if (to_string(f) == lower) return f;
  throw InvalidArgument("unknown model family '" + std::string(name) + "' (expected mlr, rfr, svr or mlp)");
}

const Hyperparameters& default_hyperparameters(Family f) {
  static const Hyperparameters mlr;
  static const Hyperparameters rfr = {{"n_trees", 100}, {"min_samples_leaf", 1}, {"bootstrap", 1}};
  static const Hyperparameters svr = {{"C", 1.0}, {"epsilon", 0.1}, {"gamma", 0.0}, {"tol", 1e-3}, {"max_iter", 1e7}};
  static const Hyperparameters mlp = {{"hidden", 100},
                                      {"alpha", 1e-4},
                                      {"learning_rate", 1e-3},
                                      {"batch_size", 200},
                                      {"max_epochs", 200},
                                      {"early_stopping", 1},
                                      {"validation_fraction", 0.1},
                                      {"patience", 10},
                                      {"tol", 1e-6},
                                      {"full_batch", 0}};
  switch (f) {
    case Family::mlr:
      return mlr;
    case Family::rfr:
      return rfr;
    case Family::svr:
      return svr;
    case Family::mlp:
      return mlp;
  }
  return mlr;
}

ForestParams forest_params(const RegressorSpec& spec) {
  ForestParams p;
  p.n_trees = int_param(spec, "n_trees");
  p.min_samples_leaf = int_param(spec, "min_samples_leaf");
  p.bootstrap = param(spec, "bootstrap") != 0.0;
  p.seed = derive_seed(spec.seed, "rfr");
  return p;
}

SvrParams svr_params(const RegressorSpec& spec) {
  SvrParams p;
  p.C = param(spec, "C");
  p.epsilon = param(spec, "epsilon");
  p.gamma = param(spec, "gamma");
  p.tol = param(spec, "tol");
  p.max_iter = static_cast<std::int64_t>(param(spec, "max_iter"));
  return p;
}

MlpParams mlp_params(const RegressorSpec& spec) {
  MlpParams p;
  p.hidden = int_param(spec, "hidden");
  p.alpha = param(spec, "alpha");
  p.learning_rate = param(spec, "learning_rate");
  p.batch_size = int_param(spec, "batch_size");
  p.max_epochs = int_param(spec, "max_epochs");
  p.early_stopping = param(spec, "early_stopping") != 0.0;
  p.validation_fraction = param(spec, "validation_fraction");
  p.patience = int_param(spec, "patience");
  p.tol = param(spec, "tol");
  p.full_batch = param(spec, "full_batch") != 0.0;
  p.seed = spec.seed;
  return p;
}

nlohmann::json RegressorSpec::to_json() const {
  nlohmann::json hp = nlohmann::json::object();
  for (const auto& [k, v] : hyperparameters) hp[k] = v;
  return {{"family", to_string(family)}, {"hyperparameters", hp}, {"seed", seed}};
}

RegressorSpec RegressorSpec::from_json(const nlohmann::json& j) {
  RegressorSpec s;
  s.family = parse_family(j.at("family").get<std::string>());
  for (const auto& [k, v] : j.at("hyperparameters").items()) s.hyperparameters[k] = v.get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

double r2_score(const Vector& y_true, const Vector& y_pred) {
  if (y_true.size() != y_pred.size()) throw DimensionMismatch("r2: length mismatch");
  if (y_true.size() == 0) throw InvalidArgument("r2: empty input");
  const double mean = y_true.mean();
  const double tss = (y_true.array() - mean).square().sum();
  if (tss == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return 1.0 - (y_true - y_pred).squaredNorm() / tss;
}

TrainedRegressor fit(const RegressorSpec& spec, const Matrix& x, const Vector& y, std::vector<std::string> feature_names,
                     int jobs) {
  check_names(spec);
  if (x.rows() != y.size()) throw DimensionMismatch("fit: X has " + std::to_string(x.rows()) + " rows but y has " +
                                                    std::to_string(y.size()));
  if (x.rows() < 2) throw InvalidArgument("fit: need at least 2 training rows");
  if (!x.allFinite() || !y.allFinite()) throw InvalidArgument("fit: inputs must be finite");
  if (feature_names.empty()) {
    for (Index j = 0; j < x.cols(); ++j) feature_names.push_back("x" + std::to_string(j));
  }
  if (static_cast<Index>(feature_names.size()) != x.cols()) throw DimensionMismatch("fit: feature name count mismatch");

  TrainedRegressor out;
  out.spec_ = spec;
  out.feature_names_ = std::move(feature_names);
  switch (spec.family) {
    case Family::mlr:
      out.model_ = numerics::ols_fit(x, y);
      break;
    case Family::rfr: {
      auto p = forest_params(spec);
      p.jobs = jobs;
      out.model_ = fit_random_forest(x, y, p);
      break;
    }
    case Family::svr:
      out.model_ = fit_svr(x, y, svr_params(spec));
      break;
    case Family::mlp:
      out.model_ = fit_mlp(x, y, mlp_params(spec));
      break;
  }
  out.train_r2_ = r2_score(y, out.predict(x));
  return out;
}

Vector TrainedRegressor::predict(const Matrix& x) const {
  if (x.cols() != n_features()) {
    throw DimensionMismatch("model expects " + std::to_string(n_features()) + " features, got " +
                            std::to_string(x.cols()));
  }
  return std::visit([&](const auto& m) -> Vector { return m.predict(x); }, model_);
}

nlohmann::json TrainedRegressor::to_json() const {
  nlohmann::json j;
  j["format"] = "mer.regressor";
  j["version"] = 1;
  j["spec"] = spec_.to_json();
  j["feature_names"] = feature_names_;
  j["train_r2"] = std::isnan(train_r2_) ? nlohmann::json() : nlohmann::json(train_r2_);
  j["model"] = std::visit([](const auto& m) { return m.to_json(); }, model_);
  return j;
}

TrainedRegressor TrainedRegressor::from_json(const nlohmann::json& j) {
  if (j.at("format") != "mer.regressor" || j.at("version") != 1) {
    throw InvalidArgument("not a version-1 regressor artifact");
  }
  TrainedRegressor r;
  r.spec_ = RegressorSpec::from_json(j.at("spec"));
  r.feature_names_ = j.at("feature_names").get<std::vector<std::string>>();
  r.train_r2_ = j.at("train_r2").is_null() ? std::numeric_limits<double>::quiet_NaN() : j.at("train_r2").get<double>();
  const auto& m = j.at("model");
  switch (r.spec_.family) {
    case Family::mlr:
      r.model_ = numerics::OlsSummary::from_json(m);
      break;
    case Family::rfr:
      r.model_ = RandomForest::from_json(m);
      break;
    case Family::svr:
      r.model_ = SvrModel::from_json(m);
      break;
    case Family::mlp:
      r.model_ = MlpModel::from_json(m);
      break;
  }
  return r;
}

std::vector<Hyperparameters> expand_grid(const HyperparameterGrid& grid) {
  std::vector<Hyperparameters> out(1);
  for (const auto& [name, values] : grid) {
    if (values.empty()) throw InvalidArgument("grid axis '" + name + "' has no values");
    std::vector<Hyperparameters> next;
    for (const auto& partial : out) {
      for (double v : values) {
        auto h = partial;
        h[name] = v;
        next.push_back(std::move(h));
      }
    }
    out = std::move(next);
  }
  return out;
}

const HyperparameterGrid& default_grid(Family f) {
  static const HyperparameterGrid mlr;
  static const HyperparameterGrid rfr = {{"n_trees", {100, 300}}, {"min_samples_leaf", {1, 5}}};
  static const HyperparameterGrid svr = {{"C", {0.1, 1, 10}}, {"epsilon", {0.05, 0.1}}};
  static const HyperparameterGrid mlp = {{"hidden", {50, 100}}, {"alpha", {1e-4, 1e-3}}, {"learning_rate", {1e-3, 1e-2}}};
  switch (f) {
    case Family::mlr:
      return mlr;
    case Family::rfr:
      return rfr;
    case Family::svr:
      return svr;
    case Family::mlp:
      return mlp;
  }
  return mlr;
}

nlohmann::json GridSearchResult::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    nlohmann::json hp = nlohmann::json::object();
    for (const auto& [name, v] : candidates[k]) hp[name] = v;
    rows.push_back({{"hyperparameters", hp},
                    {"mean_cv_r2", std::isnan(mean_cv_r2[k]) ? nlohmann::json() : nlohmann::json(mean_cv_r2[k])}});
  }
  return {{"candidates", rows}, {"best_index", best_index}, {"best_spec", best_spec.to_json()}};
}

GridSearchResult grid_search(const RegressorSpec& base, const HyperparameterGrid& grid, const Matrix& x,
                             const Vector& y, int folds, std::uint64_t seed, int jobs,
                             std::vector<std::string> feature_names) {
  if (folds < 2) throw InvalidArgument("grid_search: folds must be >= 2");
  if (x.rows() < folds) throw InvalidArgument("grid_search: fewer rows than folds");
  if (x.rows() != y.size()) throw DimensionMismatch("grid_search: X and y have different row counts");
  for (const auto& [name, values] : grid)
    if (values.empty()) throw InvalidArgument("grid_search: empty grid axis '" + name + "'");

  GridSearchResult result;
  result.candidates = expand_grid(grid);
  if (result.candidates.empty()) throw InvalidArgument("grid_search: empty grid");

  std::vector<Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed(seed, "cv-folds"));
  rng.shuffle(std::span<Index>(order));
  std::vector<int> fold_of(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) fold_of[static_cast<std::size_t>(order[k])] = static_cast<int>(k % folds);

  struct FoldData {
    Matrix x_train, x_test;
    Vector y_train, y_test;
  };
  std::vector<FoldData> data(static_cast<std::size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    std::vector<Index> train, test;
    for (Index i = 0; i < x.rows(); ++i) (fold_of[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
    data[f] = {take_rows(x, train), take_rows(x, test), take(y, train), take(y, test)};
  }

  auto spec_for = [&](std::size_t c) {
    RegressorSpec s = base;
    for (const auto& [name, v] : result.candidates[c]) s.hyperparameters[name] = v;
    return s;
  };
  const std::size_t n_tasks = result.candidates.size() * static_cast<std::size_t>(folds);
  std::vector<double> scores(n_tasks);
  parallel_for(n_tasks, jobs, [&](std::size_t task) {
    const std::size_t c = task / static_cast<std::size_t>(folds);
    const auto& fd = data[task % static_cast<std::size_t>(folds)];
    const auto model = fit(spec_for(c), fd.x_train, fd.y_train);
    scores[task] = r2_score(fd.y_test, model.predict(fd.x_test));
  });

  result.mean_cv_r2.resize(result.candidates.size());
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < result.candidates.size(); ++c) {
    double s = 0.0;
    for (int f = 0; f < folds; ++f) s += scores[c * static_cast<std::size_t>(folds) + static_cast<std::size_t>(f)];
    result.mean_cv_r2[c] = s / folds;
    if (result.mean_cv_r2[c] > best) {
      best = result.mean_cv_r2[c];
      result.best_index = c;
    }
  }
  result.best_spec = spec_for(result.best_index);
  result.model = fit(result.best_spec, x, y, std::move(feature_names), jobs);
  return result;
}

}  // namespace mer::regressors
