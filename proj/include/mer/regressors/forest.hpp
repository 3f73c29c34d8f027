#pragma once

#include "mer/common.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <vector>

namespace mer::regressors {

struct ForestParams {
  int n_trees = 100;
  int min_samples_leaf = 1;  // counted in bootstrap draws
  bool bootstrap = true;
  std::uint64_t seed = 0;
  int jobs = 1;
};

struct RegressionTree {
  struct Node {
    int feature = -1;  // -1 for a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0;
  };
  std::vector<Node> nodes;  // nodes[0] is the root

  // Rows with x[feature] <= threshold go left.
  double predict_row(const double* row, Index stride) const;
  std::size_t depth() const;
};

struct RandomForest {
  std::vector<RegressionTree> trees;
  Index n_features = 0;
  double y_min = 0.0;
  double y_max = 0.0;

  Vector predict(const Matrix& x) const;

  nlohmann::json to_json() const;
  static RandomForest from_json(const nlohmann::json& j);
};

/// CART regression trees grown greedily on variance reduction over every
/// feature, each on its own bootstrap sample, until nodes are pure or a split
/// would leave fewer than min_samples_leaf draws on a side. Ties between
/// candidate splits go to the lowest feature index, then the lowest threshold.
RandomForest fit_random_forest(const Matrix& x, const Vector& y, const ForestParams& params);

}  // namespace mer::regressors
