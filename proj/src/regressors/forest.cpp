#include "mer/regressors/forest.hpp"

#include "mer/util/parallel.hpp"
#include "mer/util/random.hpp"

#include <algorithm>
#include <numeric>

namespace mer::regressors {
namespace {

struct Builder {
  const Matrix& x;
  const Vector& y;
  const std::vector<double>& weight;  // bootstrap multiplicity per row
  int min_leaf;
  RegressionTree tree;
  // sorted[f] holds the active rows ordered by feature f; each node owns a
  // contiguous [begin, end) range in every list.
  std::vector<std::vector<int>> sorted;
  std::vector<char> goes_left;
  std::vector<int> scratch;

  struct Range {
    std::size_t begin, end;
  };

  double leaf_value(Range r) const {
    const auto& rows = sorted[0];
    double w = 0.0, s = 0.0;
    for (std::size_t k = r.begin; k < r.end; ++k) {
      w += weight[rows[k]];
      s += weight[rows[k]] * y(rows[k]);
    }
    return s / w;
  }

  bool pure(Range r) const {
    const auto& rows = sorted[0];
    const double first = y(rows[r.begin]);
    for (std::size_t k = r.begin + 1; k < r.end; ++k)
      if (y(rows[k]) != first) return false;
    return true;
  }

  int grow(Range r) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();

    if (pure(r)) {
      tree.nodes[id].value = y(sorted[0][r.begin]);
      return id;
    }

    double total_w = 0.0, total_s = 0.0;
    for (std::size_t k = r.begin; k < r.end; ++k) {
      const int i = sorted[0][k];
      total_w += weight[i];
      total_s += weight[i] * y(i);
    }
    const double parent = total_s * total_s / total_w;

    int best_feature = -1;
    double best_threshold = 0.0, best_score = parent;
    std::size_t best_split = 0;
    for (int f = 0; f < static_cast<int>(sorted.size()); ++f) {
      const auto& rows = sorted[f];
      double wl = 0.0, sl = 0.0;
      for (std::size_t k = r.begin; k + 1 < r.end; ++k) {
        const int i = rows[k];
        wl += weight[i];
        sl += weight[i] * y(i);
        const double xa = x(i, f), xb = x(rows[k + 1], f);
        if (xa == xb) continue;
        const double wr = total_w - wl;
        if (wl < min_leaf || wr < min_leaf) continue;
        const double sr = total_s - sl;
        const double score = sl * sl / wl + sr * sr / wr;
        if (score > best_score) {
          best_score = score;
          best_feature = f;
          double t = xa + (xb - xa) / 2.0;
          if (!(t >= xa && t < xb)) t = xa;
          best_threshold = t;
          best_split = k + 1;
        }
      }
    }
    if (best_feature < 0) {
      tree.nodes[id].value = leaf_value(r);
      return id;
    }

    const auto& split_rows = sorted[best_feature];
    for (std::size_t k = r.begin; k < r.end; ++k) goes_left[split_rows[k]] = k < best_split;
    for (auto& rows : sorted) {
      if (&rows == &split_rows) continue;
      std::size_t out = r.begin, tail = 0;
      for (std::size_t k = r.begin; k < r.end; ++k) {
        const int i = rows[k];
        if (goes_left[i]) {
          rows[out++] = i;
        } else {
          scratch[tail++] = i;
        }
      }
      std::copy(scratch.begin(), scratch.begin() + static_cast<std::ptrdiff_t>(tail), rows.begin() + static_cast<std::ptrdiff_t>(out));
    }

    const int left = grow({r.begin, best_split});
    const int right = grow({best_split, r.end});
    auto& node = tree.nodes[id];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = left;
    node.right = right;
    return id;
  }
};

RegressionTree build_tree(const Matrix& x, const Vector& y, const std::vector<double>& weight, int min_leaf) {
  std::vector<int> active;
  for (int i = 0; i < static_cast<int>(weight.size()); ++i)
    if (weight[i] > 0) active.push_back(i);

  Builder b{x, y, weight, min_leaf, {}, {}, std::vector<char>(weight.size(), 0), std::vector<int>(active.size())};
  b.sorted.resize(static_cast<std::size_t>(x.cols()));
  for (Index f = 0; f < x.cols(); ++f) {
    auto& rows = b.sorted[static_cast<std::size_t>(f)];
    rows = active;
    std::stable_sort(rows.begin(), rows.end(), [&](int a, int c) { return x(a, f) < x(c, f); });
  }
  if (x.cols() == 0) b.sorted.push_back(active);
  b.grow({0, active.size()});
  return std::move(b.tree);
}

}  // namespace

double RegressionTree::predict_row(const double* row, Index stride) const {
  int n = 0;
  while (nodes[n].feature >= 0) {
    const auto& node = nodes[n];
    n = row[node.feature * stride] <= node.threshold ? node.left : node.right;
  }
  return nodes[n].value;
}

std::size_t RegressionTree::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    best = std::max(best, d[n]);
    if (nodes[n].feature >= 0) {
      d[nodes[n].left] = d[n] + 1;
      d[nodes[n].right] = d[n] + 1;
    }
  }
  return best;
}

Vector RandomForest::predict(const Matrix& x) const {
  if (x.cols() != n_features) {
    throw DimensionMismatch("forest expects " + std::to_string(n_features) + " features, got " +
                            std::to_string(x.cols()));
  }
  Vector out(x.rows());
  for (Index i = 0; i < x.rows(); ++i) {
    double s = 0.0;
    for (const auto& t : trees) s += t.predict_row(x.data() + i, x.rows());
    out(i) = std::clamp(s / static_cast<double>(trees.size()), y_min, y_max);
  }
  return out;
}

RandomForest fit_random_forest(const Matrix& x, const Vector& y, const ForestParams& params) {
  if (x.rows() != y.size()) throw DimensionMismatch("forest: X and y have different row counts");
  if (x.rows() < 1) throw InvalidArgument("forest: no training rows");
  if (params.n_trees < 1) throw InvalidArgument("forest: n_trees must be >= 1");
  if (params.min_samples_leaf < 1) throw InvalidArgument("forest: min_samples_leaf must be >= 1");
  if (!x.allFinite() || !y.allFinite()) throw InvalidArgument("forest: inputs must be finite");

  RandomForest forest;
  forest.n_features = x.cols();
  forest.y_min = y.minCoeff();
  forest.y_max = y.maxCoeff();
  forest.trees.resize(static_cast<std::size_t>(params.n_trees));
  const auto n = static_cast<std::size_t>(x.rows());
  parallel_for(forest.trees.size(), params.jobs, [&](std::size_t t) {
    std::vector<double> weight(n, params.bootstrap ? 0.0 : 1.0);
    if (params.bootstrap) {
      Rng rng(derive_seed(params.seed, t));
      for (std::size_t k = 0; k < n; ++k) weight[rng.below(n)] += 1.0;
    }
    forest.trees[t] = build_tree(x, y, weight, params.min_samples_leaf);
  });
  return forest;
}

nlohmann::json RandomForest::to_json() const {
  nlohmann::json j;
  j["n_features"] = n_features;
  j["y_min"] = y_min;
  j["y_max"] = y_max;
  auto& arr = j["trees"] = nlohmann::json::array();
  for (const auto& t : trees) {
    std::vector<int> feature, left, right;
    std::vector<double> threshold, value;
    for (const auto& nd : t.nodes) {
      feature.push_back(nd.feature);
      left.push_back(nd.left);
      right.push_back(nd.right);
      threshold.push_back(nd.threshold);
      value.push_back(nd.value);
    }
    arr.push_back({{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}});
  }
  return j;
}

RandomForest RandomForest::from_json(const nlohmann::json& j) {
  RandomForest f;
  f.n_features = j.at("n_features").get<Index>();
  f.y_min = j.at("y_min").get<double>();
  f.y_max = j.at("y_max").get<double>();
  for (const auto& jt : j.at("trees")) {
    const auto feature = jt.at("feature").get<std::vector<int>>();
    const auto left = jt.at("left").get<std::vector<int>>();
    const auto right = jt.at("right").get<std::vector<int>>();
    const auto threshold = jt.at("threshold").get<std::vector<double>>();
    const auto value = jt.at("value").get<std::vector<double>>();
    const std::size_t m = feature.size();
    if (m == 0 || left.size() != m || right.size() != m || threshold.size() != m || value.size() != m) {
      throw InvalidArgument("forest artifact has malformed tree arrays");
    }
    RegressionTree t;
    for (std::size_t k = 0; k < m; ++k) {
      const bool leaf = feature[k] < 0;
      if (!leaf && (feature[k] >= f.n_features || left[k] <= static_cast<int>(k) || right[k] <= static_cast<int>(k) ||
                    left[k] >= static_cast<int>(m) || right[k] >= static_cast<int>(m))) {
        throw InvalidArgument("forest artifact has an invalid node");
      }
      t.nodes.push_back({feature[k], threshold[k], left[k], right[k], value[k]});
    }
    f.trees.push_back(std::move(t));
  }
  if (f.trees.empty()) throw InvalidArgument("forest artifact has no trees");
  return f;
}

}  // namespace mer::regressors
