#pragma once

#include "mer/common.hpp"

#include <nlohmann/json.hpp>

#include <vector>

namespace mer::numerics {

// Per-column z-scoring fitted on training rows. Columns whose spread is zero
// on the fitted data are flagged and passed through unscaled.
struct Standardizer {
  Vector mean;
  Vector scale;  // population standard deviation; 1 for constant columns
  std::vector<bool> constant;

  static Standardizer fit(const Matrix& x);

  Matrix apply(const Matrix& x) const;

  Index dimension() const { return mean.size(); }

  nlohmann::json to_json() const;
  static Standardizer from_json(const nlohmann::json& j);
};

}  // namespace mer::numerics
