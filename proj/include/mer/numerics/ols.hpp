#pragma once

#include "mer/common.hpp"

#include <nlohmann/json.hpp>

#include <vector>

namespace mer::numerics {

/// Least-squares fit of y on [1, X] with classical t-test inference.
///
/// Index 0 of every per-coefficient vector is the intercept; index j+1 is
/// column j of X. The standard-error, t and p vectors are empty when
/// `inference_available` is false (too few rows for a residual variance).
struct OlsSummary {
  Vector coefficients;
  Vector std_errors;
  Vector t_stats;
  Vector p_values;
  bool inference_available = false;
  // Coefficients that are not identifiable because the design is rank
  // deficient. Their values are the minimum-norm solution's and their
  // standard errors describe that projection, not a unique effect.
  std::vector<bool> unreliable;
  Index rank = 0;
  double residual_df = 0.0;
  double sigma2 = 0.0;          // RSS / residual_df
  double r_squared_train = 0.0; // NaN when y is constant

  Index n_coefficients() const { return coefficients.size(); }

  Vector predict(const Matrix& x) const;

  nlohmann::json to_json() const;
  static OlsSummary from_json(const nlohmann::json& j);
};

/// Fits through the pseudo-inverse of the intercept-augmented design, so
/// exactly collinear columns are tolerated. Inference uses
/// sigma^2 * diag((A^T A)^+) with residual df = N - rank(A), which equals
/// N - d - 1 whenever the design has full column rank; p-values are
/// two-sided Student-t tail probabilities.
OlsSummary ols_fit(const Matrix& x, const Vector& y);

}  // namespace mer::numerics
