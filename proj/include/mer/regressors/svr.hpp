#pragma once

#include "mer/common.hpp"
#include "mer/numerics/standardize.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>

namespace mer::regressors {

struct SvrParams {
  double C = 1.0;
  double epsilon = 0.1;
  double gamma = 0.0;  // <= 0 selects 1 / (d * var(X)) on the standardized features
  double tol = 1e-3;
  std::int64_t max_iter = 10'000'000;
  double cache_mb = 200.0;
};

struct SvrFitInfo {
  std::int64_t iterations = 0;
  bool converged = false;
  double objective = 0.0;  // dual objective at the returned point
  Vector beta;             // alpha - alpha* for every training row
  double gamma = 0.0;
};

// Kernel expansion over standardized inputs.
struct SvrModel {
  numerics::Standardizer scaler;
  Matrix support;  // standardized support vectors, one per row
  Vector coef;     // alpha - alpha* of each support vector
  double bias = 0.0;
  double gamma = 0.0;

  Vector predict(const Matrix& x) const;

  nlohmann::json to_json() const;
  static SvrModel from_json(const nlohmann::json& j);
};

/// Epsilon-insensitive SVR with an RBF kernel, solved in the dual
///   min 1/2 b'Kb + eps*sum|b_i| - y'b   s.t. sum b_i = 0, |b_i| <= C
/// by SMO with second-order working-set selection, until the maximal KKT
/// violation drops below `tol`. Hitting max_iter logs a warning and returns
/// the current iterate.
SvrModel fit_svr(const Matrix& x, const Vector& y, const SvrParams& params, SvrFitInfo* info = nullptr);

/// Dual objective 1/2 b'Kb + eps*sum|b| - y'b for a precomputed kernel matrix.
double svr_dual_objective(const Matrix& kernel, const Vector& y, const Vector& beta, double epsilon);

/// exp(-gamma * |a_i - b_j|^2) for all row pairs.
Matrix rbf_kernel(const Matrix& a, const Matrix& b, double gamma);

}  // namespace mer::regressors
