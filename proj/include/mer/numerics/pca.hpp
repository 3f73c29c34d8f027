#pragma once

#include "mer/common.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>

namespace mer::numerics {

struct PcaModel {
  Vector mean;                 // length d
  Matrix components;           // k x d, orthonormal rows
  Vector explained_variance;   // length k, non-increasing, sample (N-1) scaling
  double total_variance = 0.0; // sum of per-column sample variances of the fitted data

  Index input_dimension() const { return mean.size(); }
  Index n_components() const { return components.rows(); }

  nlohmann::json to_json() const;
  static PcaModel from_json(const nlohmann::json& j);
};

enum class PcaSolver {
  automatic,   // exact below the size threshold, randomized above it
  exact,       // thin SVD of the centred data
  randomized,  // seeded randomized range finder with power iterations
};

struct PcaOptions {
  PcaSolver solver = PcaSolver::automatic;
  // min(N, d) above which `automatic` switches to the randomized solver.
  Index exact_limit = 2000;
  int oversampling = 20;
  int power_iterations = 6;
  std::uint64_t seed = 0;
};

/// Fits a k-component PCA on mean-centred data.
///
/// Requires N >= 2 and 1 <= k <= min(N-1, d). Components are the top-k right
/// singular vectors of the centred matrix, with each component's
/// largest-magnitude entry made positive (first such entry on ties).
/// Throws NumericalError("zero variance") when every row is identical.
PcaModel fit_pca(const Matrix& x, Index k, const PcaOptions& options = {});

/// (X - mean) * components^T.
Matrix transform_pca(const PcaModel& model, const Matrix& x);

/// scores * components + mean.
Matrix inverse_transform_pca(const PcaModel& model, const Matrix& scores);

}  // namespace mer::numerics
