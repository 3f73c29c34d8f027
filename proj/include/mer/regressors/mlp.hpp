#pragma once

#include "mer/common.hpp"
#include "mer/numerics/standardize.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <vector>

namespace mer::regressors {

struct MlpParams {
  int hidden = 100;
  double alpha = 1e-4;          // L2 penalty on weights
  double learning_rate = 1e-3;  // Adam step, or initial step in full-batch mode
  int batch_size = 200;
  int max_epochs = 200;
  bool early_stopping = true;
  double validation_fraction = 0.1;
  int patience = 10;
  double tol = 1e-6;  // minimum validation-loss improvement
  bool full_batch = false;
  std::uint64_t seed = 0;
};

// One hidden ReLU layer: f(x) = w2' relu(W1 x + b1) + b2.
struct MlpNetwork {
  Matrix w1;  // hidden x d
  Vector b1;
  Vector w2;  // hidden
  double b2 = 0.0;

  static MlpNetwork init(Index d, int hidden, std::uint64_t seed);

  Vector forward(const Matrix& x) const;

  Index n_parameters() const { return w1.size() + b1.size() + w2.size() + 1; }
  Vector flatten() const;
  void unflatten(const Vector& theta);
};

/// 1/(2n) sum (f(x_i) - y_i)^2 + alpha/(2n) (|W1|^2 + |w2|^2). Writes the
/// gradient with respect to flatten() order when `grad` is non-null.
double mlp_loss(const MlpNetwork& net, const Matrix& x, const Vector& y, double alpha, Vector* grad = nullptr);

struct MlpFitInfo {
  std::vector<double> train_loss;       // per epoch
  std::vector<double> validation_loss;  // per epoch, empty without early stopping
  int epochs = 0;
  int best_epoch = 0;
};

struct MlpModel {
  numerics::Standardizer scaler;
  MlpNetwork net;  // trained on (y - y_mean) / y_scale
  double y_mean = 0.0;
  double y_scale = 1.0;

  Vector predict(const Matrix& x) const;

  nlohmann::json to_json() const;
  static MlpModel from_json(const nlohmann::json& j);
};

/// Standardizes X and y, then trains with mini-batch Adam. With early stopping a
/// seeded validation_fraction of rows is held out and training stops once
/// its loss has not improved by `tol` for `patience` epochs; the best weights
/// are kept. In full-batch mode every step is plain gradient descent on the
/// whole training set with Armijo backtracking, so the loss never increases.
MlpModel fit_mlp(const Matrix& x, const Vector& y, const MlpParams& params, MlpFitInfo* info = nullptr);

}  // namespace mer::regressors
