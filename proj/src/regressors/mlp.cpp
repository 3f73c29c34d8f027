#include "mer/regressors/mlp.hpp"

#include "mer/util/random.hpp"

#include <cmath>
#include <numeric>

namespace mer::regressors {

MlpNetwork MlpNetwork::init(Index d, int hidden, std::uint64_t seed) {
  Rng rng(seed);
  MlpNetwork net;
  const double bound1 = std::sqrt(6.0 / static_cast<double>(d + hidden));
  const double bound2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
  net.w1.resize(hidden, d);
  for (Index j = 0; j < d; ++j)
    for (Index h = 0; h < hidden; ++h) net.w1(h, j) = rng.uniform(-bound1, bound1);
  net.b1.resize(hidden);
  for (Index h = 0; h < hidden; ++h) net.b1(h) = rng.uniform(-bound1, bound1);
  net.w2.resize(hidden);
  for (Index h = 0; h < hidden; ++h) net.w2(h) = rng.uniform(-bound2, bound2);
  net.b2 = rng.uniform(-bound2, bound2);
  return net;
}

Vector MlpNetwork::forward(const Matrix& x) const {
  const Matrix a = ((x * w1.transpose()).rowwise() + b1.transpose()).cwiseMax(0.0);
  return (a * w2).array() + b2;
}

Vector MlpNetwork::flatten() const {
  Vector theta(n_parameters());
  Index k = 0;
  theta.segment(k, w1.size()) = w1.reshaped();
  k += w1.size();
  theta.segment(k, b1.size()) = b1;
  k += b1.size();
  theta.segment(k, w2.size()) = w2;
  k += w2.size();
  theta(k) = b2;
  return theta;
}

void MlpNetwork::unflatten(const Vector& theta) {
  if (theta.size() != n_parameters()) throw DimensionMismatch("mlp: parameter vector has the wrong length");
  Index k = 0;
  w1.reshaped() = theta.segment(k, w1.size());
  k += w1.size();
  b1 = theta.segment(k, b1.size());
  k += b1.size();
  w2 = theta.segment(k, w2.size());
  k += w2.size();
  b2 = theta(k);
}

double mlp_loss(const MlpNetwork& net, const Matrix& x, const Vector& y, double alpha, Vector* grad) {
  const double n = static_cast<double>(x.rows());
  const Matrix z = (x * net.w1.transpose()).rowwise() + net.b1.transpose();
  const Matrix a = z.cwiseMax(0.0);
  const Vector r = ((a * net.w2).array() + net.b2).matrix() - y;
  const double loss = r.squaredNorm() / (2.0 * n) + alpha / (2.0 * n) * (net.w1.squaredNorm() + net.w2.squaredNorm());
  if (grad) {
    const Vector dr = r / n;
    const Vector gw2 = a.transpose() * dr + (alpha / n) * net.w2;
    const double gb2 = dr.sum();
    Matrix dz = dr * net.w2.transpose();
    dz.array() *= (z.array() > 0.0).cast<double>();
    const Matrix gw1 = dz.transpose() * x + (alpha / n) * net.w1;
    const Vector gb1 = dz.colwise().sum().transpose();
    grad->resize(net.n_parameters());
    Index k = 0;
    grad->segment(k, gw1.size()) = gw1.reshaped();
    k += gw1.size();
    grad->segment(k, gb1.size()) = gb1;
    k += gb1.size();
    grad->segment(k, gw2.size()) = gw2;
    k += gw2.size();
    (*grad)(k) = gb2;
  }
  return loss;
}

namespace {

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

void train_full_batch(MlpNetwork& net, const Matrix& x, const Vector& y, const MlpParams& p, MlpFitInfo& info) {
  Vector theta = net.flatten();
  Vector g;
  double loss = mlp_loss(net, x, y, p.alpha, &g);
  double step = p.learning_rate;
  MlpNetwork trial = net;
  for (int epoch = 0; epoch < p.max_epochs; ++epoch) {
    const double g2 = g.squaredNorm();
    if (g2 == 0.0) break;
    step *= 2.0;
    bool accepted = false;
    while (step > 1e-20) {
      trial.unflatten(theta - step * g);
      const double candidate = mlp_loss(trial, x, y, p.alpha);
      if (candidate <= loss - 1e-4 * step * g2) {
        accepted = true;
        break;
      }
      step /= 2.0;
    }
    if (!accepted) break;
    theta -= step * g;
    net.unflatten(theta);
    loss = mlp_loss(net, x, y, p.alpha, &g);
    info.train_loss.push_back(loss);
    info.epochs = epoch + 1;
  }
  info.best_epoch = info.epochs;
}

void train_adam(MlpNetwork& net, const Matrix& x, const Vector& y, const MlpParams& p, Rng& rng, MlpFitInfo& info) {
  std::vector<Index> order(static_cast<std::size_t>(x.rows()));
  std::iota(order.begin(), order.end(), 0);

  Matrix x_val;
  Vector y_val;
  std::vector<Index> train_rows = order;
  const bool hold_out = p.early_stopping && x.rows() >= 4;
  if (hold_out) {
    rng.shuffle(std::span<Index>(order));
    const auto n_val = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(p.validation_fraction * static_cast<double>(x.rows()))), 1,
        order.size() - 2);
    std::vector<Index> val_rows(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
    train_rows.assign(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
    std::sort(val_rows.begin(), val_rows.end());
    std::sort(train_rows.begin(), train_rows.end());
    x_val = take_rows(x, val_rows);
    y_val = take(y, val_rows);
  }
  const Matrix xt = hold_out ? take_rows(x, train_rows) : x;
  const Vector yt = hold_out ? take(y, train_rows) : y;

  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  Vector theta = net.flatten();
  Vector m = Vector::Zero(theta.size()), v = Vector::Zero(theta.size()), g;
  std::int64_t t = 0;
  const auto batch = static_cast<std::size_t>(std::max(1, p.batch_size));
  std::vector<Index> idx(static_cast<std::size_t>(xt.rows()));
  std::iota(idx.begin(), idx.end(), 0);

  double best_val = std::numeric_limits<double>::infinity();
  Vector best_theta = theta;
  int stale = 0;
  for (int epoch = 0; epoch < p.max_epochs; ++epoch) {
    rng.shuffle(std::span<Index>(idx));
    for (std::size_t start = 0; start < idx.size(); start += batch) {
      const std::size_t end = std::min(idx.size(), start + batch);
      const std::vector<Index> rows(idx.begin() + static_cast<std::ptrdiff_t>(start),
                                    idx.begin() + static_cast<std::ptrdiff_t>(end));
      mlp_loss(net, take_rows(xt, rows), take(yt, rows), p.alpha, &g);
      ++t;
      m = beta1 * m + (1.0 - beta1) * g;
      v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
      const double lr = p.learning_rate * std::sqrt(1.0 - std::pow(beta2, static_cast<double>(t))) /
                        (1.0 - std::pow(beta1, static_cast<double>(t)));
      theta.array() -= lr * m.array() / (v.array().sqrt() + eps);
      net.unflatten(theta);
    }
    info.train_loss.push_back(mlp_loss(net, xt, yt, p.alpha));
    info.epochs = epoch + 1;
    if (!hold_out) continue;
    const double val = mlp_loss(net, x_val, y_val, 0.0);
    info.validation_loss.push_back(val);
    if (val < best_val - p.tol) {
      best_val = val;
      best_theta = theta;
      info.best_epoch = epoch + 1;
      stale = 0;
    } else if (++stale >= p.patience) {
      break;
    }
  }
  if (hold_out) {
    net.unflatten(best_theta);
  } else {
    info.best_epoch = info.epochs;
  }
}

}  // namespace

MlpModel fit_mlp(const Matrix& x, const Vector& y, const MlpParams& params, MlpFitInfo* info) {
  if (x.rows() != y.size()) throw DimensionMismatch("mlp: X and y have different row counts");
  if (x.rows() < 2) throw InvalidArgument("mlp: need at least 2 training rows");
  if (params.hidden < 1 || params.max_epochs < 1 || !(params.learning_rate > 0.0) || !(params.alpha >= 0.0)) {
    throw InvalidArgument("mlp: invalid hyperparameters");
  }
  if (params.early_stopping && !(params.validation_fraction > 0.0 && params.validation_fraction < 1.0)) {
    throw InvalidArgument("mlp: validation_fraction must be in (0, 1)");
  }
  if (!x.allFinite() || !y.allFinite()) throw InvalidArgument("mlp: inputs must be finite");

  MlpModel model;
  model.scaler = numerics::Standardizer::fit(x);
  const Matrix xs = model.scaler.apply(x);
  model.y_mean = y.mean();
  const double sd = std::sqrt((y.array() - model.y_mean).square().mean());
  model.y_scale = sd > 0.0 ? sd : 1.0;
  const Vector ys = (y.array() - model.y_mean) / model.y_scale;
  model.net = MlpNetwork::init(x.cols(), params.hidden, derive_seed(params.seed, "mlp-init"));
  MlpFitInfo local;
  if (params.full_batch) {
    train_full_batch(model.net, xs, ys, params, local);
  } else {
    Rng rng(derive_seed(params.seed, "mlp-train"));
    train_adam(model.net, xs, ys, params, rng, local);
  }
  if (!model.net.flatten().allFinite()) throw NumericalError("mlp: training diverged");
  if (info) *info = std::move(local);
  return model;
}

Vector MlpModel::predict(const Matrix& x) const {
  if (x.cols() != scaler.dimension()) {
    throw DimensionMismatch("mlp expects " + std::to_string(scaler.dimension()) + " features, got " +
                            std::to_string(x.cols()));
  }
  return (net.forward(scaler.apply(x)).array() * y_scale + y_mean).matrix();
}

nlohmann::json MlpModel::to_json() const {
  const Vector theta = net.flatten();
  return {{"scaler", scaler.to_json()},
          {"hidden", net.w1.rows()},
          {"y_mean", y_mean},
          {"y_scale", y_scale},
          {"parameters", std::vector<double>(theta.data(), theta.data() + theta.size())}};
}

MlpModel MlpModel::from_json(const nlohmann::json& j) {
  MlpModel m;
  m.scaler = numerics::Standardizer::from_json(j.at("scaler"));
  const auto hidden = j.at("hidden").get<Index>();
  m.y_mean = j.at("y_mean").get<double>();
  m.y_scale = j.at("y_scale").get<double>();
  const auto params = j.at("parameters").get<std::vector<double>>();
  const Index d = m.scaler.dimension();
  m.net.w1.resize(hidden, d);
  m.net.b1.resize(hidden);
  m.net.w2.resize(hidden);
  if (static_cast<Index>(params.size()) != m.net.n_parameters()) throw InvalidArgument("mlp artifact has the wrong size");
  m.net.unflatten(Eigen::Map<const Vector>(params.data(), static_cast<Index>(params.size())));
  return m;
}

}  // namespace mer::regressors
