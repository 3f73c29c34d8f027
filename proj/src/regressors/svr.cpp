#include "mer/regressors/svr.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>
#include <list>
#include <unordered_map>

namespace mer::regressors {
namespace {

constexpr double kTau = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

// LRU cache of kernel rows K(i, .) over the l training points.
class KernelCache {
 public:
  KernelCache(const Matrix& x, double gamma, double cache_mb) : x_(x), gamma_(gamma) {
    sq_norms_ = x.rowwise().squaredNorm();
    const double row_bytes = static_cast<double>(x.rows()) * sizeof(double);
    capacity_ = std::max<std::size_t>(2, static_cast<std::size_t>(cache_mb * 1024.0 * 1024.0 / row_bytes));
  }

  const Vector& row(Index i) {
    if (auto it = map_.find(i); it != map_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      return it->second->second;
    }
    Vector k;
    if (map_.size() >= capacity_) {
      k = std::move(lru_.back().second);
      map_.erase(lru_.back().first);
      lru_.pop_back();
    }
    k.noalias() = x_ * x_.row(i).transpose();
    const double si = sq_norms_(i);
    for (Index j = 0; j < k.size(); ++j) k(j) = std::exp(-gamma_ * std::max(0.0, si + sq_norms_(j) - 2.0 * k(j)));
    k(i) = 1.0;
    lru_.emplace_front(i, std::move(k));
    map_[i] = lru_.begin();
    return lru_.front().second;
  }

 private:
  const Matrix& x_;
  double gamma_;
  Vector sq_norms_;
  std::size_t capacity_;
  std::list<std::pair<Index, Vector>> lru_;
  std::unordered_map<Index, std::list<std::pair<Index, Vector>>::iterator> map_;
};

}  // namespace

Matrix rbf_kernel(const Matrix& a, const Matrix& b, double gamma) {
  const Vector an = a.rowwise().squaredNorm();
  const Vector bn = b.rowwise().squaredNorm();
  Matrix k = a * b.transpose();
  for (Index j = 0; j < k.cols(); ++j)
    for (Index i = 0; i < k.rows(); ++i) k(i, j) = std::exp(-gamma * std::max(0.0, an(i) + bn(j) - 2.0 * k(i, j)));
  return k;
}

double svr_dual_objective(const Matrix& kernel, const Vector& y, const Vector& beta, double epsilon) {
  return 0.5 * beta.dot(kernel * beta) + epsilon * beta.cwiseAbs().sum() - y.dot(beta);
}

SvrModel fit_svr(const Matrix& x, const Vector& y, const SvrParams& params, SvrFitInfo* info) {
  if (x.rows() != y.size()) throw DimensionMismatch("svr: X and y have different row counts");
  if (x.rows() < 2) throw InvalidArgument("svr: need at least 2 training rows");
  if (!(params.C > 0.0) || !(params.epsilon >= 0.0) || !(params.tol > 0.0)) {
    throw InvalidArgument("svr: C and tol must be positive and epsilon non-negative");
  }
  if (!x.allFinite() || !y.allFinite()) throw InvalidArgument("svr: inputs must be finite");

  SvrModel model;
  model.scaler = numerics::Standardizer::fit(x);
  const Matrix xs = model.scaler.apply(x);
  double gamma = params.gamma;
  if (gamma <= 0.0) {
    const double mean = xs.mean();
    const double var = (xs.array() - mean).square().mean();
    gamma = var > 0.0 ? 1.0 / (static_cast<double>(xs.cols()) * var) : 1.0;
  }
  model.gamma = gamma;

  // Variables t < l are alpha_t (label +1), t >= l are alpha*_{t-l} (label -1).
  const Index l = x.rows();
  const Index n2 = 2 * l;
  const double C = params.C;
  Vector alpha = Vector::Zero(n2);
  Vector grad(n2);
  for (Index i = 0; i < l; ++i) {
    grad(i) = params.epsilon - y(i);
    grad(i + l) = params.epsilon + y(i);
  }
  auto sign = [l](Index t) { return t < l ? 1.0 : -1.0; };
  auto upper = [&](Index t) { return alpha(t) >= C; };
  auto lower = [&](Index t) { return alpha(t) <= 0.0; };

  KernelCache cache(xs, gamma, params.cache_mb);
  std::int64_t iter = 0;
  bool converged = false;
  while (iter < params.max_iter) {
    // Maximal violating i, then j by second-order gain.
    double gmax = -kInf, gmax2 = -kInf;
    Index i = -1, j = -1;
    for (Index t = 0; t < n2; ++t) {
      if (sign(t) > 0) {
        if (!upper(t) && -grad(t) >= gmax) {
          gmax = -grad(t);
          i = t;
        }
      } else if (!lower(t) && grad(t) >= gmax) {
        gmax = grad(t);
        i = t;
      }
    }
    if (i < 0) {
      converged = true;
      break;
    }
    const Vector& ki = cache.row(i % l);
    const double yi = sign(i);
    double obj_min = kInf;
    for (Index t = 0; t < n2; ++t) {
      const double qit = yi * sign(t) * ki(t % l);
      if (sign(t) > 0) {
        if (lower(t)) continue;
        const double diff = gmax + grad(t);
        gmax2 = std::max(gmax2, grad(t));
        if (diff > 0.0) {
          double quad = 2.0 - 2.0 * yi * qit;
          if (quad <= 0.0) quad = kTau;
          const double obj = -diff * diff / quad;
          if (obj <= obj_min) {
            obj_min = obj;
            j = t;
          }
        }
      } else {
        if (upper(t)) continue;
        const double diff = gmax - grad(t);
        gmax2 = std::max(gmax2, -grad(t));
        if (diff > 0.0) {
          double quad = 2.0 + 2.0 * yi * qit;
          if (quad <= 0.0) quad = kTau;
          const double obj = -diff * diff / quad;
          if (obj <= obj_min) {
            obj_min = obj;
            j = t;
          }
        }
      }
    }
    if (gmax + gmax2 < params.tol || j < 0) {
      converged = true;
      break;
    }
    ++iter;

    const double yj = sign(j);
    const Vector& kj = cache.row(j % l);
    const double qij = yi * yj * kj(i % l);
    const double ai_old = alpha(i), aj_old = alpha(j);
    double& ai = alpha(i);
    double& aj = alpha(j);
    if (yi != yj) {
      double quad = 2.0 + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad(i) - grad(j)) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > C) {
          ai = C;
          aj = C - diff;
        }
      } else if (aj > C) {
        aj = C;
        ai = C + diff;
      }
    } else {
      double quad = 2.0 - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad(i) - grad(j)) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C) {
        if (ai > C) {
          ai = C;
          aj = sum - C;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > C) {
        if (aj > C) {
          aj = C;
          ai = sum - C;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }
    const double dai = ai - ai_old, daj = aj - aj_old;
    // The cached row for i may have been evicted by fetching j; re-fetch.
    const Vector& ki2 = cache.row(i % l);
    for (Index t = 0; t < n2; ++t) {
      const double st = sign(t);
      grad(t) += st * (yi * ki2(t % l) * dai + yj * kj(t % l) * daj);
    }
  }
  if (!converged) {
    spdlog::warn("svr: stopped after {} iterations without reaching tolerance {}", iter, params.tol);
  }

  // Bias from free variables, else the midpoint of the feasible interval.
  double ub = kInf, lb = -kInf, sum_free = 0.0;
  Index n_free = 0;
  for (Index t = 0; t < n2; ++t) {
    const double yg = sign(t) * grad(t);
    if (upper(t)) {
      if (sign(t) < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (sign(t) > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
  model.bias = -rho;

  const Vector beta = alpha.head(l) - alpha.tail(l);
  Index n_sv = 0;
  for (Index i = 0; i < l; ++i) n_sv += beta(i) != 0.0;
  model.support.resize(n_sv, xs.cols());
  model.coef.resize(n_sv);
  for (Index i = 0, k = 0; i < l; ++i) {
    if (beta(i) == 0.0) continue;
    model.support.row(k) = xs.row(i);
    model.coef(k++) = beta(i);
  }

  if (info) {
    info->iterations = iter;
    info->converged = converged;
    double obj = 0.0;
    for (Index t = 0; t < n2; ++t) {
      const double p = t < l ? params.epsilon - y(t) : params.epsilon + y(t - l);
      obj += alpha(t) * (grad(t) + p);
    }
    info->objective = obj / 2.0;
    info->beta = beta;
    info->gamma = gamma;
  }
  return model;
}

Vector SvrModel::predict(const Matrix& x) const {
  if (x.cols() != scaler.dimension()) {
    throw DimensionMismatch("svr expects " + std::to_string(scaler.dimension()) + " features, got " +
                            std::to_string(x.cols()));
  }
  const Matrix xs = scaler.apply(x);
  if (support.rows() == 0) return Vector::Constant(x.rows(), bias);
  return (rbf_kernel(xs, support, gamma) * coef).array() + bias;
}

nlohmann::json SvrModel::to_json() const {
  nlohmann::json j;
  j["scaler"] = scaler.to_json();
  j["gamma"] = gamma;
  j["bias"] = bias;
  j["coef"] = std::vector<double>(coef.data(), coef.data() + coef.size());
  std::vector<double> flat(static_cast<std::size_t>(support.size()));
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(flat.data(), support.rows(),
                                                                                      support.cols()) = support;
  j["support"] = flat;
  return j;
}

SvrModel SvrModel::from_json(const nlohmann::json& j) {
  SvrModel m;
  m.scaler = numerics::Standardizer::from_json(j.at("scaler"));
  m.gamma = j.at("gamma").get<double>();
  m.bias = j.at("bias").get<double>();
  const auto coef = j.at("coef").get<std::vector<double>>();
  const auto flat = j.at("support").get<std::vector<double>>();
  const Index d = m.scaler.dimension();
  if (flat.size() != coef.size() * static_cast<std::size_t>(d)) throw InvalidArgument("svr artifact has inconsistent sizes");
  m.coef = Eigen::Map<const Vector>(coef.data(), static_cast<Index>(coef.size()));
  m.support = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      flat.data(), static_cast<Index>(coef.size()), d);
  return m;
}

}  // namespace mer::regressors
