#include "mer/numerics/ols.hpp"

#include "mer/numerics/special.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mer::numerics {
namespace {

std::vector<double> to_std(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector from_std(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

}  // namespace

OlsSummary ols_fit(const Matrix& x, const Vector& y) {
  const Index n = x.rows();
  const Index d = x.cols();
  if (y.size() != n) throw DimensionMismatch("OLS: X has " + std::to_string(n) + " rows, y has " + std::to_string(y.size()));
  if (n < 1) throw InvalidArgument("OLS needs at least one row");
  if (!x.allFinite() || !y.allFinite()) throw InvalidArgument("OLS input contains non-finite values");

  const Index p = d + 1;
  Matrix design(n, p);
  design.col(0).setOnes();
  design.rightCols(d) = x;

  Eigen::BDCSVD<Matrix> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  const double tol = static_cast<double>(std::max(n, p)) * std::numeric_limits<double>::epsilon() *
                     (sv.size() > 0 ? sv(0) : 0.0);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;

  const Matrix& u = svd.matrixU();
  const Matrix& v = svd.matrixV();
  Vector inv_s = Vector::Zero(sv.size());
  for (Index i = 0; i < rank; ++i) inv_s(i) = 1.0 / sv(i);

  OlsSummary s;
  s.rank = rank;
  s.coefficients = v * (inv_s.asDiagonal() * (u.transpose() * y));

  // A coefficient is identifiable iff its unit vector lies in the row space
  // of the design, i.e. it has no component along the null space.
  s.unreliable.assign(static_cast<std::size_t>(p), false);
  if (rank < p) {
    const Matrix row_space = v.leftCols(rank);
    for (Index j = 0; j < p; ++j) {
      const double in_row_space = row_space.row(j).squaredNorm();
      s.unreliable[static_cast<std::size_t>(j)] = (1.0 - in_row_space) > 1e-10;
    }
    spdlog::debug("OLS design is rank deficient (rank {} of {}); using the pseudo-inverse", rank, p);
  }

  const Vector residuals = y - design * s.coefficients;
  const double rss = residuals.squaredNorm();
  const double tss = (y.array() - y.mean()).square().sum();
  s.r_squared_train = tss > 0.0 ? 1.0 - rss / tss : std::numeric_limits<double>::quiet_NaN();

  s.residual_df = static_cast<double>(n - rank);
  if (n > p && s.residual_df > 0.0) {
    s.inference_available = true;
    s.sigma2 = rss / s.residual_df;
    // diag((A^T A)^+) = sum_i V_ji^2 / s_i^2 over the retained singular values.
    const Vector diag = v.leftCols(rank).array().square().matrix() * inv_s.head(rank).array().square().matrix();
    s.std_errors = (s.sigma2 * diag.array()).sqrt();
    s.t_stats.resize(p);
    s.p_values.resize(p);
    for (Index j = 0; j < p; ++j) {
      if (s.std_errors(j) > 0.0) {
        s.t_stats(j) = s.coefficients(j) / s.std_errors(j);
        s.p_values(j) = student_t_two_sided_p(s.t_stats(j), s.residual_df);
      } else {
        // Perfect fit: any nonzero coefficient is infinitely significant.
        s.t_stats(j) = s.coefficients(j) == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), s.coefficients(j));
        s.p_values(j) = s.coefficients(j) == 0.0 ? 1.0 : 0.0;
      }
    }
  } else {
    s.sigma2 = s.residual_df > 0.0 ? rss / s.residual_df : std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

Vector OlsSummary::predict(const Matrix& x) const {
  if (x.cols() + 1 != coefficients.size()) {
    throw DimensionMismatch("OLS model expects " + std::to_string(coefficients.size() - 1) + " columns, got " +
                            std::to_string(x.cols()));
  }
  return (x * coefficients.tail(x.cols())).array() + coefficients(0);
}

nlohmann::json OlsSummary::to_json() const {
  nlohmann::json j;
  j["coefficients"] = to_std(coefficients);
  j["inference_available"] = inference_available;
  if (inference_available) {
    j["std_errors"] = to_std(std_errors);
    j["t_stats"] = to_std(t_stats);
    j["p_values"] = to_std(p_values);
  }
  j["unreliable"] = unreliable;
  j["rank"] = rank;
  j["residual_df"] = residual_df;
  j["sigma2"] = std::isfinite(sigma2) ? nlohmann::json(sigma2) : nlohmann::json(nullptr);
  j["r_squared_train"] = std::isfinite(r_squared_train) ? nlohmann::json(r_squared_train) : nlohmann::json(nullptr);
  return j;
}

OlsSummary OlsSummary::from_json(const nlohmann::json& j) {
  OlsSummary s;
  s.coefficients = from_std(j.at("coefficients").get<std::vector<double>>());
  s.inference_available = j.at("inference_available").get<bool>();
  if (s.inference_available) {
    s.std_errors = from_std(j.at("std_errors").get<std::vector<double>>());
    s.t_stats = from_std(j.at("t_stats").get<std::vector<double>>());
    s.p_values = from_std(j.at("p_values").get<std::vector<double>>());
  }
  s.unreliable = j.at("unreliable").get<std::vector<bool>>();
  s.rank = j.at("rank").get<Index>();
  s.residual_df = j.at("residual_df").get<double>();
  const auto nan = std::numeric_limits<double>::quiet_NaN();
  s.sigma2 = j.at("sigma2").is_null() ? nan : j.at("sigma2").get<double>();
  s.r_squared_train = j.at("r_squared_train").is_null() ? nan : j.at("r_squared_train").get<double>();
  return s;
}

}  // namespace mer::numerics
