#include "mer/numerics/standardize.hpp"

#include <cmath>

namespace mer::numerics {

Standardizer Standardizer::fit(const Matrix& x) {
  if (x.rows() < 1) throw InvalidArgument("standardizer needs at least one row");
  Standardizer s;
  const Index d = x.cols();
  const double n = static_cast<double>(x.rows());
  s.mean = x.colwise().mean().transpose();
  s.scale = Vector::Ones(d);
  s.constant.assign(static_cast<std::size_t>(d), false);
  for (Index j = 0; j < d; ++j) {
    const auto col = x.col(j);
    const bool all_equal = (col.array() == col(0)).all();
    if (all_equal) {
      s.constant[static_cast<std::size_t>(j)] = true;
      s.mean(j) = 0.0;
      continue;
    }
    const double var = (col.array() - s.mean(j)).square().sum() / n;
    s.scale(j) = std::sqrt(var);
  }
  return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
  if (x.cols() != mean.size()) {
    throw DimensionMismatch("standardizer fitted on " + std::to_string(mean.size()) + " columns, got " +
                            std::to_string(x.cols()));
  }
  Matrix out = x;
  for (Index j = 0; j < x.cols(); ++j) {
    if (constant[static_cast<std::size_t>(j)]) continue;
    out.col(j) = (x.col(j).array() - mean(j)) / scale(j);
  }
  return out;
}

nlohmann::json Standardizer::to_json() const {
  nlohmann::json j;
  j["format"] = "mer.standardizer";
  j["version"] = 1;
  j["mean"] = std::vector<double>(mean.data(), mean.data() + mean.size());
  j["scale"] = std::vector<double>(scale.data(), scale.data() + scale.size());
  j["constant"] = constant;
  return j;
}

Standardizer Standardizer::from_json(const nlohmann::json& j) {
  if (j.at("format") != "mer.standardizer" || j.at("version") != 1) {
    throw InvalidArgument("not a version-1 standardizer artifact");
  }
  Standardizer s;
  const auto mean = j.at("mean").get<std::vector<double>>();
  const auto scale = j.at("scale").get<std::vector<double>>();
  s.constant = j.at("constant").get<std::vector<bool>>();
  if (mean.size() != scale.size() || mean.size() != s.constant.size()) {
    throw InvalidArgument("standardizer artifact has inconsistent lengths");
  }
  s.mean = Eigen::Map<const Vector>(mean.data(), static_cast<Index>(mean.size()));
  s.scale = Eigen::Map<const Vector>(scale.data(), static_cast<Index>(scale.size()));
  return s;
}

}  // namespace mer::numerics
