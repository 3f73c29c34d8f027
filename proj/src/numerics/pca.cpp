#include "mer/numerics/pca.hpp"

#include "mer/util/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace mer::numerics {
namespace {

void fix_signs(Matrix& components) {
  for (Index r = 0; r < components.rows(); ++r) {
    Index best = 0;
    double best_abs = -1.0;
    for (Index c = 0; c < components.cols(); ++c) {
      const double a = std::fabs(components(r, c));
      if (a > best_abs) {
        best_abs = a;
        best = c;
      }
    }
    if (components(r, best) < 0.0) components.row(r) *= -1.0;
  }
}

Matrix orthonormal_basis(const Matrix& y) {
  Eigen::HouseholderQR<Matrix> qr(y);
  return qr.householderQ() * Matrix::Identity(y.rows(), y.cols());
}

void exact_svd(const Matrix& x, const Vector& mean, Index k, Matrix& components, Vector& singular) {
  const Matrix centred = x.rowwise() - mean.transpose();
  Eigen::BDCSVD<Matrix> svd(centred, Eigen::ComputeThinV);
  components = svd.matrixV().leftCols(k).transpose();
  singular = svd.singularValues().head(k);
}

// Randomized range finder (subspace iteration). The centred matrix is never
// materialised: products with X - 1*mean^T are corrected on the fly.
void randomized_svd(const Matrix& x, const Vector& mean, Index k, const PcaOptions& options,
                    Matrix& components, Vector& singular) {
  const Index n = x.rows();
  const Index d = x.cols();
  const Index l = std::min<Index>(k + options.oversampling, std::min(n, d));
  Rng rng(options.seed);
  Matrix omega(d, l);
  for (Index j = 0; j < l; ++j)
    for (Index i = 0; i < d; ++i) omega(i, j) = rng.normal();

  const Vector ones = Vector::Ones(n);
  auto times = [&](const Matrix& m) -> Matrix {  // (X - 1 mean^T) m
    Matrix out = x * m;
    out -= ones * (mean.transpose() * m);
    return out;
  };
  auto transpose_times = [&](const Matrix& m) -> Matrix {  // (X - 1 mean^T)^T m
    Matrix out = x.transpose() * m;
    out -= mean * (ones.transpose() * m);
    return out;
  };

  Matrix q = orthonormal_basis(times(omega));
  for (int it = 0; it < options.power_iterations; ++it) {
    q = orthonormal_basis(transpose_times(q));
    q = orthonormal_basis(times(q));
  }
  const Matrix b = transpose_times(q).transpose();  // l x d
  Eigen::BDCSVD<Matrix> svd(b, Eigen::ComputeThinV);
  components = svd.matrixV().leftCols(k).transpose();
  singular = svd.singularValues().head(k);
}

}  // namespace

PcaModel fit_pca(const Matrix& x, Index k, const PcaOptions& options) {
  const Index n = x.rows();
  const Index d = x.cols();
  if (n < 2) throw InvalidArgument("PCA needs at least 2 rows");
  if (k < 1 || k > std::min(n - 1, d)) {
    throw InvalidArgument("PCA component count " + std::to_string(k) + " outside [1, " +
                          std::to_string(std::min(n - 1, d)) + "]");
  }
  if (!x.allFinite()) throw InvalidArgument("PCA input contains non-finite values");

  PcaModel model;
  model.mean = x.colwise().mean().transpose();
  bool degenerate = true;
  double total = 0.0;
  for (Index j = 0; j < d; ++j) {
    const auto col = x.col(j);
    if (degenerate && !(col.array() == col(0)).all()) degenerate = false;
    total += (col.array() - model.mean(j)).square().sum();
  }
  if (degenerate) throw NumericalError("zero variance: all rows are identical");
  model.total_variance = total / static_cast<double>(n - 1);

  bool use_randomized = false;
  switch (options.solver) {
    case PcaSolver::exact: use_randomized = false; break;
    case PcaSolver::randomized: use_randomized = true; break;
    case PcaSolver::automatic: use_randomized = std::min(n, d) > options.exact_limit; break;
  }

  Vector singular;
  if (use_randomized) {
    randomized_svd(x, model.mean, k, options, model.components, singular);
  } else {
    exact_svd(x, model.mean, k, model.components, singular);
  }
  fix_signs(model.components);
  model.explained_variance = singular.array().square() / static_cast<double>(n - 1);
  return model;
}

Matrix transform_pca(const PcaModel& model, const Matrix& x) {
  if (x.cols() != model.input_dimension()) {
    throw DimensionMismatch("PCA fitted on " + std::to_string(model.input_dimension()) + " columns, got " +
                            std::to_string(x.cols()));
  }
  return (x.rowwise() - model.mean.transpose()) * model.components.transpose();
}

Matrix inverse_transform_pca(const PcaModel& model, const Matrix& scores) {
  if (scores.cols() != model.n_components()) {
    throw DimensionMismatch("expected " + std::to_string(model.n_components()) + " PCA scores, got " +
                            std::to_string(scores.cols()));
  }
  return (scores * model.components).rowwise() + model.mean.transpose();
}

nlohmann::json PcaModel::to_json() const {
  nlohmann::json j;
  j["format"] = "mer.pca";
  j["version"] = 1;
  j["n_components"] = components.rows();
  j["input_dimension"] = components.cols();
  j["mean"] = std::vector<double>(mean.data(), mean.data() + mean.size());
  std::vector<double> rows;
  rows.reserve(static_cast<std::size_t>(components.size()));
  for (Index r = 0; r < components.rows(); ++r)
    for (Index c = 0; c < components.cols(); ++c) rows.push_back(components(r, c));
  j["components"] = std::move(rows);
  j["explained_variance"] =
      std::vector<double>(explained_variance.data(), explained_variance.data() + explained_variance.size());
  j["total_variance"] = total_variance;
  return j;
}

PcaModel PcaModel::from_json(const nlohmann::json& j) {
  if (j.at("format") != "mer.pca" || j.at("version") != 1) throw InvalidArgument("not a version-1 PCA artifact");
  const Index k = j.at("n_components").get<Index>();
  const Index d = j.at("input_dimension").get<Index>();
  const auto mean = j.at("mean").get<std::vector<double>>();
  const auto rows = j.at("components").get<std::vector<double>>();
  const auto var = j.at("explained_variance").get<std::vector<double>>();
  if (static_cast<Index>(mean.size()) != d || static_cast<Index>(rows.size()) != k * d ||
      static_cast<Index>(var.size()) != k) {
    throw InvalidArgument("PCA artifact has inconsistent dimensions");
  }
  PcaModel m;
  m.mean = Eigen::Map<const Vector>(mean.data(), d);
  m.components = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      rows.data(), k, d);
  m.explained_variance = Eigen::Map<const Vector>(var.data(), k);
  m.total_variance = j.at("total_variance").get<double>();
  return m;
}

}  // namespace mer::numerics
