#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace mer {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class IngestError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

enum class Target { valence, arousal };

inline const char* to_string(Target t) { return t == Target::valence ? "valence" : "arousal"; }

inline constexpr Target kTargets[] = {Target::valence, Target::arousal};

}  // namespace mer
