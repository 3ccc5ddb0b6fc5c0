#pragma once

#include <stdexcept>
#include <string>

namespace gcreg {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or intrinsic-dimension mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Matrix expected to be symmetric is not within tolerance.
class AsymmetryError : public Error {
 public:
  using Error::Error;
};

/// Input columns are not linearly independent.
class RankDeficiencyError : public Error {
 public:
  using Error::Error;
};

/// Fewer samples than a statistic requires (e.g. variance of < 2 values).
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// A pairing estimator found no qualifying pair; raise alpha and retry.
class NoPairsError : public Error {
 public:
  using Error::Error;
};

/// Estimator input is degenerate (e.g. constant response in SIR).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

/// Linear system is singular and no regularization was requested.
class SingularSystemError : public Error {
 public:
  using Error::Error;
};

/// Operation requires planted ground truth that the dataset lacks.
class TruthUnavailableError : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration violates the schema; message names the key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gcreg
