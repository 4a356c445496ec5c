#pragma once

#include <functional>
#include <string>

#include "sbt/types.hpp"

namespace sbt {

struct EigenDecomposition {
  Vector eigenvalues;  // descending
  Matrix eigenvectors; // columns, orthonormal
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// ShapeError for non-symmetric input, NumericalError if the off-diagonal
/// mass has not vanished after 100 sweeps.
EigenDecomposition sym_eigen(const Matrix& a);

/// Scalar function with its admissible domain, for spectral calculus.
struct ScalarFunction {
  std::string name;
  std::function<double(double)> f;
  std::function<bool(double)> domain;  // empty means the whole real line
};

ScalarFunction scalar_log();
ScalarFunction scalar_exp();
/// x -> x^e on x > 0.
ScalarFunction scalar_pow(double e);

/// V f(L) V^T. DomainError if an eigenvalue falls outside f's domain.
Matrix matrix_fn(const Matrix& a, const ScalarFunction& f);

}  // namespace sbt
