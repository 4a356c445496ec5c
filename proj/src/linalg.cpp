#include "sbt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sbt/divergence.hpp"
#include "sbt/errors.hpp"

namespace sbt {

namespace {

constexpr int kMaxSweeps = 100;

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

}  // namespace

EigenDecomposition sym_eigen(const Matrix& input) {
  require_symmetric(input, "sym_eigen");
  const Eigen::Index n = input.rows();
  Matrix a = 0.5 * (input + input.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double scale = a.norm();

  bool converged = false;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double off = off_diagonal_norm(a);
    if (off == 0.0 || off <= 1e-15 * scale) {
      converged = true;
      break;
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Negligible against both diagonal entries: drop it.
        const double g = 100.0 * std::abs(apq);
        if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = a(p, r) = arp - s * (arq + arp * tau);
          a(r, q) = a(q, r) = arq + s * (arp - arq * tau);
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = vrp - s * (vrq + vrp * tau);
          v(r, q) = vrq + s * (vrp - vrq * tau);
        }
      }
    }
  }
  if (!converged) {
    const double off = off_diagonal_norm(a);
    if (!(off == 0.0 || off <= 1e-15 * scale)) {
      throw NumericalError("sym_eigen: no convergence after 100 sweeps");
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&a](Eigen::Index i, Eigen::Index j) { return a(i, i) > a(j, j); });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues[k] = a(src, src);
    out.eigenvectors.col(k) = v.col(src);
  }
  return out;
}

ScalarFunction scalar_log() {
  return {"log", [](double x) { return std::log(x); }, [](double x) { return x > 0.0; }};
}

ScalarFunction scalar_exp() { return {"exp", [](double x) { return std::exp(x); }, {}}; }

ScalarFunction scalar_pow(double e) {
  return {"pow", [e](double x) { return std::pow(x, e); }, [](double x) { return x > 0.0; }};
}

Matrix matrix_fn(const Matrix& a, const ScalarFunction& f) {
  const EigenDecomposition eig = sym_eigen(a);
  Vector mapped(eig.eigenvalues.size());
  for (Eigen::Index i = 0; i < mapped.size(); ++i) {
    const double lambda = eig.eigenvalues[i];
    if (f.domain && !f.domain(lambda)) {
      throw DomainError("matrix_fn(" + f.name + "): eigenvalue " + std::to_string(lambda) +
                        " outside the function domain");
    }
    mapped[i] = f.f(lambda);
  }
  const Matrix out = eig.eigenvectors * mapped.asDiagonal() * eig.eigenvectors.transpose();
  return 0.5 * (out + out.transpose());
}

}  // namespace sbt
