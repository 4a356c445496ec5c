#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "sbt/csv.hpp"
#include "sbt/errors.hpp"
#include "sbt/linalg.hpp"
#include "sbt/norms.hpp"
#include "sbt/rng.hpp"

using sbt::Matrix;
using sbt::Vector;

TEST_CASE("rng is reproducible and split streams are order independent") {
  sbt::Rng a(42);
  sbt::Rng b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  const sbt::Rng root(7);
  sbt::Rng s3 = root.split(3);
  sbt::Rng s1 = root.split(1);
  sbt::Rng s3_again = root.split(3);
  const auto first = s3.next_u64();
  CHECK(first == s3_again.next_u64());
  CHECK(first != s1.next_u64());

  sbt::Rng other(43);
  CHECK(sbt::Rng(42).next_u64() != other.next_u64());
}

TEST_CASE("rng uniform and normal moments") {
  sbt::Rng rng(2024);
  const int n = 200000;
  double sum = 0.0;
  double sum_sq = 0.0;
  double usum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    usum += u;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum_sq / n - 1.0) < 0.02);
  CHECK(std::abs(usum / n - 0.5) < 0.005);

  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.uniform_index(7)];
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

TEST_CASE("csv writes 17 significant digits with a header and newline endings") {
  const auto dir = std::filesystem::temp_directory_path() / "sbt_csv_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "t.csv";
  {
    sbt::CsvWriter w(path, {"a", "b", "c"});
    w.cell(0.1).cell(3).cell("x");
    w.end_row();
    w.cell(1.0 / 3.0).cell(-2).cell("y");
    w.end_row();
    CHECK(w.rows_written() == 2);
    w.close();
  }
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "a,b,c\n0.10000000000000001,3,x\n0.33333333333333331,-2,y\n");
  CHECK(std::stod(sbt::format_double(1.0 / 3.0)) == 1.0 / 3.0);

  sbt::CsvWriter bad(dir / "bad.csv", {"a", "b"});
  bad.cell(1.0);
  CHECK_THROWS_AS(bad.end_row(), sbt::Error);
  CHECK_THROWS_AS(sbt::CsvWriter("/nonexistent_dir_sbt/x.csv", {"a"}), sbt::Error);
}

TEST_CASE("lp norms and signed powers") {
  Vector v(2);
  v << 3.0, -4.0;
  CHECK(sbt::lp_norm(v, 2.0) == doctest::Approx(5.0));
  CHECK(sbt::lp_norm(v, 1.0) == doctest::Approx(7.0));
  CHECK(sbt::lp_norm(Vector::Zero(3), 1.5) == 0.0);
  Vector big = Vector::Constant(4, 1e200);
  CHECK(sbt::lp_norm(big, 6.9) == doctest::Approx(1e200 * std::pow(4.0, 1.0 / 6.9)));
  const Vector sp = sbt::signed_power(v, 2.0, 2.0);
  CHECK(sp[0] == doctest::Approx(2.25));
  CHECK(sp[1] == doctest::Approx(-4.0));
}

TEST_CASE("sym_eigen examples") {
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  auto e = sbt::sym_eigen(d);
  CHECK(e.eigenvalues[0] == doctest::Approx(3.0));
  CHECK(e.eigenvalues[1] == doctest::Approx(1.0));
  CHECK((e.eigenvectors.cwiseAbs() - Matrix::Identity(2, 2)).norm() < 1e-14);

  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  e = sbt::sym_eigen(a);
  CHECK(e.eigenvalues[0] == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(e.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));

  Matrix asym(2, 2);
  asym << 1, 2, 0, 1;
  CHECK_THROWS_AS(sbt::sym_eigen(asym), sbt::ShapeError);
}

TEST_CASE("sym_eigen reconstruction and orthogonality on random symmetric matrices") {
  sbt::Rng rng(11);
  for (int n : {1, 2, 5, 8, 16}) {
    for (int rep = 0; rep < 20; ++rep) {
      Matrix b(n, n);
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) b(i, j) = rng.normal();
      const Matrix a = 0.5 * (b + b.transpose());
      const auto e = sbt::sym_eigen(a);
      const Matrix rec = e.eigenvectors * e.eigenvalues.asDiagonal() * e.eigenvectors.transpose();
      CHECK((rec - a).norm() <= 1e-10 * a.norm());
      CHECK((e.eigenvectors.transpose() * e.eigenvectors - Matrix::Identity(n, n)).norm() <= 1e-10);
      for (int i = 1; i < n; ++i) CHECK(e.eigenvalues[i - 1] >= e.eigenvalues[i]);
      // Independent oracle: Eigen's own solver.
      Eigen::SelfAdjointEigenSolver<Matrix> ref(a);
      for (int i = 0; i < n; ++i) {
        CHECK(std::abs(e.eigenvalues[i] - ref.eigenvalues()[n - 1 - i]) <= 1e-10 * std::max(1.0, a.norm()));
      }
    }
  }
}

TEST_CASE("matrix_fn examples and roundtrip") {
  const Matrix id = Matrix::Identity(3, 3);
  CHECK(sbt::matrix_fn(id, sbt::scalar_log()).norm() < 1e-15);

  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = std::numbers::e;
  d(1, 1) = 1.0;
  const Matrix l = sbt::matrix_fn(d, sbt::scalar_log());
  CHECK(l(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(l(1, 1)) < 1e-15);
  CHECK(std::abs(l(0, 1)) < 1e-15);

  sbt::Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const int n = 4;
    Matrix b(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) b(i, j) = rng.normal();
    const Matrix a = b * b.transpose() + 0.1 * Matrix::Identity(n, n);
    const Matrix sym = 0.5 * (a + a.transpose());
    const Matrix back = sbt::matrix_fn(sbt::matrix_fn(sym, sbt::scalar_log()), sbt::scalar_exp());
    CHECK((back - sym).norm() <= 1e-9 * std::max(1.0, sym.norm()));
    const Matrix root = sbt::matrix_fn(sym, sbt::scalar_pow(0.5));
    CHECK((root * root - sym).norm() <= 1e-9 * std::max(1.0, sym.norm()));
  }

  Matrix neg = Matrix::Identity(2, 2);
  neg(1, 1) = -1.0;
  CHECK_THROWS_AS(sbt::matrix_fn(neg, sbt::scalar_log()), sbt::DomainError);
}
