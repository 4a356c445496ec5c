#pragma once

#include <array>
#include <functional>
#include <string>
#include <string_view>

#include "sbt/divergence.hpp"
#include "sbt/rng.hpp"
#include "sbt/types.hpp"

namespace sbt {

enum class RowId {
  CosineRowI,
  DualNormRowII,
  SphereRowIII,
  HyperRowIV,
  SimplexKLRowV,
  GeomISRowVI,
  VonNeumannRowVII,
  LogDetRowVIII,
};

inline constexpr std::array<RowId, 8> kAllRows = {
    RowId::CosineRowI,    RowId::DualNormRowII, RowId::SphereRowIII,     RowId::HyperRowIV,
    RowId::SimplexKLRowV, RowId::GeomISRowVI,   RowId::VonNeumannRowVII, RowId::LogDetRowVIII,
};

/// Roman numeral ("I" .. "VIII").
std::string_view row_label(RowId id);
/// Accepts "I".."VIII" (case-insensitive) or 1..8.
RowId parse_row(std::string_view text);

struct CatalogParams {
  double W = 1.0;  // norm radius for row II
  int d = 3;       // vector dimension, or matrix side for rows VII/VIII
  double q = 3.0;  // exponent for row II
};

using PairFunction = std::function<double(const Vector&, const Vector&)>;

/// One (phi, g, closed-form D_phi-dagger) family.
///
/// `gen` and `scaler` act on native coordinates. For rows III/IV these are
/// the lifted points in R^{d+1}; `lift` maps tangent inputs there and is
/// the identity for the other rows. Matrix rows take column-major
/// flattened symmetric matrices. `closed_form` and `sample` work in
/// un-lifted coordinates.
struct CatalogEntry {
  RowId id{};
  Generator gen;
  Scaler scaler;
  PairFunction closed_form;
  std::function<Vector(const Vector&)> lift;
  std::function<Vector(Rng&)> sample;
  std::string domain_desc;
  CatalogParams params;
};

CatalogEntry catalog_entry(RowId id, const CatalogParams& params = {});

/// Samples `trials` valid pairs and returns the largest relative gap
/// between the closed form and either side of the scaled identity.
/// ArgumentError if trials < 1.
double closed_form_vs_generic(RowId id, int trials, Rng& rng, const CatalogParams& params = {});

/// Random symmetric positive definite d x d matrix with spectrum in
/// roughly [0.5, 10].
Matrix random_spd(int d, Rng& rng);

// Standalone generators used by the catalog.

/// phi(x) = (W^2 + ||x||_q^2) / 2.
Generator lq_squared_generator(double q, double W);
/// phi(x) = -d - sum_i log x_i on the positive orthant.
Generator burg_generator();
/// phi(X) = tr(X log X - X) on flattened symmetric PD matrices.
Generator von_neumann_generator();
/// phi(X) = -d - log det X on flattened symmetric PD matrices.
Generator logdet_generator();

}  // namespace sbt
