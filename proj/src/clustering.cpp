#include "sbt/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "sbt/csv.hpp"
#include "sbt/errors.hpp"

namespace sbt {

namespace {

constexpr double kSphereLimit = std::numbers::pi - 1e-9;

double min_d_rec(const Vector& p, const PointSet& centers, Manifold m) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : centers) best = std::min(best, d_rec_embedded(p, c, m));
  return best;
}

void require_points(const PointSet& points, const char* where) {
  if (points.empty()) throw ArgumentError(std::string(where) + ": no points");
  const auto d = points.front().size();
  for (const auto& p : points) {
    if (p.size() != d) throw ShapeError(std::string(where) + ": points differ in dimension");
  }
}

}  // namespace

PointSet embed_all(const PointSet& tangent, Manifold m) {
  PointSet out;
  out.reserve(tangent.size());
  for (const auto& x : tangent) out.push_back(embed(x, m));
  return out;
}

double potential_embedded(const PointSet& points, const PointSet& centers, Manifold m) {
  if (centers.empty()) throw ArgumentError("potential: no centers");
  double total = 0.0;
  for (const auto& p : points) total += min_d_rec(p, centers, m);
  return total;
}

double potential(const PointSet& tangent_points, const PointSet& tangent_centers, Manifold m) {
  return potential_embedded(embed_all(tangent_points, m), embed_all(tangent_centers, m), m);
}

SeedingResult kmeanspp_seed(const PointSet& tangent_points, int k, Manifold m, Rng& rng) {
  require_points(tangent_points, "kmeanspp_seed");
  const std::size_t n = tangent_points.size();
  if (k < 1 || static_cast<std::size_t>(k) > n) throw ArgumentError("kmeanspp_seed: need 1 <= k <= n");

  const PointSet pts = embed_all(tangent_points, m);
  std::vector<char> chosen(n, 0);
  std::vector<double> weight(n, std::numeric_limits<double>::infinity());
  SeedingResult out;

  auto add_center = [&](std::size_t idx) {
    chosen[idx] = 1;
    out.indices.push_back(idx);
    for (std::size_t i = 0; i < n; ++i) weight[i] = std::min(weight[i], d_rec_embedded(pts[i], pts[idx], m));
  };

  add_center(static_cast<std::size_t>(rng.uniform_index(n)));
  while (out.indices.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += weight[i];
    if (total > 0.0) {
      double prob_sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) prob_sum += weight[i] / total;
      out.max_probability_error = std::max(out.max_probability_error, std::abs(prob_sum - 1.0));

      const double u = rng.uniform() * total;
      double acc = 0.0;
      std::size_t pick = n;
      std::size_t last_positive = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (weight[i] <= 0.0) continue;
        last_positive = i;
        acc += weight[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
      add_center(pick < n ? pick : last_positive);
    } else {
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) rest.push_back(i);
      }
      add_center(rest[static_cast<std::size_t>(rng.uniform_index(rest.size()))]);
    }
  }

  for (std::size_t idx : out.indices) out.centers.push_back(unembed(pts[idx], m));
  for (std::size_t i = 0; i < n; ++i) out.potential += weight[i];
  return out;
}

Vector manifold_centroid(const PointSet& embedded, const std::vector<std::size_t>& members, Manifold m) {
  if (members.empty()) throw ArgumentError("manifold_centroid: empty cluster");
  Vector sum = Vector::Zero(embedded[members.front()].size());
  for (std::size_t i : members) sum += embedded[i];
  if (m == Manifold::sphere) {
    const double norm = sum.norm();
    if (!(norm > 1e-12 * static_cast<double>(members.size()))) {
      throw DomainError("manifold_centroid: cluster mean vanishes on the sphere");
    }
    return sum / norm;
  }
  return sum / std::sqrt(-minkowski(sum, sum));
}

BruteForceResult brute_force_opt(const PointSet& tangent_points, int k, Manifold m) {
  require_points(tangent_points, "brute_force_opt");
  const int n = static_cast<int>(tangent_points.size());
  if (k < 1 || k > 3) throw ArgumentError("brute_force_opt: k must lie in [1, 3]");
  if (n > 12) throw ArgumentError("brute_force_opt: at most 12 points");

  const PointSet pts = embed_all(tangent_points, m);
  BruteForceResult best;
  best.potential = std::numeric_limits<double>::infinity();

  // Restricted growth strings: label[0] = 0, label[i] <= 1 + max(label[0..i-1]) and < k.
  std::vector<int> label(static_cast<std::size_t>(n), 0);
  std::vector<int> prefix_max(static_cast<std::size_t>(n), 0);
  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(k));
  while (true) {
    for (auto& mem : members) mem.clear();
    for (int i = 0; i < n; ++i) members[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])].push_back(static_cast<std::size_t>(i));

    double total = 0.0;
    bool valid = true;
    for (const auto& mem : members) {
      if (mem.empty()) continue;
      Vector c;
      try {
        c = manifold_centroid(pts, mem, m);
      } catch (const DomainError&) {
        valid = false;
        break;
      }
      for (std::size_t i : mem) total += d_rec_embedded(pts[i], c, m);
    }
    if (!valid) {
      ++best.skipped_partitions;
    } else if (total < best.potential) {
      best.potential = total;
      best.labels = label;
    }

    // Next restricted growth string.
    int i = n - 1;
    while (i > 0) {
      const auto ui = static_cast<std::size_t>(i);
      const int cap = std::min(k - 1, prefix_max[ui - 1] + 1);
      if (label[ui] < cap) break;
      --i;
    }
    if (i <= 0) break;
    const auto ui = static_cast<std::size_t>(i);
    ++label[ui];
    prefix_max[ui] = std::max(prefix_max[ui - 1], label[ui]);
    for (int j = i + 1; j < n; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      label[uj] = 0;
      prefix_max[uj] = prefix_max[uj - 1];
    }
  }
  if (!std::isfinite(best.potential)) throw NumericalError("brute_force_opt: every partition was degenerate");
  return best;
}

LloydResult skm_lloyd(const PointSet& sphere_points, const PointSet& init_centers, int max_iters,
                      double rel_tol) {
  require_points(sphere_points, "skm_lloyd");
  if (init_centers.empty()) throw ArgumentError("skm_lloyd: no initial centers");
  if (max_iters < 0) throw ArgumentError("skm_lloyd: negative max_iters");
  const Manifold m = Manifold::sphere;
  const std::size_t n = sphere_points.size();
  const std::size_t k = init_centers.size();

  LloydResult out;
  out.centers = init_centers;
  out.labels.assign(n, 0);

  auto assign = [&](std::vector<int>& labels, std::vector<double>& cost) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int arg = 0;
      for (std::size_t j = 0; j < k; ++j) {
        const double v = d_rec_embedded(sphere_points[i], out.centers[j], m);
        if (v < best) {
          best = v;
          arg = static_cast<int>(j);
        }
      }
      labels[i] = arg;
      cost[i] = best;
      total += best;
    }
    return total;
  };

  std::vector<double> cost(n, 0.0);
  double pot = assign(out.labels, cost);
  out.trace.push_back(pot);

  for (int it = 0; it < max_iters; ++it) {
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(out.labels[i])].push_back(i);
    for (std::size_t j = 0; j < k; ++j) {
      if (members[j].empty()) {
        const auto far = static_cast<std::size_t>(std::max_element(cost.begin(), cost.end()) - cost.begin());
        out.centers[j] = sphere_points[far];
        cost[far] = 0.0;
        ++out.relocations;
        continue;
      }
      try {
        out.centers[j] = manifold_centroid(sphere_points, members[j], m);
      } catch (const DomainError&) {
        // Antipodally balanced cluster: any unit vector is optimal; keep the old center.
      }
    }
    std::vector<int> labels(n, 0);
    const double next = assign(labels, cost);
    const bool stable = labels == out.labels;
    out.labels = std::move(labels);
    out.trace.push_back(next);
    out.iterations = it + 1;
    const double improvement = pot > 0.0 ? (pot - next) / pot : 0.0;
    pot = next;
    if (stable || improvement < rel_tol) break;
  }
  return out;
}

PointSet forgy_init(const PointSet& points, int k, Rng& rng) {
  if (k < 1 || static_cast<std::size_t>(k) > points.size()) throw ArgumentError("forgy_init: need 1 <= k <= n");
  std::vector<std::size_t> idx(points.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  PointSet out;
  for (std::size_t i = 0; i < static_cast<std::size_t>(k); ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(idx.size() - i));
    std::swap(idx[i], idx[j]);
    out.push_back(points[idx[i]]);
  }
  return out;
}

PointSet draw_cluster_mixture(int k, int n, Rng& rng, const MixtureConfig& cfg) {
  if (k < 1 || k > 50) throw ArgumentError("draw_cluster_mixture: k must lie in [1, 50]");
  if (n < 1) throw ArgumentError("draw_cluster_mixture: n must be positive");
  const int d = cfg.dim;

  auto in_disc = [&rng, d](double radius) {
    Vector dir = rng.normal_vector(d);
    while (!(dir.norm() > 0.0)) dir = rng.normal_vector(d);
    return Vector(radius * std::pow(rng.uniform(), 1.0 / d) * dir / dir.norm());
  };

  const int components = 2 * k;
  PointSet centers;
  for (int c = 0; c < components; ++c) centers.push_back(in_disc(cfg.center_radius));

  PointSet out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(rng.uniform_index(static_cast<std::uint64_t>(components)));
    Vector x = centers[c] + (c % 2 == 0 ? Vector(cfg.gaussian_sd * rng.normal_vector(d)) : in_disc(cfg.disc_radius));
    const double r = x.norm();
    if (r >= kSphereLimit) x *= kSphereLimit / r;
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<ClusterRow> run_cluster_experiment(const ClusterConfig& cfg, const Rng& rng) {
  if (cfg.runs < 1) throw ArgumentError("run_cluster_experiment: runs must be >= 1");
  std::vector<ClusterRow> rows;
  for (int k : cfg.ks) {
    if (k < 1 || k > 50) throw ArgumentError("run_cluster_experiment: k must lie in [1, 50]");
    if (k > cfg.n) throw ArgumentError("run_cluster_experiment: k exceeds n");
    for (int run = 0; run < cfg.runs; ++run) {
      Rng r = rng.split(static_cast<std::uint64_t>(k)).split(static_cast<std::uint64_t>(run));
      const PointSet tangent = draw_cluster_mixture(k, cfg.n, r, cfg.mixture);
      const PointSet sphere = embed_all(tangent, Manifold::sphere);

      const LloydResult forgy = skm_lloyd(sphere, forgy_init(sphere, k, r), cfg.max_iters, cfg.rel_tol);
      const SeedingResult seed = kmeanspp_seed(tangent, k, Manifold::sphere, r);
      PointSet seed_centers;
      for (std::size_t idx : seed.indices) seed_centers.push_back(sphere[idx]);
      const LloydResult refined = skm_lloyd(sphere, seed_centers, cfg.max_iters, cfg.rel_tol);

      ClusterRow row;
      row.k = k;
      row.run = run;
      row.pot_gkm = seed.potential;
      row.pot_skm_forgy = forgy.trace.back();
      row.pot_skm_gkm = refined.trace.back();
      row.iters_forgy = forgy.iterations;
      row.iters_gkm = refined.iterations;
      rows.push_back(row);
    }
  }
  return rows;
}

void write_cluster_csv(const std::filesystem::path& path, const std::vector<ClusterRow>& rows) {
  CsvWriter out(path, {"k", "run", "pot_gkm", "pot_skm_forgy", "pot_skm_gkm", "iters_forgy", "iters_gkm"});
  for (const auto& r : rows) {
    out.cell(r.k).cell(r.run).cell(r.pot_gkm).cell(r.pot_skm_forgy).cell(r.pot_skm_gkm);
    out.cell(r.iters_forgy).cell(r.iters_gkm);
    out.end_row();
  }
  out.close();
}

}  // namespace sbt
