#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "sbt/manifold.hpp"
#include "sbt/rng.hpp"
#include "sbt/types.hpp"

namespace sbt {

using PointSet = std::vector<Vector>;

/// Embeds tangent-plane points with the manifold's exponential map.
PointSet embed_all(const PointSet& tangent, Manifold m);

/// sum_i min_j D_rec between embedded points and embedded centers.
double potential_embedded(const PointSet& points, const PointSet& centers, Manifold m);
/// Same, for tangent-plane points and centers.
double potential(const PointSet& tangent_points, const PointSet& tangent_centers, Manifold m);

struct SeedingResult {
  PointSet centers;                  // tangent plane, via the log map
  std::vector<std::size_t> indices;  // chosen data points, in order
  double potential = 0.0;
  double max_probability_error = 0.0;  // max over rounds of |sum of probabilities - 1|
};

/// k-means++ seeding with D_rec as the sampling weight: first center
/// uniform, then proportional to the current minimum D_rec. When every
/// remaining weight is zero the next center is uniform over unchosen points.
SeedingResult kmeanspp_seed(const PointSet& tangent_points, int k, Manifold m, Rng& rng);

struct BruteForceResult {
  double potential = 0.0;
  std::vector<int> labels;
  std::size_t skipped_partitions = 0;  // sphere clusters with a vanishing mean
};

/// Exact optimum over all partitions into at most k clusters, each cluster
/// centered at its embedded mean renormalised onto the manifold.
/// ArgumentError unless 1 <= k <= 3 and 1 <= n <= 12.
BruteForceResult brute_force_opt(const PointSet& tangent_points, int k, Manifold m);

/// Exact optimal center of a cluster of embedded points: m/||m|| on the
/// sphere, m/sqrt(-<m,m>) on the hyperboloid. DomainError if the sphere
/// mean vanishes.
Vector manifold_centroid(const PointSet& embedded, const std::vector<std::size_t>& members, Manifold m);

struct LloydResult {
  PointSet centers;           // embedded, unit norm
  std::vector<int> labels;
  std::vector<double> trace;  // potential at init, then after each iteration
  int iterations = 0;
  int relocations = 0;        // empty clusters re-seeded at the farthest point
};

/// Spherical k-means on unit vectors. Stops when assignments are stable,
/// when the relative improvement falls below rel_tol, or after max_iters.
LloydResult skm_lloyd(const PointSet& sphere_points, const PointSet& init_centers, int max_iters = 100,
                      double rel_tol = 1e-3);

/// Forgy initialisation: k distinct data points chosen uniformly.
PointSet forgy_init(const PointSet& points, int k, Rng& rng);

/// 2k components alternating isotropic Gaussians and uniform discs on the
/// tangent plane of S^d, clipped radially into the open pi-ball.
struct MixtureConfig {
  int dim = 2;
  double center_radius = 2.5;
  double gaussian_sd = 0.2;
  double disc_radius = 0.3;
};

PointSet draw_cluster_mixture(int k, int n, Rng& rng, const MixtureConfig& cfg = {});

struct ClusterConfig {
  std::vector<int> ks{5, 10};
  int n = 500;
  int runs = 20;
  int max_iters = 100;
  double rel_tol = 1e-3;
  MixtureConfig mixture;
};

struct ClusterRow {
  int k = 0;
  int run = 0;
  double pot_gkm = 0.0;
  double pot_skm_forgy = 0.0;
  double pot_skm_gkm = 0.0;
  int iters_forgy = 0;
  int iters_gkm = 0;
};

/// For each (k, run), on a fresh mixture: SKM from Forgy, GKM seeding
/// alone, and SKM initialised by GKM. Run (k, r) uses rng.split(k).split(r).
std::vector<ClusterRow> run_cluster_experiment(const ClusterConfig& cfg, const Rng& rng);

void write_cluster_csv(const std::filesystem::path& path, const std::vector<ClusterRow>& rows);

}  // namespace sbt
