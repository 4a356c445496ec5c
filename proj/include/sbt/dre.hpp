#pragma once

#include <filesystem>
#include <functional>
#include <vector>

#include "sbt/divergence.hpp"
#include "sbt/rng.hpp"
#include "sbt/types.hpp"

namespace sbt {

/// Isotropic Gaussian class-conditionals. Classes are 0-based and the last
/// one (index C-1) is the reference class of every density ratio.
struct MixtureSpec {
  Vector priors;               // simplex, all entries > 0
  std::vector<Vector> means;   // one per class
  Vector stds;                 // one per class, > 0

  int classes() const { return static_cast<int>(priors.size()); }
  int dim() const { return means.empty() ? 0 : static_cast<int>(means.front().size()); }
  /// ArgumentError on any broken invariant.
  void validate() const;
};

struct LabeledDataset {
  Matrix x;               // one row per sample
  std::vector<int> y;     // 0-based class index

  std::size_t size() const { return y.size(); }
};

/// (C-1) tilde-priors pi_c / (1 - pi_C) together with pi_C.
struct TildePrior {
  Vector tilde;
  double reference = 0.0;
};

TildePrior tilde_prior(const Vector& priors);

/// ArgumentError if N < C.
LabeledDataset sample_dataset(const MixtureSpec& spec, int n, Rng& rng);

/// log N(x; mu_c, sigma_c^2 I).
double class_log_density(const MixtureSpec& spec, int c, const Vector& x);

/// Pr(Y = c | X = x) for every class, computed with log-sum-exp.
Vector true_posterior(const MixtureSpec& spec, const Vector& x);

/// eta_c = p_c (1 - pi_C) / pi_c for every c, including the reference
/// class; the last entry is the extension that makes ratios exact.
Vector eta_from_posterior(const Vector& posterior, const Vector& priors);

/// r_c = eta_c / eta_C for c < C. DomainError if eta_C <= 0.
Vector density_ratio_estimate(const Vector& eta);

/// Analytic ratios N(x; mu_c) / N(x; mu_C) for c < C.
Vector true_density_ratio(const MixtureSpec& spec, const Vector& x);

/// Binary shortcut: (1 - pi)/pi * eta / (1 - eta), with pi = Pr(Y = positive).
double binary_density_ratio(double eta, double pi);

/// g(z) = pi_C / (1 - pi_C) + tilde_pi^T z (affine).
Scaler dre_scaler(const Vector& priors);

/// Linear softmax model over [x, 1].
struct SoftmaxModel {
  Matrix weights;  // C x (d + 1), last column is the bias

  Vector posterior(const Vector& x) const;
  double mean_log_loss(const LabeledDataset& data) const;
};

struct FitReport {
  std::vector<double> loss_per_epoch;  // loss after each epoch
  int halvings = 0;
};

/// Full-batch gradient descent on the mean cross-entropy with step
/// halving whenever an epoch would increase the loss.
/// ArgumentError for epochs < 1 or step <= 0; FitError with a single class.
SoftmaxModel fit_softmax(const LabeledDataset& data, int classes, int epochs, double step,
                         FitReport* report = nullptr);

/// Returns a posterior (simplex) estimate at x.
using PosteriorProvider = std::function<Vector(const Vector&)>;

struct Lemma1Result {
  double lhs = 0.0;          // E_M[D_phi(eta || eta-hat)]
  double rhs = 0.0;          // (1 - pi_C) E_{P_C}[D_phi-dagger(r || r-hat)]
  double absdiff = 0.0;
  double stderr_diff = 0.0;  // standard error of the paired difference
  int samples = 0;

  bool within(double sigmas) const { return absdiff <= sigmas * stderr_diff + 1e-12; }
};

/// Paired Monte Carlo: draw i shares its standard normal vector between the
/// mixture draw and the reference-class draw. ArgumentError if n_mc < 1000.
Lemma1Result lemma1_check(const MixtureSpec& spec, const PosteriorProvider& estimate,
                          const Generator& phi, int n_mc, Rng& rng);

/// Spec drawn as in the synthetic benchmark: priors 1/C + (1 - 1/C) U[0,1]
/// renormalised, means 0.1 N(0, I), stds U[0.5, 1].
MixtureSpec draw_benchmark_spec(int classes, int dim, Rng& rng);

struct H1Config {
  std::vector<int> sizes{256, 1024};
  int trials = 2;
  int classes = 3;
  int dim = 2;
  int epochs = 300;
  double step = 1.0;
};

struct H1Row {
  int n = 0;
  int trial = 0;
  double divergence = 0.0;
};

/// (1 - pi_C) times the mean of D_phi-dagger(r || r-hat) over the
/// reference-class test samples. Trial t uses the same spec for every N.
std::vector<H1Row> run_h1_experiment(const H1Config& cfg, const Rng& rng);

void write_h1_csv(const std::filesystem::path& path, const std::vector<H1Row>& rows);

}  // namespace sbt
