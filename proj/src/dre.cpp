#include "sbt/dre.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sbt/csv.hpp"
#include "sbt/errors.hpp"

namespace sbt {

namespace {

Vector softmax(const Vector& logits) {
  const double m = logits.maxCoeff();
  Vector e = (logits.array() - m).exp().matrix();
  return e / e.sum();
}

Vector with_bias(const Vector& x) {
  Vector out(x.size() + 1);
  out.head(x.size()) = x;
  out[x.size()] = 1.0;
  return out;
}

int draw_class(const Vector& priors, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (Eigen::Index c = 0; c + 1 < priors.size(); ++c) {
    acc += priors[c];
    if (u < acc) return static_cast<int>(c);
  }
  return static_cast<int>(priors.size() - 1);
}

Matrix features_with_bias(const Matrix& x) {
  Matrix out(x.rows(), x.cols() + 1);
  out.leftCols(x.cols()) = x;
  out.col(x.cols()).setOnes();
  return out;
}

double log_loss(const Matrix& xb, const std::vector<int>& y, const Matrix& w, Matrix* probs) {
  const Matrix logits = xb * w.transpose();
  double total = 0.0;
  if (probs) probs->resize(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double m = logits.row(i).maxCoeff();
    const double lse = m + std::log((logits.row(i).array() - m).exp().sum());
    total += lse - logits(i, y[static_cast<std::size_t>(i)]);
    if (probs) probs->row(i) = (logits.row(i).array() - lse).exp().matrix();
  }
  return total / static_cast<double>(logits.rows());
}

}  // namespace

void MixtureSpec::validate() const {
  const int c = classes();
  if (c < 2) throw ArgumentError("MixtureSpec: need at least 2 classes");
  if (static_cast<int>(means.size()) != c || stds.size() != c) {
    throw ArgumentError("MixtureSpec: priors, means and stds disagree on the class count");
  }
  if (std::abs(priors.sum() - 1.0) > 1e-12) throw ArgumentError("MixtureSpec: priors must sum to 1");
  if (!(priors.minCoeff() > 0.0)) throw ArgumentError("MixtureSpec: priors must be positive");
  if (!(stds.minCoeff() > 0.0)) throw ArgumentError("MixtureSpec: stds must be positive");
  const int d = dim();
  if (d < 1) throw ArgumentError("MixtureSpec: empty means");
  for (const auto& m : means) {
    if (m.size() != d) throw ArgumentError("MixtureSpec: means differ in dimension");
  }
}

TildePrior tilde_prior(const Vector& priors) {
  const Eigen::Index c = priors.size();
  if (c < 2) throw ArgumentError("tilde_prior: need at least 2 classes");
  if (!(priors.minCoeff() > 0.0)) throw DomainError("tilde_prior: zero prior");
  const double ref = priors[c - 1];
  if (!(ref < 1.0)) throw DomainError("tilde_prior: reference prior must be below 1");
  return {priors.head(c - 1) / (1.0 - ref), ref};
}

LabeledDataset sample_dataset(const MixtureSpec& spec, int n, Rng& rng) {
  spec.validate();
  if (n < spec.classes()) throw ArgumentError("sample_dataset: need N >= C");
  LabeledDataset data;
  data.x.resize(n, spec.dim());
  data.y.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int c = draw_class(spec.priors, rng);
    data.y[static_cast<std::size_t>(i)] = c;
    data.x.row(i) = (spec.means[static_cast<std::size_t>(c)] + spec.stds[c] * rng.normal_vector(spec.dim())).transpose();
  }
  return data;
}

double class_log_density(const MixtureSpec& spec, int c, const Vector& x) {
  const double s = spec.stds[c];
  const double d = static_cast<double>(x.size());
  const double sq = (x - spec.means[static_cast<std::size_t>(c)]).squaredNorm();
  return -0.5 * d * std::log(2.0 * std::numbers::pi * s * s) - sq / (2.0 * s * s);
}

Vector true_posterior(const MixtureSpec& spec, const Vector& x) {
  if (!x.allFinite()) throw DomainError("true_posterior: non-finite x");
  if (x.size() != spec.dim()) throw ShapeError("true_posterior: dimension mismatch");
  Vector logits(spec.classes());
  for (int c = 0; c < spec.classes(); ++c) logits[c] = std::log(spec.priors[c]) + class_log_density(spec, c, x);
  return softmax(logits);
}

Vector eta_from_posterior(const Vector& posterior, const Vector& priors) {
  if (posterior.size() != priors.size()) throw ShapeError("eta_from_posterior: size mismatch");
  const TildePrior tp = tilde_prior(priors);
  return (posterior.array() * (1.0 - tp.reference) / priors.array()).matrix();
}

Vector density_ratio_estimate(const Vector& eta) {
  if (eta.size() < 2) throw ShapeError("density_ratio_estimate: need at least 2 entries");
  const double ref = eta[eta.size() - 1];
  if (!(ref > 0.0)) throw DomainError("density_ratio_estimate: reference entry must be positive");
  return eta.head(eta.size() - 1) / ref;
}

Vector true_density_ratio(const MixtureSpec& spec, const Vector& x) {
  const int c_ref = spec.classes() - 1;
  const double ref = class_log_density(spec, c_ref, x);
  Vector r(c_ref);
  for (int c = 0; c < c_ref; ++c) r[c] = std::exp(class_log_density(spec, c, x) - ref);
  return r;
}

double binary_density_ratio(double eta, double pi) {
  if (!(pi > 0.0 && pi < 1.0)) throw DomainError("binary_density_ratio: prior must lie in (0, 1)");
  if (!(eta < 1.0)) throw DomainError("binary_density_ratio: eta must be below 1");
  return (1.0 - pi) / pi * eta / (1.0 - eta);
}

Scaler dre_scaler(const Vector& priors) {
  const TildePrior tp = tilde_prior(priors);
  Scaler s = affine_scaler(tp.tilde, tp.reference / (1.0 - tp.reference));
  s.name = "dre_affine";
  return s;
}

Vector SoftmaxModel::posterior(const Vector& x) const {
  if (x.size() + 1 != weights.cols()) throw ShapeError("SoftmaxModel: dimension mismatch");
  return softmax(weights * with_bias(x));
}

double SoftmaxModel::mean_log_loss(const LabeledDataset& data) const {
  return log_loss(features_with_bias(data.x), data.y, weights, nullptr);
}

SoftmaxModel fit_softmax(const LabeledDataset& data, int classes, int epochs, double step,
                         FitReport* report) {
  if (epochs < 1) throw ArgumentError("fit_softmax: epochs must be >= 1");
  if (!(step > 0.0)) throw ArgumentError("fit_softmax: step must be positive");
  if (classes < 2) throw ArgumentError("fit_softmax: need at least 2 classes");
  if (data.size() == 0) throw FitError("fit_softmax: empty dataset");
  std::vector<int> seen(static_cast<std::size_t>(classes), 0);
  for (int y : data.y) {
    if (y < 0 || y >= classes) throw ArgumentError("fit_softmax: label out of range");
    seen[static_cast<std::size_t>(y)] = 1;
  }
  if (std::count(seen.begin(), seen.end(), 1) < 2) {
    throw FitError("fit_softmax: the data contain a single class");
  }

  const Matrix xb = features_with_bias(data.x);
  Matrix onehot = Matrix::Zero(xb.rows(), classes);
  for (std::size_t i = 0; i < data.size(); ++i) onehot(static_cast<Eigen::Index>(i), data.y[i]) = 1.0;

  SoftmaxModel model{Matrix::Zero(classes, xb.cols())};
  Matrix probs;
  double loss = log_loss(xb, data.y, model.weights, &probs);
  double eta = step;
  FitReport local;
  for (int e = 0; e < epochs; ++e) {
    const Matrix grad = (probs - onehot).transpose() * xb / static_cast<double>(xb.rows());
    Matrix trial_w = model.weights - eta * grad;
    Matrix trial_p;
    double trial_loss = log_loss(xb, data.y, trial_w, &trial_p);
    while (trial_loss > loss + 1e-12 && local.halvings < 200) {
      eta *= 0.5;
      ++local.halvings;
      trial_w = model.weights - eta * grad;
      trial_loss = log_loss(xb, data.y, trial_w, &trial_p);
    }
    if (trial_loss > loss + 1e-12) break;  // no descent left at machine precision
    model.weights = std::move(trial_w);
    probs = std::move(trial_p);
    loss = trial_loss;
    local.loss_per_epoch.push_back(loss);
  }
  if (report) *report = std::move(local);
  return model;
}

Lemma1Result lemma1_check(const MixtureSpec& spec, const PosteriorProvider& estimate,
                          const Generator& phi, int n_mc, Rng& rng) {
  spec.validate();
  if (n_mc < 1000) throw ArgumentError("lemma1_check: n_mc must be >= 1000");
  const int c_ref = spec.classes() - 1;
  const double pi_ref = spec.priors[c_ref];
  const Generator dagger = scaled_generator(phi, dre_scaler(spec.priors)).as_generator();

  auto eta_head = [&spec, c_ref](const Vector& posterior) {
    return Vector(eta_from_posterior(posterior, spec.priors).head(c_ref));
  };

  double sum = 0.0;
  double sum_lhs = 0.0;
  double sum_rhs = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n_mc; ++i) {
    const Vector z = rng.normal_vector(spec.dim());
    const int c = draw_class(spec.priors, rng);
    const Vector x_mix = spec.means[static_cast<std::size_t>(c)] + spec.stds[c] * z;
    const Vector x_ref = spec.means[static_cast<std::size_t>(c_ref)] + spec.stds[c_ref] * z;

    const double a = bregman_divergence(phi, eta_head(true_posterior(spec, x_mix)), eta_head(estimate(x_mix)));
    const Vector r = true_density_ratio(spec, x_ref);
    const Vector r_hat = density_ratio_estimate(eta_from_posterior(estimate(x_ref), spec.priors));
    const double b = (1.0 - pi_ref) * bregman_divergence(dagger, r, r_hat);

    sum_lhs += a;
    sum_rhs += b;
    sum += a - b;
    sum_sq += (a - b) * (a - b);
  }
  const double n = static_cast<double>(n_mc);
  Lemma1Result out;
  out.samples = n_mc;
  out.lhs = sum_lhs / n;
  out.rhs = sum_rhs / n;
  out.absdiff = std::abs(out.lhs - out.rhs);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  out.stderr_diff = std::sqrt(var / n);
  return out;
}

MixtureSpec draw_benchmark_spec(int classes, int dim, Rng& rng) {
  if (classes < 2 || dim < 1) throw ArgumentError("draw_benchmark_spec: need C >= 2 and d >= 1");
  MixtureSpec spec;
  const double base = 1.0 / classes;
  spec.priors.resize(classes);
  for (int c = 0; c < classes; ++c) spec.priors[c] = base + (1.0 - base) * rng.uniform();
  spec.priors /= spec.priors.sum();
  spec.stds.resize(classes);
  for (int c = 0; c < classes; ++c) {
    spec.means.push_back(0.1 * rng.normal_vector(dim));
    spec.stds[c] = rng.uniform(0.5, 1.0);
  }
  return spec;
}

std::vector<H1Row> run_h1_experiment(const H1Config& cfg, const Rng& rng) {
  if (cfg.trials < 1) throw ArgumentError("run_h1_experiment: trials must be >= 1");
  if (cfg.sizes.empty()) throw ArgumentError("run_h1_experiment: no sample sizes");
  constexpr int kMaxRedraws = 1000;

  std::vector<H1Row> rows;
  for (std::size_t k = 0; k < cfg.sizes.size(); ++k) {
    const int n = cfg.sizes[k];
    if (n < 5 * cfg.classes) throw ArgumentError("run_h1_experiment: sample size too small");
    const int n_train = (4 * n) / 5;
    for (int t = 0; t < cfg.trials; ++t) {
      const Rng trial_rng = rng.split(static_cast<std::uint64_t>(t));
      Rng spec_rng = trial_rng.split(0);
      const MixtureSpec spec = draw_benchmark_spec(cfg.classes, cfg.dim, spec_rng);
      const int c_ref = cfg.classes - 1;
      const Generator dagger = scaled_generator(kl_generator(), dre_scaler(spec.priors)).as_generator();

      double divergence = 0.0;
      bool done = false;
      for (int attempt = 0; attempt < kMaxRedraws && !done; ++attempt) {
        Rng data_rng = trial_rng.split(1 + k).split(static_cast<std::uint64_t>(attempt));
        const LabeledDataset all = sample_dataset(spec, n, data_rng);
        LabeledDataset train{all.x.topRows(n_train),
                             std::vector<int>(all.y.begin(), all.y.begin() + n_train)};
        std::vector<Eigen::Index> ref_rows;
        for (int i = n_train; i < n; ++i) {
          if (all.y[static_cast<std::size_t>(i)] == c_ref) ref_rows.push_back(i);
        }
        if (ref_rows.empty()) continue;
        SoftmaxModel model;
        try {
          model = fit_softmax(train, cfg.classes, cfg.epochs, cfg.step);
        } catch (const FitError&) {
          continue;
        }
        double sum = 0.0;
        for (const auto i : ref_rows) {
          const Vector x = all.x.row(i).transpose();
          const Vector r = true_density_ratio(spec, x);
          const Vector r_hat = density_ratio_estimate(eta_from_posterior(model.posterior(x), spec.priors));
          sum += bregman_divergence(dagger, r, r_hat);
        }
        divergence = (1.0 - spec.priors[c_ref]) * sum / static_cast<double>(ref_rows.size());
        done = true;
      }
      if (!done) throw FitError("run_h1_experiment: could not draw a usable dataset");
      rows.push_back({n, t, divergence});
    }
  }
  return rows;
}

void write_h1_csv(const std::filesystem::path& path, const std::vector<H1Row>& rows) {
  CsvWriter out(path, {"N", "trial", "divergence"});
  for (const auto& r : rows) {
    out.cell(r.n).cell(r.trial).cell(r.divergence);
    out.end_row();
  }
  out.close();
}

}  // namespace sbt
