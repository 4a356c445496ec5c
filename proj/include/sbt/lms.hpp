#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sbt/rng.hpp"
#include "sbt/types.hpp"

namespace sbt {

/// Dual exponents p, q (1/p + 1/q = 1) and the L_q ball radius W.
struct LqConfig {
  double p = 2.0;
  double q = 2.0;
  double W = 1.0;

  /// q is derived from p.
  static LqConfig from_p(double p, double W = 1.0);
  /// ArgumentError unless p, q > 1, |1/p + 1/q - 1| <= 1e-12 and W > 0.
  void validate() const;
};

/// ||w||_q^{2-q} sign(w) |w|^{q-1}; zero at the origin.
Vector grad_phi_q(const Vector& w, double q);
/// W ||w||_q^{1-q} sign(w) |w|^{q-1}; zero at the origin.
Vector grad_phi_dagger_q(const Vector& w, double q, double W);

struct OnlineState {
  Vector w;
  std::int64_t t = 0;
  std::int64_t cancellations = 0;  // DN steps where the dual point vanished
};

OnlineState initial_state(int d);

/// Mirror step w <- grad_phi_p(grad_phi_q(w) - eta * (w.x - y) x).
OnlineState plms_step(const OnlineState& s, const Vector& x, double y, double eta, const LqConfig& cfg);

/// Dual-norm step w <- grad_phi_dagger_p(grad_phi_dagger_q(w) - eta * (w.x - y) x).
/// When the dual point is exactly zero the weights are kept and the
/// cancellation counter is incremented.
OnlineState dnplms_step(const OnlineState& s, const Vector& x, double y, double eta,
                        const LqConfig& cfg);

/// gamma W / (4 (p-1) max{W, X_p} X_p W + |residual| X_p).
/// ArgumentError if gamma is outside [1/2, 1] or X_p <= 0.
double adaptive_eta(double residual, const LqConfig& cfg, double Xp, double gamma = 1.0);

/// Baseline p-LMS rate 1 / ((p-1) X_p^2).
double plms_rate(const LqConfig& cfg, double Xp);

/// 4(p-1) X_p^2 W^2 + (16p-8) max{W, X_p} X_p^2 W + 8 Y X_p^2.
/// OutOfRegimeError for p <= 2.
double regret_bound(const LqConfig& cfg, double Xp, double Y);

/// Per-step record of an online run.
struct StepLog {
  std::vector<Vector> x;
  std::vector<double> y;
  std::vector<double> prediction;  // w_{t-1}^T x_t

  void push(const Vector& xt, double yt, double pred);
  std::size_t size() const { return y.size(); }
};

struct RegretLedger {
  double learner_gap = 0.0;       // sum (u.x/g_q(u) - w_{t-1}.x)^2
  double comparator_loss = 0.0;   // sum (u.x/g_q(u) - y)^2
  double learner_gap_raw = 0.0;   // same with u unnormalised
  double comparator_loss_raw = 0.0;

  double regret() const { return learner_gap - comparator_loss; }
  double regret_raw() const { return learner_gap_raw - comparator_loss_raw; }
};

/// DomainError for u = 0.
RegretLedger regret_ledger(const StepLog& log, const Vector& u, const LqConfig& cfg);
double regret_q(const StepLog& log, const Vector& u, const LqConfig& cfg);

enum class TargetKind { dense, sparse };
std::string_view to_string(TargetKind k);
TargetKind parse_target_kind(std::string_view text);

struct StreamSpec {
  int d = 20;
  TargetKind target = TargetKind::dense;
  double noise_sd = 0.1;
  std::int64_t horizon = 5000;
  std::int64_t switch_period = 1000;  // 0 keeps the first target
  double Xp = 1.0;
  double rho = 1.0;    // learners use X_p-hat = rho * X_p
  double gamma = 1.0;
  double Y = 2.0;      // |y_t| is clipped to Y
};

/// Linear stream y = u.x + noise with ||x||_p = X_p and ||u||_q = W.
class LinearStream {
 public:
  LinearStream(const StreamSpec& spec, const LqConfig& cfg, Rng rng);

  struct Sample {
    Vector x;
    double y = 0.0;
  };
  Sample next();
  const Vector& target() const { return target_; }

 private:
  void redraw_target();

  StreamSpec spec_;
  LqConfig cfg_;
  Rng rng_;
  Vector target_;
  std::int64_t t_ = 0;
};

struct H2Row {
  std::int64_t t = 0;
  double err_plms = 0.0;   // trailing mean over 100 steps
  double err_dnplms = 0.0;
  double diff = 0.0;       // err_plms - err_dnplms
  double norm_plms_q = 0.0;
  double norm_dn_q = 0.0;
};

struct H2Cell {
  LqConfig cfg;
  double rho = 1.0;
  TargetKind target = TargetKind::dense;
  std::vector<H2Row> rows;
  double max_dn_norm_deviation = 0.0;  // max_t | ||w_t||_q - W |
  std::int64_t cancellations = 0;
  std::int64_t plms_diverged_at = 0;  // first step with a non-finite p-LMS state, 0 if none

  std::string file_name() const;
};

/// Runs p-LMS and DN-pLMS side by side on the same stream for one cell.
H2Cell run_h2_cell(const StreamSpec& spec, const LqConfig& cfg, Rng rng);

/// One cell per (cfg, rho); cell i uses rng.split(i).
std::vector<H2Cell> run_h2_experiment(const StreamSpec& spec, const std::vector<LqConfig>& cfgs,
                                      const std::vector<double>& rhos, const Rng& rng);

void write_h2_csv(const std::filesystem::path& path, const H2Cell& cell);

struct RegretTrial {
  double worst_regret = 0.0;  // max over comparators
  double bound = 0.0;
  double max_norm_deviation = 0.0;
  double max_offset_norm = 0.0;  // max_t ||eta_t grad l_t||_p
};

/// DN-pLMS with adaptive rates on a fixed-target stream; regret against
/// the true target and `extra_comparators` random vectors.
RegretTrial run_regret_trial(const StreamSpec& spec, const LqConfig& cfg, int extra_comparators,
                             Rng rng);

}  // namespace sbt
