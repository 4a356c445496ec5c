#include "sbt/lms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <string>

#include "sbt/csv.hpp"
#include "sbt/errors.hpp"
#include "sbt/norms.hpp"

namespace sbt {

LqConfig LqConfig::from_p(double p, double W) {
  if (!(p > 1.0)) throw ArgumentError("LqConfig: p must exceed 1");
  LqConfig c;
  c.p = p;
  c.q = p / (p - 1.0);
  c.W = W;
  c.validate();
  return c;
}

void LqConfig::validate() const {
  if (!(p > 1.0) || !(q > 1.0)) throw ArgumentError("LqConfig: p and q must exceed 1");
  if (std::abs(1.0 / p + 1.0 / q - 1.0) > 1e-12) throw ArgumentError("LqConfig: p and q are not dual");
  if (!(W > 0.0)) throw ArgumentError("LqConfig: W must be positive");
}

Vector grad_phi_q(const Vector& w, double q) {
  const double n = lp_norm(w, q);
  if (n == 0.0) return Vector::Zero(w.size());
  return n * signed_power(w, n, q - 1.0);
}

Vector grad_phi_dagger_q(const Vector& w, double q, double W) {
  const double n = lp_norm(w, q);
  if (n == 0.0) return Vector::Zero(w.size());
  return W * signed_power(w, n, q - 1.0);
}

OnlineState initial_state(int d) {
  if (d < 1) throw ArgumentError("initial_state: d must be positive");
  return OnlineState{Vector::Zero(d), 0, 0};
}

namespace {

void check_step(const OnlineState& s, const Vector& x, double eta) {
  if (x.size() != s.w.size()) throw ShapeError("online step: x and w differ in dimension");
  if (!(eta > 0.0)) throw ArgumentError("online step: eta must be positive");
}

}  // namespace

OnlineState plms_step(const OnlineState& s, const Vector& x, double y, double eta, const LqConfig& cfg) {
  check_step(s, x, eta);
  const Vector loss_grad = (s.w.dot(x) - y) * x;
  OnlineState out = s;
  out.w = grad_phi_q(grad_phi_q(s.w, cfg.q) - eta * loss_grad, cfg.p);
  ++out.t;
  return out;
}

OnlineState dnplms_step(const OnlineState& s, const Vector& x, double y, double eta,
                        const LqConfig& cfg) {
  check_step(s, x, eta);
  const Vector loss_grad = (s.w.dot(x) - y) * x;
  const Vector theta = grad_phi_dagger_q(s.w, cfg.q, cfg.W) - eta * loss_grad;
  OnlineState out = s;
  ++out.t;
  if (!(theta.cwiseAbs().maxCoeff() > 0.0)) {
    ++out.cancellations;
    return out;
  }
  out.w = grad_phi_dagger_q(theta, cfg.p, cfg.W);
  return out;
}

double adaptive_eta(double residual, const LqConfig& cfg, double Xp, double gamma) {
  if (!(gamma >= 0.5 && gamma <= 1.0)) throw ArgumentError("adaptive_eta: gamma must lie in [1/2, 1]");
  if (!(Xp > 0.0)) throw ArgumentError("adaptive_eta: X_p must be positive");
  const double m = std::max(cfg.W, Xp);
  return gamma * cfg.W / (4.0 * (cfg.p - 1.0) * m * Xp * cfg.W + std::abs(residual) * Xp);
}

double plms_rate(const LqConfig& cfg, double Xp) {
  if (!(Xp > 0.0)) throw ArgumentError("plms_rate: X_p must be positive");
  return 1.0 / ((cfg.p - 1.0) * Xp * Xp);
}

double regret_bound(const LqConfig& cfg, double Xp, double Y) {
  if (!(cfg.p > 2.0)) throw OutOfRegimeError("regret_bound: the bound is only proven for p > 2");
  const double m = std::max(cfg.W, Xp);
  const double x2 = Xp * Xp;
  return 4.0 * (cfg.p - 1.0) * x2 * cfg.W * cfg.W + (16.0 * cfg.p - 8.0) * m * x2 * cfg.W +
         8.0 * Y * x2;
}

void StepLog::push(const Vector& xt, double yt, double pred) {
  x.push_back(xt);
  y.push_back(yt);
  prediction.push_back(pred);
}

RegretLedger regret_ledger(const StepLog& log, const Vector& u, const LqConfig& cfg) {
  const double norm = lp_norm(u, cfg.q);
  if (!(norm > 0.0)) throw DomainError("regret_q: comparator u must be nonzero");
  const double g = norm / cfg.W;
  RegretLedger r;
  for (std::size_t t = 0; t < log.size(); ++t) {
    const double raw = u.dot(log.x[t]);
    const double scaled = raw / g;
    const double a = scaled - log.prediction[t];
    const double b = scaled - log.y[t];
    r.learner_gap += a * a;
    r.comparator_loss += b * b;
    const double ar = raw - log.prediction[t];
    const double br = raw - log.y[t];
    r.learner_gap_raw += ar * ar;
    r.comparator_loss_raw += br * br;
  }
  return r;
}

double regret_q(const StepLog& log, const Vector& u, const LqConfig& cfg) {
  return regret_ledger(log, u, cfg).regret();
}

std::string_view to_string(TargetKind k) { return k == TargetKind::dense ? "dense" : "sparse"; }

TargetKind parse_target_kind(std::string_view text) {
  if (text == "dense") return TargetKind::dense;
  if (text == "sparse") return TargetKind::sparse;
  throw ArgumentError("unknown target kind '" + std::string(text) + "'");
}

LinearStream::LinearStream(const StreamSpec& spec, const LqConfig& cfg, Rng rng)
    : spec_(spec), cfg_(cfg), rng_(rng) {
  if (spec_.d < 1) throw ArgumentError("StreamSpec: d must be positive");
  if (!(spec_.Xp > 0.0)) throw ArgumentError("StreamSpec: X_p must be positive");
  if (!(spec_.noise_sd >= 0.0)) throw ArgumentError("StreamSpec: noise must be non-negative");
  if (!(spec_.Y > 0.0)) throw ArgumentError("StreamSpec: Y must be positive");
  cfg_.validate();
  redraw_target();
}

void LinearStream::redraw_target() {
  const int d = spec_.d;
  Vector u = Vector::Zero(d);
  if (spec_.target == TargetKind::dense) {
    u = rng_.normal_vector(d);
  } else {
    const int nnz = std::max(1, static_cast<int>(std::ceil(0.1 * d)));
    std::vector<int> idx(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < nnz; ++i) {
      const auto j = i + static_cast<int>(rng_.uniform_index(static_cast<std::uint64_t>(d - i)));
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
      u[idx[static_cast<std::size_t>(i)]] = rng_.normal();
    }
  }
  const double n = lp_norm(u, cfg_.q);
  if (!(n > 0.0)) {
    redraw_target();
    return;
  }
  target_ = (cfg_.W / n) * u;
}

LinearStream::Sample LinearStream::next() {
  if (spec_.switch_period > 0 && t_ > 0 && t_ % spec_.switch_period == 0) redraw_target();
  ++t_;
  Vector x = rng_.normal_vector(spec_.d);
  double n = lp_norm(x, cfg_.p);
  while (!(n > 0.0)) {
    x = rng_.normal_vector(spec_.d);
    n = lp_norm(x, cfg_.p);
  }
  x *= spec_.Xp / n;
  const double noise = spec_.noise_sd > 0.0 ? spec_.noise_sd * rng_.normal() : 0.0;
  const double y = std::clamp(target_.dot(x) + noise, -spec_.Y, spec_.Y);
  return {std::move(x), y};
}

std::string H2Cell::file_name() const {
  char buf[128];
  std::snprintf(buf, sizeof buf, "dnplms_p%.2f_q%.2f_rho%.2f_%s.csv", cfg.p, cfg.q, rho,
                std::string(to_string(target)).c_str());
  return buf;
}

H2Cell run_h2_cell(const StreamSpec& spec, const LqConfig& cfg, Rng rng) {
  if (spec.horizon < 1) throw ArgumentError("run_h2_cell: horizon must be >= 1");
  if (!(spec.rho > 0.0)) throw ArgumentError("run_h2_cell: rho must be positive");
  constexpr std::size_t kWindow = 100;
  constexpr double kInf = std::numeric_limits<double>::infinity();

  H2Cell cell;
  cell.cfg = cfg;
  cell.rho = spec.rho;
  cell.target = spec.target;
  cell.rows.reserve(static_cast<std::size_t>(spec.horizon));

  LinearStream stream(spec, cfg, rng);
  const double xp_hat = spec.rho * spec.Xp;
  const double eta_plms = plms_rate(cfg, xp_hat);
  OnlineState plms = initial_state(spec.d);
  OnlineState dn = initial_state(spec.d);

  std::deque<double> win_p;
  std::deque<double> win_d;
  auto window_mean = [](const std::deque<double>& w) {
    double sum = 0.0;
    for (double v : w) sum += v;
    return sum / static_cast<double>(w.size());
  };
  for (std::int64_t t = 1; t <= spec.horizon; ++t) {
    const auto s = stream.next();
    const double res_p = s.y - plms.w.dot(s.x);
    const double res_d = s.y - dn.w.dot(s.x);
    // A diverged baseline is frozen and reported as +inf from then on.
    if (cell.plms_diverged_at == 0) {
      plms = plms_step(plms, s.x, s.y, eta_plms, cfg);
      if (!plms.w.allFinite() || !std::isfinite(res_p * res_p)) cell.plms_diverged_at = t;
    }
    dn = dnplms_step(dn, s.x, s.y, adaptive_eta(res_d, cfg, xp_hat, spec.gamma), cfg);

    win_p.push_back(res_p * res_p);
    win_d.push_back(res_d * res_d);
    if (win_p.size() > kWindow) {
      win_p.pop_front();
      win_d.pop_front();
    }

    H2Row row;
    row.t = t;
    if (cell.plms_diverged_at == 0 && !std::isfinite(window_mean(win_p))) cell.plms_diverged_at = t;
    const bool diverged = cell.plms_diverged_at != 0;
    row.err_plms = diverged ? kInf : window_mean(win_p);
    row.err_dnplms = window_mean(win_d);
    row.diff = row.err_plms - row.err_dnplms;
    row.norm_plms_q = diverged ? kInf : lp_norm(plms.w, cfg.q);
    row.norm_dn_q = lp_norm(dn.w, cfg.q);
    // Only an exact cancellation on the very first steps leaves w at the origin.
    if (row.norm_dn_q > 0.0) {
      cell.max_dn_norm_deviation = std::max(cell.max_dn_norm_deviation, std::abs(row.norm_dn_q - cfg.W));
    }
    cell.rows.push_back(row);
  }
  cell.cancellations = dn.cancellations;
  return cell;
}

std::vector<H2Cell> run_h2_experiment(const StreamSpec& spec, const std::vector<LqConfig>& cfgs,
                                      const std::vector<double>& rhos, const Rng& rng) {
  std::vector<H2Cell> cells;
  std::uint64_t index = 0;
  for (const auto& cfg : cfgs) {
    for (double rho : rhos) {
      StreamSpec s = spec;
      s.rho = rho;
      cells.push_back(run_h2_cell(s, cfg, rng.split(index++)));
    }
  }
  return cells;
}

void write_h2_csv(const std::filesystem::path& path, const H2Cell& cell) {
  CsvWriter out(path, {"t", "err_plms", "err_dnplms", "diff", "norm_plms_q", "norm_dn_q"});
  for (const auto& r : cell.rows) {
    out.cell(static_cast<long long>(r.t))
        .cell(r.err_plms)
        .cell(r.err_dnplms)
        .cell(r.diff)
        .cell(r.norm_plms_q)
        .cell(r.norm_dn_q);
    out.end_row();
  }
  out.close();
}

RegretTrial run_regret_trial(const StreamSpec& spec, const LqConfig& cfg, int extra_comparators,
                             Rng rng) {
  if (extra_comparators < 0) throw ArgumentError("run_regret_trial: negative comparator count");
  StreamSpec fixed = spec;
  fixed.switch_period = 0;
  LinearStream stream(fixed, cfg, rng.split(0));
  Rng comparator_rng = rng.split(1);

  RegretTrial out;
  out.bound = regret_bound(cfg, spec.Xp, spec.Y);
  StepLog log;
  log.x.reserve(static_cast<std::size_t>(spec.horizon));
  OnlineState dn = initial_state(spec.d);
  for (std::int64_t t = 1; t <= spec.horizon; ++t) {
    const auto s = stream.next();
    const double pred = dn.w.dot(s.x);
    const double res = s.y - pred;
    const double eta = adaptive_eta(res, cfg, spec.Xp, spec.gamma);
    out.max_offset_norm = std::max(out.max_offset_norm, eta * std::abs(res) * lp_norm(s.x, cfg.p));
    log.push(s.x, s.y, pred);
    dn = dnplms_step(dn, s.x, s.y, eta, cfg);
    out.max_norm_deviation = std::max(out.max_norm_deviation, std::abs(lp_norm(dn.w, cfg.q) - cfg.W));
  }

  out.worst_regret = regret_q(log, stream.target(), cfg);
  for (int i = 0; i < extra_comparators; ++i) {
    Vector u = comparator_rng.normal_vector(spec.d);
    out.worst_regret = std::max(out.worst_regret, regret_q(log, u, cfg));
  }
  return out;
}

}  // namespace sbt
