// Command-line driver for the verification suites and experiments.
//
// Exit codes: 0 success, 1 check or I/O failure, 2 usage error.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sbt/catalog.hpp"
#include "sbt/clustering.hpp"
#include "sbt/csv.hpp"
#include "sbt/divergence.hpp"
#include "sbt/dre.hpp"
#include "sbt/errors.hpp"
#include "sbt/geometry.hpp"
#include "sbt/lms.hpp"
#include "sbt/rng.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct Common {
  std::uint64_t seed = 1;
  std::string out = ".";
};

std::string format_vector(const sbt::Vector& v) {
  std::ostringstream os;
  os << std::setprecision(17) << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ']';
  return os.str();
}

fs::path prepare_out(const std::string& dir) {
  fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw sbt::Error("cannot create output directory " + p.string() + ": " + ec.message());
  return p;
}

void report_file(const fs::path& path, std::size_t rows) {
  std::cout << "wrote " << path.string() << " (" << rows << " rows)\n";
}

std::vector<sbt::RowId> parse_rows(const std::vector<std::string>& names) {
  std::vector<sbt::RowId> rows;
  if (names.empty()) return {sbt::kAllRows.begin(), sbt::kAllRows.end()};
  for (const auto& n : names) rows.push_back(sbt::parse_row(n));
  return rows;
}

// ---------------------------------------------------------------- identity

struct IdentityOpts {
  std::vector<std::string> rows;
  int trials = 1000;
  int dim = 3;
  double q = 3.0;
  bool negative_control = false;
};

int cmd_identity(const Common& common, const IdentityOpts& o) {
  if (o.trials < 1) throw sbt::ArgumentError("--trials must be >= 1");
  constexpr double kTol = 1e-9;
  const sbt::Rng root(common.seed);
  bool ok = true;

  std::cout << std::left << std::setw(6) << "row" << std::setw(10) << "trials" << "max_rel_diff\n";
  std::vector<std::pair<std::string, double>> table;

  if (o.negative_control) {
    // phi = |x|^2 / 2 is not restricted homogeneous and g = 1 + |x| is not affine.
    const sbt::Generator phi = sbt::squared_norm_generator(0.0);
    sbt::Scaler g;
    g.name = "1+|x|";
    g.eval = [](const sbt::Vector& x) { return 1.0 + x.norm(); };
    g.grad = [](const sbt::Vector& x) {
      const double n = x.norm();
      return n > 0.0 ? sbt::Vector(x / n) : sbt::Vector(sbt::Vector::Zero(x.size()));
    };
    sbt::Rng rng = root.split(100);
    double worst = 0.0;
    for (int t = 0; t < o.trials; ++t) {
      const sbt::Vector x = rng.normal_vector(o.dim);
      const sbt::Vector y = rng.normal_vector(o.dim);
      const auto chk = sbt::verify_scaled_identity(phi, g, x, y, sbt::Precondition::skip);
      const double rel = chk.absdiff / std::max(1.0, std::abs(chk.lhs));
      worst = std::max(worst, rel);
      if (rel > kTol && ok) {
        ok = false;
        std::cout << "FAIL negative-control x=" << format_vector(x) << " y=" << format_vector(y)
                  << " lhs=" << chk.lhs << " rhs=" << chk.rhs << '\n';
      }
    }
    table.emplace_back("neg", worst);
    std::cout << std::setw(6) << "neg" << std::setw(10) << o.trials << std::setprecision(6) << worst << '\n';
  } else {
    sbt::CatalogParams params;
    params.d = o.dim;
    params.q = o.q;
    for (const auto id : parse_rows(o.rows)) {
      const sbt::CatalogEntry e = sbt::catalog_entry(id, params);
      sbt::Rng rng = root.split(static_cast<std::uint64_t>(id));
      double worst = 0.0;
      bool row_ok = true;
      for (int t = 0; t < o.trials; ++t) {
        const sbt::Vector x = e.sample(rng);
        const sbt::Vector y = e.sample(rng);
        const auto chk = sbt::verify_scaled_identity(e.gen, e.scaler, e.lift(x), e.lift(y));
        const double cf = e.closed_form(x, y);
        const double rel = std::max({chk.absdiff / std::max(1.0, std::abs(chk.lhs)),
                                     sbt::relative_gap(cf, chk.lhs), sbt::relative_gap(cf, chk.rhs)});
        worst = std::max(worst, rel);
        if (rel > kTol && row_ok) {
          row_ok = false;
          std::cout << "FAIL row " << sbt::row_label(id) << " x=" << format_vector(x)
                    << " y=" << format_vector(y) << " lhs=" << chk.lhs << " rhs=" << chk.rhs
                    << " closed_form=" << cf << '\n';
        }
      }
      ok = ok && row_ok;
      const std::string label(sbt::row_label(id));
      table.emplace_back(label, worst);
      std::cout << std::setw(6) << label << std::setw(10) << o.trials << std::setprecision(6) << worst
                << '\n';
    }
  }

  if (common.out != "-") {
    const fs::path path = prepare_out(common.out) / "identity.csv";
    sbt::CsvWriter csv(path, {"row", "trials", "max_rel_diff"});
    for (const auto& [label, worst] : table) {
      csv.cell(std::string_view(label)).cell(o.trials).cell(worst);
      csv.end_row();
    }
    csv.close();
    report_file(path, csv.rows_written());
  }
  std::cout << (ok ? "identity: all rows pass" : "identity: FAILED") << '\n';
  return ok ? kOk : kFailure;
}

// ---------------------------------------------------------------- dre

int cmd_dre(const Common& common, const sbt::H1Config& cfg) {
  const auto rows = sbt::run_h1_experiment(cfg, sbt::Rng(common.seed));
  const fs::path path = prepare_out(common.out) / "dre_h1.csv";
  sbt::write_h1_csv(path, rows);
  report_file(path, rows.size());
  return kOk;
}

// ---------------------------------------------------------------- dnplms

struct DnplmsOpts {
  std::vector<double> p{6.9};
  std::vector<double> rho{1.0};
  std::string target = "dense";
  double W = 1.0;
  sbt::StreamSpec stream;
};

int cmd_dnplms(const Common& common, DnplmsOpts o) {
  o.stream.target = sbt::parse_target_kind(o.target);
  std::vector<sbt::LqConfig> cfgs;
  for (double p : o.p) cfgs.push_back(sbt::LqConfig::from_p(p, o.W));
  const auto cells = sbt::run_h2_experiment(o.stream, cfgs, o.rho, sbt::Rng(common.seed));
  const fs::path dir = prepare_out(common.out);
  for (const auto& cell : cells) {
    const fs::path path = dir / cell.file_name();
    sbt::write_h2_csv(path, cell);
    report_file(path, cell.rows.size());
    if (cell.plms_diverged_at > 0) {
      std::cout << "  p-LMS diverged at t=" << cell.plms_diverged_at << "; later err_plms entries are inf\n";
    }
  }
  return kOk;
}

// ---------------------------------------------------------------- cluster

int cmd_cluster(const Common& common, const sbt::ClusterConfig& cfg) {
  const auto rows = sbt::run_cluster_experiment(cfg, sbt::Rng(common.seed));
  const fs::path path = prepare_out(common.out) / "cluster.csv";
  sbt::write_cluster_csv(path, rows);
  report_file(path, rows.size());
  return kOk;
}

// ---------------------------------------------------------------- geom

struct GeomOpts {
  std::vector<std::string> rows{"I", "V"};
  int samples = 1000;
  int dim = 3;
};

int cmd_geom(const Common& common, const GeomOpts& o) {
  const sbt::Rng root(common.seed);
  sbt::CatalogParams params;
  params.d = o.dim;
  const fs::path path = prepare_out(common.out) / "geom.csv";
  sbt::CsvWriter csv(path, {"row", "samples", "residual_max_rel", "ball_agreement", "bisector_agreement"});
  for (const auto id : parse_rows(o.rows)) {
    sbt::Rng rng = root.split(static_cast<std::uint64_t>(id));
    const auto rep = sbt::run_geometry_check(id, o.samples, rng, params);
    csv.cell(sbt::row_label(id)).cell(rep.samples).cell(rep.residual_max_rel);
    csv.cell(rep.ball_agreement).cell(rep.bisector_agreement);
    csv.end_row();
  }
  csv.close();
  report_file(path, csv.rows_written());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scaled Bregman divergence toolkit"};
  app.require_subcommand(1);

  Common common;
  auto add_common = [&common](CLI::App* sub) {
    sub->add_option("--seed", common.seed, "RNG seed")->capture_default_str();
    sub->add_option("--out", common.out, "Output directory ('-' disables files where optional)")
        ->capture_default_str();
  };

  IdentityOpts id_opts;
  auto* identity = app.add_subcommand("identity", "Check the scaled identity on catalog rows");
  add_common(identity);
  identity->add_option("--rows", id_opts.rows, "Rows I..VIII (default: all)")->delimiter(',');
  identity->add_option("--trials", id_opts.trials, "Random pairs per row")->capture_default_str();
  identity->add_option("--dim", id_opts.dim, "Dimension (matrix side for VII/VIII)")->capture_default_str();
  identity->add_option("--q", id_opts.q, "Exponent for row II")->capture_default_str();
  identity->add_flag("--negative-control", id_opts.negative_control,
                     "Run a pair violating the identity conditions (expected to fail)");

  sbt::H1Config h1;
  auto* dre = app.add_subcommand("dre", "Multiclass density ratio experiment");
  add_common(dre);
  dre->add_option("--sizes", h1.sizes, "Sample sizes N")->delimiter(',');
  dre->add_option("--trials", h1.trials, "Trials per size")->capture_default_str();
  dre->add_option("--classes", h1.classes, "Class count C")->capture_default_str();
  dre->add_option("--dim", h1.dim, "Feature dimension")->capture_default_str();
  dre->add_option("--epochs", h1.epochs, "Gradient descent epochs")->capture_default_str();
  dre->add_option("--step", h1.step, "Initial step size")->capture_default_str();

  DnplmsOpts lms;
  auto* dnplms = app.add_subcommand("dnplms", "p-LMS versus dual-norm p-LMS on a linear stream");
  add_common(dnplms);
  dnplms->add_option("--p", lms.p, "Exponent(s) p")->delimiter(',');
  dnplms->add_option("--rho", lms.rho, "X_p misestimation factor(s)")->delimiter(',');
  dnplms->add_option("--horizon", lms.stream.horizon, "Steps T")->capture_default_str();
  dnplms->add_option("--d", lms.stream.d, "Dimension")->capture_default_str();
  dnplms->add_option("--target", lms.target, "dense or sparse")->capture_default_str();
  dnplms->add_option("--noise", lms.stream.noise_sd, "Noise standard deviation")->capture_default_str();
  dnplms->add_option("--switch", lms.stream.switch_period, "Steps between target redraws (0: never)")
      ->capture_default_str();
  dnplms->add_option("--gamma", lms.stream.gamma, "Rate multiplier in [1/2, 1]")->capture_default_str();
  dnplms->add_option("--W", lms.W, "L_q ball radius")->capture_default_str();
  dnplms->add_option("--Xp", lms.stream.Xp, "Input L_p norm")->capture_default_str();

  sbt::ClusterConfig cl;
  auto* cluster = app.add_subcommand("cluster", "Spherical clustering: Forgy SKM, GKM, GKM then SKM");
  add_common(cluster);
  cluster->add_option("--k", cl.ks, "Cluster counts")->delimiter(',');
  cluster->add_option("--n", cl.n, "Points per run")->capture_default_str();
  cluster->add_option("--runs", cl.runs, "Runs per k")->capture_default_str();
  cluster->add_option("--max-iters", cl.max_iters, "Lloyd iteration cap")->capture_default_str();

  GeomOpts geo;
  auto* geom = app.add_subcommand("geom", "Ball and bisector equivalences");
  add_common(geom);
  geom->add_option("--rows", geo.rows, "Rows I..VIII")->delimiter(',')->capture_default_str();
  geom->add_option("--samples", geo.samples, "Samples per check")->capture_default_str();
  geom->add_option("--dim", geo.dim, "Dimension")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (identity->parsed()) return cmd_identity(common, id_opts);
    if (dre->parsed()) return cmd_dre(common, h1);
    if (dnplms->parsed()) return cmd_dnplms(common, lms);
    if (cluster->parsed()) return cmd_cluster(common, cl);
    if (geom->parsed()) return cmd_geom(common, geo);
  } catch (const sbt::ArgumentError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
