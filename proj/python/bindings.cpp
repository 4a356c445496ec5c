#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sbt/catalog.hpp"
#include "sbt/clustering.hpp"
#include "sbt/divergence.hpp"
#include "sbt/dre.hpp"
#include "sbt/errors.hpp"
#include "sbt/geometry.hpp"
#include "sbt/lms.hpp"
#include "sbt/manifold.hpp"
#include "sbt/rng.hpp"

namespace py = pybind11;
using namespace pybind11::literals;
using sbt::Matrix;
using sbt::Vector;

namespace {

void bind_errors(py::module_& m) {
  static py::exception<sbt::Error> base(m, "Error", PyExc_ValueError);
  static py::exception<sbt::DomainError> domain(m, "DomainError", base.ptr());
  static py::exception<sbt::ShapeError> shape(m, "ShapeError", base.ptr());
  static py::exception<sbt::ArgumentError> argument(m, "ArgumentError", base.ptr());
  static py::exception<sbt::IdentityPreconditionError> precondition(m, "IdentityPreconditionError", base.ptr());
  static py::exception<sbt::NumericalError> numerical(m, "NumericalError", base.ptr());
  static py::exception<sbt::FitError> fit(m, "FitError", base.ptr());
  static py::exception<sbt::OutOfRegimeError> regime(m, "OutOfRegimeError", base.ptr());
  // Most derived first.
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const sbt::DomainError& e) {
      py::set_error(domain, e.what());
    } catch (const sbt::ShapeError& e) {
      py::set_error(shape, e.what());
    } catch (const sbt::ArgumentError& e) {
      py::set_error(argument, e.what());
    } catch (const sbt::IdentityPreconditionError& e) {
      py::set_error(precondition, e.what());
    } catch (const sbt::NumericalError& e) {
      py::set_error(numerical, e.what());
    } catch (const sbt::FitError& e) {
      py::set_error(fit, e.what());
    } catch (const sbt::OutOfRegimeError& e) {
      py::set_error(regime, e.what());
    } catch (const sbt::Error& e) {
      py::set_error(base, e.what());
    }
  });
}

void bind_core(py::module_& m) {
  py::class_<sbt::Rng>(m, "Rng", "Counter-based SplitMix64 generator with indexed substreams.")
      .def(py::init<std::uint64_t, std::uint64_t>(), "seed"_a, "stream"_a = 0)
      .def("split", &sbt::Rng::split, "index"_a)
      .def("next_u64", &sbt::Rng::next_u64)
      .def("uniform", py::overload_cast<>(&sbt::Rng::uniform))
      .def("normal", py::overload_cast<>(&sbt::Rng::normal))
      .def("normal_vector", &sbt::Rng::normal_vector, "d"_a);

  py::class_<sbt::Generator>(m, "Generator")
      .def(py::init([](std::string name, sbt::ScalarField eval, sbt::VectorField grad) {
             return sbt::Generator{std::move(name), std::move(eval), std::move(grad), {}};
           }),
           "name"_a, "eval"_a, "grad"_a)
      .def_readonly("name", &sbt::Generator::name)
      .def("__call__", [](const sbt::Generator& g, const Vector& x) { return g.eval(x); })
      .def("grad", [](const sbt::Generator& g, const Vector& x) { return g.grad(x); })
      .def("contains", &sbt::Generator::contains)
      .def("__repr__", [](const sbt::Generator& g) { return "<Generator " + g.name + ">"; });

  py::class_<sbt::Scaler>(m, "Scaler")
      .def(py::init([](std::string name, sbt::ScalarField eval, sbt::VectorField grad) {
             return sbt::Scaler{std::move(name), std::move(eval), std::move(grad), {}, false};
           }),
           "name"_a, "eval"_a, "grad"_a)
      .def_readonly("name", &sbt::Scaler::name)
      .def_readonly("affine", &sbt::Scaler::affine)
      .def("__call__", [](const sbt::Scaler& g, const Vector& x) { return g.eval(x); })
      .def("grad", [](const sbt::Scaler& g, const Vector& x) { return g.grad(x); })
      .def("__repr__", [](const sbt::Scaler& g) { return "<Scaler " + g.name + ">"; });

  m.def("squared_norm_generator", &sbt::squared_norm_generator, "offset"_a = 0.0);
  m.def("kl_generator", &sbt::kl_generator);
  m.def("burg_generator", &sbt::burg_generator);
  m.def("lq_squared_generator", &sbt::lq_squared_generator, "q"_a, "W"_a);
  m.def("von_neumann_generator", &sbt::von_neumann_generator);
  m.def("logdet_generator", &sbt::logdet_generator);
  m.def("affine_scaler", &sbt::affine_scaler, "a"_a, "b"_a);
  m.def("lq_norm_scaler", &sbt::lq_norm_scaler, "q"_a, "W"_a);

  m.def(
      "scaled_generator",
      [](const sbt::Generator& gen, const sbt::Scaler& g) { return sbt::scaled_generator(gen, g).as_generator(); },
      "gen"_a, "scaler"_a, "g(x) * phi(x / g(x)) with its closed-form gradient.");
  m.def("bregman_divergence", &sbt::bregman_divergence, "gen"_a, "x"_a, "y"_a);
  m.def("trace_divergence", &sbt::trace_divergence, "gen"_a, "x"_a, "y"_a);

  py::class_<sbt::IdentityCheck>(m, "IdentityCheck")
      .def_readonly("lhs", &sbt::IdentityCheck::lhs)
      .def_readonly("rhs", &sbt::IdentityCheck::rhs)
      .def_readonly("absdiff", &sbt::IdentityCheck::absdiff);
  m.def(
      "verify_scaled_identity",
      [](const sbt::Generator& gen, const sbt::Scaler& g, const Vector& x, const Vector& y, bool enforce) {
        return sbt::verify_scaled_identity(gen, g, x, y, enforce ? sbt::Precondition::enforce : sbt::Precondition::skip);
      },
      "gen"_a, "scaler"_a, "x"_a, "y"_a, "enforce"_a = true);
  m.def(
      "check_restricted_homogeneity",
      [](const sbt::Generator& gen, const sbt::Scaler& g, const std::vector<Vector>& xs) {
        return sbt::check_restricted_homogeneity(gen, g, xs);
      },
      "gen"_a, "scaler"_a, "samples"_a);
}

void bind_catalog(py::module_& m) {
  py::enum_<sbt::RowId> row(m, "Row");
  for (auto id : sbt::kAllRows) row.value(std::string(sbt::row_label(id)).c_str(), id);

  py::class_<sbt::CatalogEntry>(m, "CatalogEntry")
      .def_readonly("gen", &sbt::CatalogEntry::gen)
      .def_readonly("scaler", &sbt::CatalogEntry::scaler)
      .def_readonly("domain", &sbt::CatalogEntry::domain_desc)
      .def("closed_form", [](const sbt::CatalogEntry& e, const Vector& x, const Vector& y) { return e.closed_form(x, y); })
      .def("lift", [](const sbt::CatalogEntry& e, const Vector& x) { return e.lift(x); })
      .def("sample", [](const sbt::CatalogEntry& e, sbt::Rng& rng) { return e.sample(rng); });

  m.def(
      "catalog_entry",
      [](const std::string& row, double W, int d, double q) {
        return sbt::catalog_entry(sbt::parse_row(row), {W, d, q});
      },
      "row"_a, "W"_a = 1.0, "d"_a = 3, "q"_a = 3.0);
  m.def(
      "closed_form_vs_generic",
      [](const std::string& row, int trials, std::uint64_t seed, double W, int d, double q) {
        sbt::Rng rng(seed);
        return sbt::closed_form_vs_generic(sbt::parse_row(row), trials, rng, {W, d, q});
      },
      "row"_a, "trials"_a = 1000, "seed"_a = 1, "W"_a = 1.0, "d"_a = 3, "q"_a = 3.0);
}

void bind_manifold(py::module_& m) {
  py::enum_<sbt::Manifold>(m, "Manifold")
      .value("sphere", sbt::Manifold::sphere)
      .value("hyperboloid", sbt::Manifold::hyperboloid);
  m.def("embed", &sbt::embed, "x"_a, "manifold"_a);
  m.def("unembed", &sbt::unembed, "p"_a, "manifold"_a);
  m.def("minkowski", &sbt::minkowski, "u"_a, "v"_a);
  m.def("geodesic_sphere", &sbt::geodesic_sphere, "x"_a, "y"_a);
  m.def("geodesic_hyper", &sbt::geodesic_hyper, "x"_a, "y"_a);
  m.def("d_rec", py::overload_cast<const Vector&, const Vector&, sbt::Manifold>(&sbt::d_rec), "x"_a, "c"_a,
        "manifold"_a);

  py::class_<sbt::SeedingResult>(m, "SeedingResult")
      .def_readonly("centers", &sbt::SeedingResult::centers)
      .def_readonly("indices", &sbt::SeedingResult::indices)
      .def_readonly("potential", &sbt::SeedingResult::potential);
  m.def("kmeanspp_seed", &sbt::kmeanspp_seed, "points"_a, "k"_a, "manifold"_a, "rng"_a);

  py::class_<sbt::BruteForceResult>(m, "BruteForceResult")
      .def_readonly("potential", &sbt::BruteForceResult::potential)
      .def_readonly("labels", &sbt::BruteForceResult::labels);
  m.def("brute_force_opt", &sbt::brute_force_opt, "points"_a, "k"_a, "manifold"_a);
  m.def("potential", &sbt::potential, "points"_a, "centers"_a, "manifold"_a);

  py::class_<sbt::LloydResult>(m, "LloydResult")
      .def_readonly("centers", &sbt::LloydResult::centers)
      .def_readonly("labels", &sbt::LloydResult::labels)
      .def_readonly("trace", &sbt::LloydResult::trace)
      .def_readonly("iterations", &sbt::LloydResult::iterations);
  m.def("skm_lloyd", &sbt::skm_lloyd, "sphere_points"_a, "init_centers"_a, "max_iters"_a = 100, "rel_tol"_a = 1e-3);
}

void bind_lms(py::module_& m) {
  py::class_<sbt::LqConfig>(m, "LqConfig")
      .def(py::init(&sbt::LqConfig::from_p), "p"_a, "W"_a = 1.0)
      .def_readonly("p", &sbt::LqConfig::p)
      .def_readonly("q", &sbt::LqConfig::q)
      .def_readonly("W", &sbt::LqConfig::W);
  m.def("grad_phi_q", &sbt::grad_phi_q, "w"_a, "q"_a);
  m.def("grad_phi_dagger_q", &sbt::grad_phi_dagger_q, "w"_a, "q"_a, "W"_a);
  m.def("adaptive_eta", &sbt::adaptive_eta, "residual"_a, "cfg"_a, "Xp"_a, "gamma"_a = 1.0);
  m.def("regret_bound", &sbt::regret_bound, "cfg"_a, "Xp"_a, "Y"_a);
  m.def(
      "dnplms_run",
      [](const sbt::LqConfig& cfg, const Matrix& xs, const Vector& ys, double Xp, double gamma) {
        if (xs.rows() != ys.size()) throw sbt::ShapeError("dnplms_run: one label per input row required");
        auto st = sbt::initial_state(static_cast<int>(xs.cols()));
        Matrix weights(xs.rows(), xs.cols());
        for (Eigen::Index t = 0; t < xs.rows(); ++t) {
          const Vector x = xs.row(t).transpose();
          const double eta = sbt::adaptive_eta(ys[t] - st.w.dot(x), cfg, Xp, gamma);
          st = sbt::dnplms_step(st, x, ys[t], eta, cfg);
          weights.row(t) = st.w.transpose();
        }
        return weights;
      },
      "cfg"_a, "xs"_a, "ys"_a, "Xp"_a = 1.0, "gamma"_a = 1.0,
      "Runs the dual-norm learner with adaptive rates and returns the weight after every step.");
}

void bind_dre(py::module_& m) {
  py::class_<sbt::MixtureSpec>(m, "MixtureSpec")
      .def(py::init([](Vector priors, std::vector<Vector> means, Vector stds) {
             sbt::MixtureSpec s{std::move(priors), std::move(means), std::move(stds)};
             s.validate();
             return s;
           }),
           "priors"_a, "means"_a, "stds"_a)
      .def_readonly("priors", &sbt::MixtureSpec::priors)
      .def_readonly("means", &sbt::MixtureSpec::means)
      .def_readonly("stds", &sbt::MixtureSpec::stds);
  m.def("true_posterior", &sbt::true_posterior, "spec"_a, "x"_a);
  m.def("eta_from_posterior", &sbt::eta_from_posterior, "posterior"_a, "priors"_a);
  m.def("density_ratio_estimate", &sbt::density_ratio_estimate, "eta"_a);
  m.def("true_density_ratio", &sbt::true_density_ratio, "spec"_a, "x"_a);
  m.def("dre_scaler", &sbt::dre_scaler, "priors"_a);

  py::class_<sbt::Lemma1Result>(m, "ReductionCheck")
      .def_readonly("lhs", &sbt::Lemma1Result::lhs)
      .def_readonly("rhs", &sbt::Lemma1Result::rhs)
      .def_readonly("absdiff", &sbt::Lemma1Result::absdiff)
      .def_readonly("stderr", &sbt::Lemma1Result::stderr_diff)
      .def("within", &sbt::Lemma1Result::within, "sigmas"_a);
  m.def(
      "reduction_check",
      [](const sbt::MixtureSpec& spec, const sbt::PosteriorProvider& estimate, const sbt::Generator& phi, int n_mc,
         std::uint64_t seed) {
        sbt::Rng rng(seed);
        return sbt::lemma1_check(spec, estimate, phi, n_mc, rng);
      },
      "spec"_a, "estimate"_a, "phi"_a, "n_mc"_a = 10000, "seed"_a = 1,
      "Paired Monte Carlo estimate of both sides of the class-probability to density-ratio reduction.");
}

void bind_geometry(py::module_& m) {
  py::class_<sbt::GeometryReport>(m, "GeometryReport")
      .def_readonly("samples", &sbt::GeometryReport::samples)
      .def_readonly("residual_max_rel", &sbt::GeometryReport::residual_max_rel)
      .def_readonly("ball_agreement", &sbt::GeometryReport::ball_agreement)
      .def_readonly("bisector_agreement", &sbt::GeometryReport::bisector_agreement);
  m.def(
      "geometry_check",
      [](const std::string& row, int samples, std::uint64_t seed) {
        sbt::Rng rng(seed);
        return sbt::run_geometry_check(sbt::parse_row(row), samples, rng);
      },
      "row"_a, "samples"_a = 1000, "seed"_a = 1);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Scaled Bregman divergences, dual-norm online learning and manifold clustering.";
  bind_errors(m);
  bind_core(m);
  bind_catalog(m);
  bind_manifold(m);
  bind_lms(m);
  bind_dre(m);
  bind_geometry(m);
}
