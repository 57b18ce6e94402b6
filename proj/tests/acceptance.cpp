// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  All tolerances are pinned here.

#include "g3/serialize.hpp"
#include "g3/identities.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

using namespace g3;

namespace
{
  const std::vector<std::string> instance_names{"abelian", "conjugation", "commutator",
                                                "product"};

  std::shared_ptr<const TwoCrossedModule> module(const std::string & name)
  {
    return std::make_shared<TwoCrossedModule>(make_instance(name));
  }

  struct Outcome
  {
    bool pass = true;
    double worst = 0.0;
    std::string note;

    void check(double residual, double tol)
    {
      worst = std::max(worst, residual);
      if (residual > tol) pass = false;
    }
  };

  ThreeConnection random_connection(const FormContext & ctx, int n_vars, Rng & rng,
                                    double scale = 0.4)
  {
    return {Form::random(ctx.g_space(), n_vars, 1, rng, 2, scale),
            Form::random(ctx.h_space(), n_vars, 2, rng, 2, scale),
            Form::random(ctx.l_space(), n_vars, 3, rng, 2, scale)};
  }

  // ---------------------------------------------------------------- 1
  Outcome crossed_module_axioms()
  {
    Outcome out;
    Rng rng(101);
    for (const auto & name : instance_names) {
      TwoCrossedModule m = make_instance(name);
      double tol = m.nilpotent_exact ? 1e-12 : 1e-9;
      for (const AxiomReport & rep :
           {check_group_axioms(m, 200, rng), check_differential_axioms(m, 200, rng)}) {
        for (const AxiomResult & r : rep.results) out.check(r.max_residual, tol);
      }
    }
    return out;
  }

  // ---------------------------------------------------------------- 2
  Outcome form_identities()
  {
    Outcome out;
    Rng rng(102);
    auto catalog = form_identity_catalog();
    for (const auto & name : instance_names) {
      FormContext ctx(module(name));
      for (const FormIdentity & ident : catalog) {
        out.check(run_form_identity(ctx, ident, 100, rng, 4), 1e-10);
      }
    }
    return out;
  }

  // ---------------------------------------------------------------- 3
  Outcome gauge_covariance()
  {
    Outcome out;
    Rng rng(103);
    const int n_vars = 4;
    for (const auto & name : instance_names) {
      FormContext ctx(module(name));
      ThreeConnection conn = random_connection(ctx, n_vars, rng);
      GaugeData general = random_gauge(ctx, n_vars, rng);
      GaugeData only_g = trivial_gauge(ctx, n_vars);
      GaugeData only_phi = trivial_gauge(ctx, n_vars);
      GaugeData only_psi = trivial_gauge(ctx, n_vars);
      only_g.g = general.g;
      only_phi.phi = general.phi;
      only_psi.psi = general.psi;
      for (const GaugeData & data : {only_g, only_phi, only_psi, general}) {
        CovarianceReport rep = verify_covariance(ctx, conn, data, 50, rng);
        out.check(rep.res1, 1e-8);
        out.check(rep.res2, 1e-8);
        out.check(rep.res3, 1e-8);
        out.check(rep.coherence, 1e-9);
      }
    }
    return out;
  }

  // ---------------------------------------------------------------- 4
  Outcome fake_flat_top_curvature()
  {
    Outcome out;
    Rng rng(104);
    const int n_vars = 4;
    for (const auto & name : instance_names) {
      FormContext ctx(module(name));
      ThreeConnection conn = make_fake_flat(ctx, n_vars, rng);
      PolyGauge gauge = PolyGauge::random(ctx, n_vars, rng);
      CovarianceReport rep = verify_first_kind_numeric(ctx, conn, gauge, 10, rng);
      out.check(rep.res3, 1e-9);
    }
    return out;
  }

  // ---------------------------------------------------------------- 5
  Outcome gray_axioms()
  {
    Outcome out;
    Rng rng(105);
    for (const auto & name : instance_names) {
      AxiomReport rep = check_gray_axioms(GrayGroupoid(module(name)), 200, rng);
      for (const AxiomResult & r : rep.results) out.check(r.max_residual, 1e-10);
    }
    return out;
  }

  // ---------------------------------------------------------------- 6
  Outcome holonomy_curvature_recovery()
  {
    Outcome out;
    Rng rng(106);
    const int n_vars = 4;
    for (const auto & name : {std::string("abelian"), std::string("commutator")}) {
      FormContext ctx(module(name));
      ThreeConnection conn = make_fake_flat(ctx, n_vars, rng);
      Vec x = rng.coords(n_vars, 0.2);
      std::vector<Vec> dirs;
      for (int a = 0; a < 4; ++a) {
        Vec v = Vec::Zero(n_vars);
        v[a] = 1.0;
        dirs.push_back(v);
      }
      Mat vecs(n_vars, 4);
      for (int a = 0; a < 4; ++a) vecs.col(a) = dirs[static_cast<std::size_t>(a)];
      Vec oracle = curvatures(ctx, conn).omega3.evaluate(x, vecs);
      double scale = 1.0 + oracle.cwiseAbs().maxCoeff();

      auto rel_error = [&](double h, int N) {
        AlgebraElement approx = finite_diff_omega3(ctx, conn, x, dirs, h, N);
        return (approx.coords - oracle).cwiseAbs().maxCoeff() / scale;
      };
      double coarse = rel_error(0.1, 8);
      double fine = rel_error(0.05, 16);
      out.check(coarse, 0.05);
      // Halving the spacing must shrink the error by at least 1.5x.
      out.check(fine * 1.5, coarse);
    }
    return out;
  }

  // ---------------------------------------------------------------- 7
  Outcome lattice_covariance_exact()
  {
    Outcome out;
    Rng rng(107);
    for (const auto & name : instance_names) {
      auto mod = module(name);
      for (int rep = 0; rep < 20; ++rep) {
        CubeColoring c = random_coloring(mod, 4, rng);
        GaugeColoring gc = GaugeColoring::random(mod, 4, rng);
        out.check(verify_holonomy_covariance(c, gc).residual, 1e-9);
      }
    }
    return out;
  }

  // ---------------------------------------------------------------- 8
  //
  // Lattice-to-smooth gauge law.  A fake-flat connection is discretized on a
  // two-dimensional lattice patch; the gauge data is sampled from smooth
  // fields (a position-dependent vertex gauge exp(xi(x)), an h-valued 1-form
  // on edges, an l-valued 2-form on faces).  Central differences of the
  // transformed edge and face values must reproduce the closed-form
  // transformed connection, with the error shrinking as the spacing halves.

  GaugeColoring smooth_gauge_coloring(const FormContext & ctx, const Vec & x0, const Vec & d1,
                                      const Vec & d2, const PolyGauge & xi, const Form & phi,
                                      const Form & psi)
  {
    auto mod = ctx.module_ptr();
    const TwoCrossedModule & m = *mod;
    GaugeColoring gc(mod, 2);
    auto g_at = [&](const Vec & x) { return m.G->exp(m.g_alg().element(xi.coords_at(x))); };
    auto edge_at = [&](const Vec & mid, const Vec & step) {
      Mat vecs(x0.size(), 1);
      vecs.col(0) = step;
      return m.H->exp(m.h_alg().element(Vec(phi.evaluate(mid, vecs))));
    };
    const std::array<Vec, 2> steps{d1, d2};
    for (int o1 = 0; o1 <= 1; ++o1) {
      for (int o2 = 0; o2 <= 1; ++o2) {
        std::vector<int> off;
        if (o1) off.push_back(1);
        if (o2) off.push_back(2);
        gc.vertex_values.emplace(detail::cell({}, off), g_at(x0 + o1 * d1 + o2 * d2));
      }
    }
    for (int i = 1; i <= 2; ++i) {
      const Vec & di = steps[static_cast<std::size_t>(i - 1)];
      const Vec & dj = steps[static_cast<std::size_t>(2 - i)];
      for (int oj = 0; oj <= 1; ++oj) {
        Vec base = x0 + oj * dj;
        std::vector<int> off;
        if (oj) off.push_back(3 - i);
        gc.edge_values.emplace(detail::cell({i}, off), edge_at(base + 0.5 * di, di));
      }
    }
    Mat vecs(x0.size(), 2);
    vecs.col(0) = d1;
    vecs.col(1) = d2;
    Vec mid = x0 + 0.5 * d1 + 0.5 * d2;
    gc.face_values.emplace(detail::cell({1, 2}, {}),
                           m.L->exp(m.l_alg().element(Vec(psi.evaluate(mid, vecs)))));
    return gc;
  }

  Outcome lattice_gauge_law_derivatives()
  {
    Outcome out;
    Rng rng(108);
    const int n_vars = 4;
    const int N = 4;
    for (const auto & name : instance_names) {
      FormContext ctx(module(name));
      const TwoCrossedModule & m = ctx.module();
      ThreeConnection conn = make_fake_flat(ctx, n_vars, rng);
      PolyGauge xi = PolyGauge::random(ctx, n_vars, rng, 0.3);
      Form phi = Form::random(ctx.h_space(), n_vars, 1, rng, 2, 0.3);
      Form psi = Form::random(ctx.l_space(), n_vars, 2, rng, 2, 0.3);
      Vec x0 = rng.coords(n_vars, 0.2);
      Vec v1 = Vec::Zero(n_vars), v2 = Vec::Zero(n_vars);
      v1[0] = 1.0;
      v2[1] = 1.0;

      // Continuum oracle.  The lattice law conjugates by the vertex gauge
      // (constant data gives f -> g f g^{-1}), which matches the closed form
      // applied with the inverse gauge: negate the exponent coordinates.
      PolyGauge xi_inv;
      for (const Polynomial & p : xi.xi) {
        Polynomial q(n_vars);
        for (const auto & [mono, c] : p.terms()) q.add_term(mono, -c);
        xi_inv.xi.push_back(q);
      }
      NumericConnection first = transform_first_numeric(ctx, conn, xi_inv);
      NumericForm tilde_A =
          first.A + NumericForm::of(phi.push(m.alpha_lin, ctx.g_space()));
      NumericForm tilde_B = first.B + NumericForm::of(d_or_zero(phi))
                            + tilde_A.wedge(NumericForm::of(phi), ctx.act_h())
                            - 0.5 * NumericForm::of(phi.wedge(phi, ctx.bracket_h()))
                            - NumericForm::of(psi.push(m.delta_lin, ctx.h_space()));
      Vec oracle_A = tilde_A(x0, {v1});
      Vec oracle_B = tilde_B(x0, {v1, v2});
      auto max_abs = [](const Vec & v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; };
      double scale_A = 1.0 + max_abs(oracle_A);
      double scale_B = 1.0 + max_abs(oracle_B);

      auto line_errors = [&](double h) {
        Vec diff_A;
        Vec diff_B = Vec::Zero(m.h_alg().dim());
        std::array<Vec, 2> log_f;
        for (int s1 : {+1, -1}) {
          for (int s2 : {+1, -1}) {
            Vec d1 = s1 * h * v1, d2 = s2 * h * v2;
            std::vector<Vec> dirs{s1 * v1, s2 * v2};
            CubeColoring c = color_from_connection(ctx, conn, x0, dirs, {h, h}, N);
            GaugeColoring gc = smooth_gauge_coloring(ctx, x0, d1, d2, xi, phi, psi);
            CubeColoring tc = lattice_gauge_transform(c, gc);
            diff_B += (s1 * s2) * m.H->log(tc.F(1, 2, {})).coords;
            if (s2 == +1) log_f[s1 == +1 ? 0 : 1] = m.G->log(tc.f(1, {})).coords;
          }
        }
        diff_A = Vec((log_f[0] - log_f[1]) / (2.0 * h));
        diff_B /= 4.0 * h * h;
        return std::array<double, 2>{max_abs(Vec(diff_A - oracle_A)) / scale_A,
                                     max_abs(Vec(diff_B - oracle_B)) / scale_B};
      };
      auto coarse = line_errors(0.1);
      auto fine = line_errors(0.05);
      for (int line = 0; line < 2; ++line) {
        // Discretization error must be visible yet small, and must shrink by
        // at least 1.5x when the spacing halves (quadratic schemes give ~4x).
        out.check(coarse[static_cast<std::size_t>(line)], 0.05);
        double floor = 1e-12;
        double c = std::max(coarse[static_cast<std::size_t>(line)], floor);
        double f = std::max(fine[static_cast<std::size_t>(line)], floor / 1.5);
        out.check(f * 1.5, c);
      }
    }
    return out;
  }

  struct Criterion
  {
    std::string name;
    std::function<Outcome()> run;
    double budget_seconds;
  };
} // namespace

int main()
{
  const std::vector<Criterion> criteria{
      {"crossed-module axioms (200 samples/instance)", crossed_module_axioms, 10.0},
      {"form identity catalog (100 samples/identity)", form_identities, 60.0},
      {"gauge covariance, each kind and composite (50 points)", gauge_covariance, 60.0},
      {"fake-flat top curvature under position-dependent gauge", fake_flat_top_curvature, 60.0},
      {"semi-strict composition axioms (200 samples)", gray_axioms, 60.0},
      {"lattice holonomy recovers the top curvature", holonomy_curvature_recovery, 300.0},
      {"exact lattice gauge covariance (20 pairs/instance)", lattice_covariance_exact, 60.0},
      {"lattice gauge law matches the smooth transform", lattice_gauge_law_derivatives, 300.0},
  };

  int failures = 0;
  int index = 0;
  for (const Criterion & crit : criteria) {
    ++index;
    std::string verdict;
    double worst = 0.0;
    double elapsed = 0.0;
    try {
      auto t0 = std::chrono::steady_clock::now();
      Outcome out = crit.run();
      elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      worst = out.worst;
      bool ok = out.pass && elapsed < crit.budget_seconds;
      verdict = ok ? "PASS" : "FAIL";
      if (!ok) ++failures;
    } catch (const std::exception & e) {
      verdict = "FAIL";
      ++failures;
      std::printf("%s  %d. %s  (exception: %s)\n", verdict.c_str(), index, crit.name.c_str(),
                  e.what());
      continue;
    }
    std::printf("%s  %d. %s  (worst residual %.3e, %.2f s)\n", verdict.c_str(), index,
                crit.name.c_str(), worst, elapsed);
  }
  return failures == 0 ? 0 : 1;
}
