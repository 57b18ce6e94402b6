#include "g3/holonomy.hpp"

#include <catch_amalgamated.hpp>

using namespace g3;

static constexpr double tol_exact = 1e-10;
static constexpr int n_vars = 4;

static const std::vector<std::string> instance_names = {"abelian", "conjugation",
                                                        "commutator", "product"};

static std::shared_ptr<const TwoCrossedModule> module(const std::string & name)
{
  return std::make_shared<TwoCrossedModule>(make_instance(name));
}

static std::vector<Vec> axis_dirs(int d)
{
  std::vector<Vec> dirs;
  for (int a = 0; a < d; ++a) {
    Vec v = Vec::Zero(n_vars);
    v[a] = 1.0;
    dirs.push_back(v);
  }
  return dirs;
}

/// Fake-flat connection with a nonvanishing A-part, obtained by shifting a
/// fake-flat one along an h-valued 1-form (which preserves fake flatness).
static ThreeConnection fake_flat_with_edges(const FormContext & ctx, Rng & rng)
{
  ThreeConnection conn = make_fake_flat(ctx, n_vars, rng);
  Form phi = Form::random(ctx.h_space(), n_vars, 1, rng, 2, 0.3);
  return transform_second(ctx, conn, phi);
}

TEST_CASE("identity colorings are flat in every dimension")
{
  for (const auto & name : instance_names) {
    auto mod = module(name);
    for (int dim = 2; dim <= 4; ++dim) {
      CubeColoring c = CubeColoring::identity(mod, dim);
      REQUIRE(c.face_residual() < 1e-14);
      REQUIRE(c.cube_residual() < 1e-14);
      REQUIRE(deviation_from_identity(c.base_path()) < 1e-14);
      if (dim == 3) {
        REQUIRE(deviation_from_identity(sigma_chain(c, Side::minus).e) < 1e-14);
        REQUIRE(deviation_from_identity(sigma_chain(c, Side::plus).e) < 1e-14);
      }
      if (dim == 4) {
        REQUIRE(deviation_from_identity(holonomy3(c)) < 1e-14);
      }
    }
  }
}

TEST_CASE("random colorings satisfy both compatibility laws")
{
  Rng rng(801);
  for (const auto & name : instance_names) {
    auto mod = module(name);
    for (int dim = 2; dim <= 4; ++dim) {
      for (int rep = 0; rep < 3; ++rep) {
        CubeColoring c = random_coloring(mod, dim, rng);
        INFO(name << " dim " << dim);
        REQUIRE(c.face_residual() < tol_exact);
        REQUIRE(c.cube_residual() < tol_exact);
      }
    }
  }
}

TEST_CASE("boundary composites of a 3-cell relate through delta of its value")
{
  Rng rng(802);
  for (const auto & name : instance_names) {
    auto mod = module(name);
    CubeColoring c = random_coloring(mod, 3, rng);
    Arrow2 lower = sigma_chain(c, Side::minus);
    Arrow2 upper = sigma_chain(c, Side::plus);
    INFO(name);
    // Pasting evaluation agrees with the closed-form boundary products.
    REQUIRE(distance(lower.e, c.side_value(1, 2, 3, {}, -1)) < 1e-13);
    REQUIRE(distance(upper.e, c.side_value(1, 2, 3, {}, +1)) < 1e-13);
    // Both composites share the diagonal source path and differ by delta(k).
    REQUIRE(distance(lower.X, upper.X) < 1e-13);
    REQUIRE(distance(upper.e, inverse(mod->delta(c.k(1, 2, 3, {}))) * lower.e) < tol_exact);
  }
}

TEST_CASE("chain factors compose to delta-flat holonomies")
{
  Rng rng(803);
  for (const auto & name : instance_names) {
    auto mod = module(name);
    CubeColoring c = random_coloring(mod, 4, rng);
    ChainResult lower = k_chain(c, Side::minus);
    ChainResult upper = k_chain(c, Side::plus);
    INFO(name);
    REQUIRE(lower.factors.size() == 7);
    REQUIRE(upper.factors.size() == 7);
    // The two composites fill the same boundary square.
    GrayGroupoid gray(mod);
    REQUIRE(distance(gray.t2(lower.composite), gray.t2(upper.composite)) < 1e-9);
    GroupElement hol = holonomy3(c);
    REQUIRE(distance(hol, lower.composite.l * inverse(upper.composite.l)) < 1e-13);
    REQUIRE(deviation_from_identity(mod->delta(hol)) < 1e-9);
  }
}

TEST_CASE("corrupted 3-cell data is rejected")
{
  Rng rng(804);
  auto mod = module("commutator");
  CubeColoring c = random_coloring(mod, 4, rng);
  CellLabel lab = detail::cell({1, 2, 3}, {});
  c.cube_values.at(lab) = c.cube_values.at(lab) * mod->L->random(rng, 0.5);
  REQUIRE_THROWS_AS(holonomy3(c), ChainBroken);
}

TEST_CASE("dimension preconditions are enforced")
{
  Rng rng(805);
  auto mod = module("product");
  CubeColoring c2 = random_coloring(mod, 2, rng);
  REQUIRE_THROWS_AS(sigma_chain(c2, Side::minus), BadDimension);
  REQUIRE_THROWS_AS(holonomy3(c2), BadDimension);
  REQUIRE_THROWS_AS(CubeColoring(mod, 5), BadDimension);
  REQUIRE_THROWS_AS(c2.f(3, {}), BadDimension);
}

TEST_CASE("edge transports follow the line integral of A")
{
  Rng rng(806);
  FormContext ctx(module("abelian"));
  ThreeConnection conn = fake_flat_with_edges(ctx, rng);
  {
    // Shift along a quadratic 1-form so the transported component is
    // genuinely curved along the first direction.
    Form phi(ctx.h_space(), n_vars, 1);
    Polynomial quad(n_vars);
    std::vector<int> mono(n_vars, 0);
    mono[0] = 2;
    quad.add_term(mono, 0.8);
    phi.add_term({0}, ctx.h_space()->dim() - 1, quad);
    conn = transform_second(ctx, conn, phi);
  }
  Vec x = rng.coords(n_vars, 0.3);
  std::vector<Vec> dirs = axis_dirs(2);
  dirs[0][1] = 0.7;
  dirs[0][3] = 0.3;
  dirs[1][2] = 0.5;
  std::vector<double> scales = {0.3, 0.25};

  CubeColoring coarse = color_from_connection(ctx, conn, x, dirs, scales, 3);
  CubeColoring fine = color_from_connection(ctx, conn, x, dirs, scales, 48);
  // The abelian instance makes the ordered product an exponential of a
  // midpoint sum; at N = 48 that sum is an accurate line integral.
  Vec sum = Vec::Zero(ctx.module().g_alg().dim());
  int quad = 400;
  for (int s = 0; s < quad; ++s) {
    Vec p = x + ((s + 0.5) / quad) * scales[0] * dirs[0];
    sum += (scales[0] / quad) * conn.A.evaluate(p, dirs[0]);
  }
  GroupElement oracle = ctx.module().G->exp(ctx.module().g_alg().element(sum));
  REQUIRE(distance(fine.f(1, {}), oracle) < 1e-5);
  REQUIRE(distance(coarse.f(1, {}), oracle) < 1e-2);
  // Midpoint transports converge at second order.
  double err_coarse = distance(coarse.f(1, {}), oracle);
  double err_mid = distance(color_from_connection(ctx, conn, x, dirs, scales, 6).f(1, {}),
                            oracle);
  REQUIRE(err_mid < 0.4 * err_coarse);
}

TEST_CASE("face compatibility defect of connection colorings decays")
{
  Rng rng(807);
  for (const auto & name : instance_names) {
    FormContext ctx(module(name));
    ThreeConnection conn = fake_flat_with_edges(ctx, rng);
    Vec x = rng.coords(n_vars, 0.3);
    auto dirs = axis_dirs(3);

    auto defect = [&](double h, int N) {
      std::vector<double> scales = {h, 0.9 * h, 1.1 * h};
      CubeColoring c = color_from_connection(ctx, conn, x, dirs, scales, N);
      return std::max(c.face_residual(), c.cube_residual());
    };
    double big = defect(0.4, 2);
    double small = defect(0.2, 4);
    INFO(name << " defects " << big << " -> " << small);
    REQUIRE(small <= 0.5 * big + 1e-12);
  }
}

TEST_CASE("a degenerate direction collapses the boundary composite to one face")
{
  Rng rng(808);
  FormContext ctx(module("product"));
  ThreeConnection conn = fake_flat_with_edges(ctx, rng);
  Vec x = rng.coords(n_vars, 0.3);
  auto dirs = axis_dirs(3);
  std::vector<double> scales = {0.3, 0.25, 0.0};

  CubeColoring c = color_from_connection(ctx, conn, x, dirs, scales, 4);
  REQUIRE(deviation_from_identity(c.f(3, {})) < 1e-14);
  REQUIRE(deviation_from_identity(c.F(1, 3, {})) < 1e-14);
  REQUIRE(deviation_from_identity(c.k(1, 2, 3, {})) < 1e-14);
  Arrow2 lower = sigma_chain(c, Side::minus);
  Arrow2 upper = sigma_chain(c, Side::plus);
  REQUIRE(distance(lower.e, c.F(1, 2, {})) < 1e-13);
  REQUIRE(distance(upper.e, c.F(1, 2, {})) < 1e-13);
}

TEST_CASE("a degenerate direction trivializes the holonomy exactly")
{
  Rng rng(809);
  FormContext ctx(module("commutator"));
  ThreeConnection conn = make_fake_flat(ctx, n_vars, rng);
  Vec x = rng.coords(n_vars, 0.3);
  auto dirs = axis_dirs(4);
  std::vector<double> scales = {0.3, 0.25, 0.2, 0.0};

  CubeColoring c = color_from_connection(ctx, conn, x, dirs, scales, 2);
  GroupElement hol = holonomy3(c, 1e-6);
  REQUIRE(deviation_from_identity(hol) < 1e-12);
}

TEST_CASE("connections with fake curvature are refused")
{
  Rng rng(810);
  FormContext ctx(module("conjugation"));
  ThreeConnection conn{Form::random(ctx.g_space(), n_vars, 1, rng, 2, 0.5),
                       Form::random(ctx.h_space(), n_vars, 2, rng, 2, 0.5),
                       Form::random(ctx.l_space(), n_vars, 3, rng, 2, 0.5)};
  auto dirs = axis_dirs(2);
  REQUIRE_THROWS_AS(color_from_connection(ctx, conn, Vec::Zero(n_vars), dirs, {0.1, 0.1}, 2),
                    NotFakeFlat);
}

TEST_CASE("coarse subdivisions are reported when a defect model is requested")
{
  Rng rng(811);
  FormContext ctx(module("commutator"));
  ThreeConnection conn = make_fake_flat(ctx, n_vars, rng);
  Vec x = rng.coords(n_vars, 0.3);
  auto dirs = axis_dirs(3);
  std::vector<double> scales = {0.8, 0.8, 0.8};
  // A permissive model accepts the coloring, an absurdly strict one refuses.
  REQUIRE_NOTHROW(color_from_connection(ctx, conn, x, dirs, scales, 2, 1e-8, 1e6));
  REQUIRE_THROWS_AS(color_from_connection(ctx, conn, x, dirs, scales, 2, 1e-8, 1e-12),
                    SubdivisionTooCoarse);
}

TEST_CASE("fourth mixed difference of the holonomy recovers the 3-curvature")
{
  Rng rng(812);
  for (const auto & name : {std::string("abelian"), std::string("commutator")}) {
    FormContext ctx(module(name));
    ThreeConnection conn = make_fake_flat(ctx, n_vars, rng);
    Vec x = rng.coords(n_vars, 0.2);
    auto dirs = axis_dirs(4);

    Mat vecs(n_vars, 4);
    for (int a = 0; a < 4; ++a) vecs.col(a) = dirs[static_cast<std::size_t>(a)];
    Vec oracle = curvatures(ctx, conn).omega3.evaluate(x, vecs);
    double scale = 1.0 + oracle.cwiseAbs().maxCoeff();

    AlgebraElement approx = finite_diff_omega3(ctx, conn, x, dirs, 0.1, 4);
    INFO(name << " oracle " << oracle.transpose() << " approx " << approx.coords.transpose());
    REQUIRE((approx.coords - oracle).cwiseAbs().maxCoeff() / scale < 0.05);
  }
}

TEST_CASE("trivial gauge data leaves colorings and holonomy unchanged")
{
  Rng rng(813);
  for (const auto & name : instance_names) {
    auto mod = module(name);
    CubeColoring c = random_coloring(mod, 4, rng);
    GaugeColoring gauge = GaugeColoring::trivial(mod, 4);
    CubeColoring t = lattice_gauge_transform(c, gauge);
    INFO(name);
    for (const auto & [lab, v] : c.edge_values) {
      REQUIRE(distance(v, t.edge_values.at(lab)) < 1e-13);
    }
    for (const auto & [lab, v] : c.face_values) {
      REQUIRE(distance(v, t.face_values.at(lab)) < 1e-13);
    }
    for (const auto & [lab, v] : c.cube_values) {
      REQUIRE(distance(v, t.cube_values.at(lab)) < tol_exact);
    }
    HolonomyCovarianceReport rep = verify_holonomy_covariance(c, gauge);
    REQUIRE(rep.residual < tol_exact);
    REQUIRE(distance(rep.lhs, holonomy3(c)) < tol_exact);
  }
}

TEST_CASE("constant gauge data conjugates every cell value")
{
  Rng rng(814);
  for (const auto & name : instance_names) {
    auto mod = module(name);
    CubeColoring c = random_coloring(mod, 4, rng);
    GroupElement g0 = mod->G->random(rng, 0.5);
    GaugeColoring gauge = GaugeColoring::constant(mod, 4, g0);
    CubeColoring t = lattice_gauge_transform(c, gauge);
    INFO(name);
    for (const auto & [lab, v] : c.edge_values) {
      REQUIRE(distance(t.edge_values.at(lab), g0 * v * inverse(g0)) < 1e-12);
    }
    for (const auto & [lab, v] : c.face_values) {
      REQUIRE(distance(t.face_values.at(lab), mod->act_h(g0, v)) < 1e-12);
    }
    for (const auto & [lab, v] : c.cube_values) {
      REQUIRE(distance(t.cube_values.at(lab), mod->act_l(g0, v)) < tol_exact);
    }
    REQUIRE(distance(holonomy3(t), mod->act_l(g0, holonomy3(c))) < tol_exact);
  }
}

TEST_CASE("gauge transforms preserve the compatibility laws")
{
  Rng rng(815);
  for (const auto & name : instance_names) {
    auto mod = module(name);
    for (int dim = 2; dim <= 4; ++dim) {
      CubeColoring c = random_coloring(mod, dim, rng);
      GaugeColoring gauge = GaugeColoring::random(mod, dim, rng);
      CubeColoring t = lattice_gauge_transform(c, gauge);
      INFO(name << " dim " << dim);
      REQUIRE(t.face_residual() < tol_exact);
      REQUIRE(t.cube_residual() < tol_exact);
    }
  }
}

TEST_CASE("inconsistent input colorings are rejected by the gauge transform")
{
  Rng rng(816);
  auto mod = module("commutator");
  CubeColoring c = random_coloring(mod, 3, rng);
  CellLabel lab = detail::cell({1, 2}, {});
  c.face_values.at(lab) = c.face_values.at(lab) * mod->H->random(rng, 0.8);
  GaugeColoring gauge = GaugeColoring::random(mod, 3, rng);
  REQUIRE_THROWS_AS(lattice_gauge_transform(c, gauge), InconsistentGauge);
}

TEST_CASE("lax values on the boundary pasting match the explicit chain")
{
  Rng rng(817);
  for (const auto & name : instance_names) {
    auto mod = module(name);
    CubeColoring c = random_coloring(mod, 3, rng);
    GaugeColoring gauge = GaugeColoring::random(mod, 3, rng);
    CubeColoring t = lattice_gauge_transform(c, gauge);
    GrayGroupoid gray(mod);
    detail::PsiEvaluator psi{gray, c, t, gauge};

    detail::ChainData d = detail::chain_data_gauge(c, t, gauge, {1, 2, 3}, {});
    auto lower = detail::chain_minus(d);
    GroupElement prod = mod->L->identity();
    for (const GroupElement & kf : lower) prod = prod * kf;
    GroupElement kap = psi.kappa(side_paste(1, 2, 3, {}, Side::minus));
    INFO(name);
    REQUIRE(distance(kap, prod) < tol_exact);
  }
}

TEST_CASE("holonomy covariance holds exactly for random gauge data")
{
  Rng rng(818);
  for (const auto & name : instance_names) {
    auto mod = module(name);
    for (int rep = 0; rep < 3; ++rep) {
      CubeColoring c = random_coloring(mod, 4, rng);
      GaugeColoring gauge = GaugeColoring::random(mod, 4, rng);
      HolonomyCovarianceReport rep_cov = verify_holonomy_covariance(c, gauge);
      INFO(name << " rep " << rep << " residual " << rep_cov.residual);
      REQUIRE(rep_cov.residual < tol_exact);
    }
  }
}
