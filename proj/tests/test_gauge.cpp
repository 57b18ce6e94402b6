#include "g3/gauge.hpp"

#include <catch_amalgamated.hpp>

using namespace g3;

static constexpr double tol_exact = 1e-12;
static constexpr double tol_general = 1e-9;
static constexpr double tol_points = 1e-8;
static constexpr int n_vars = 4;

static FormContext context(const std::string & name)
{
  return FormContext(std::make_shared<TwoCrossedModule>(make_instance(name)));
}

static ThreeConnection random_connection(const FormContext & ctx, Rng & rng, double scale = 0.5)
{
  return {Form::random(ctx.g_space(), n_vars, 1, rng, 2, scale),
          Form::random(ctx.h_space(), n_vars, 2, rng, 2, scale),
          Form::random(ctx.l_space(), n_vars, 3, rng, 2, scale)};
}

static double connection_distance(const ThreeConnection & a, const ThreeConnection & b)
{
  return std::max({max_coeff_distance(a.A, b.A), max_coeff_distance(a.B, b.B),
                   max_coeff_distance(a.C, b.C)});
}

TEST_CASE("curvatures on the abelian instance reduce to exterior derivatives")
{
  auto ctx = context("abelian");
  Rng rng(101);
  ThreeConnection conn = random_connection(ctx, rng);
  CurvatureTriple om = curvatures(ctx, conn);
  // All pairings of the abelian instance vanish, so only the d-terms survive.
  REQUIRE(max_coeff_distance(om.omega3, d_or_zero(conn.C)) < tol_exact);
  REQUIRE(max_coeff_distance(om.omega2, d_or_zero(conn.B)) < tol_exact);
  REQUIRE(max_coeff_distance(om.omega1, d_or_zero(conn.A)) < tol_exact);
}

TEST_CASE("zero A and B leave only the derivative terms")
{
  auto ctx = context("product");
  Rng rng(102);
  ThreeConnection conn{Form(ctx.g_space(), n_vars, 1), Form(ctx.h_space(), n_vars, 2),
                       Form::random(ctx.l_space(), n_vars, 3, rng)};
  CurvatureTriple om = curvatures(ctx, conn);
  REQUIRE(om.omega1.max_abs_coeff() < tol_exact);
  REQUIRE(om.omega2.max_abs_coeff() < tol_exact);
  REQUIRE(max_coeff_distance(om.omega3, conn.C.d()) < tol_exact);
}

// Independent evaluator of (B ^ B through a bilinear map) at one point: the
// explicit sum over the three splittings of four vectors into two pairs, with
// no shared code with the wedge implementation.
static Mat pair_wedge_oracle(const Form & B, const Vec & x, const std::vector<Vec> & v,
                             const std::function<Mat(const Mat &, const Mat &)> & bilinear,
                             const FormContext & ctx)
{
  auto value = [&](int i, int j) {
    Mat cols(v[0].size(), 2);
    cols.col(0) = v[static_cast<std::size_t>(i)];
    cols.col(1) = v[static_cast<std::size_t>(j)];
    return ctx.h_space()->matrix_of(B.evaluate(x, cols));
  };
  // Splittings (01|23), (02|13), (03|12); each contributes both orders with
  // the shuffle sign of the interleaving.
  Mat out = bilinear(value(0, 1), value(2, 3)) + bilinear(value(2, 3), value(0, 1))
            - bilinear(value(0, 2), value(1, 3)) - bilinear(value(1, 3), value(0, 2))
            + bilinear(value(0, 3), value(1, 2)) + bilinear(value(1, 2), value(0, 3));
  return out;
}

TEST_CASE("commutator instance with A = 0 and C = dB: top curvature is the pair wedge")
{
  auto ctx = context("commutator");
  Rng rng(103);
  for (int s = 0; s < 10; ++s) {
    ThreeConnection conn;
    conn.A = Form(ctx.g_space(), n_vars, 1);
    conn.B = Form::random(ctx.h_space(), n_vars, 2, rng);
    conn.C = conn.B.d().reexpress(ctx.l_space());
    CurvatureTriple om = curvatures(ctx, conn);
    // d(dB) = 0 and A = 0, so omega3 must equal B paired with B, where the
    // pairing of this instance is the commutator of matrices.
    Vec x = rng.coords(n_vars, 1.0);
    std::vector<Vec> v;
    for (int i = 0; i < 4; ++i) v.push_back(rng.coords(n_vars, 1.0));
    Mat cols(n_vars, 4);
    for (int i = 0; i < 4; ++i) cols.col(i) = v[static_cast<std::size_t>(i)];
    Mat got = ctx.l_space()->matrix_of(om.omega3.evaluate(x, cols));
    Mat expected = pair_wedge_oracle(
        conn.B, x, v, [](const Mat & a, const Mat & b) { return Mat(a * b - b * a); }, ctx);
    REQUIRE((got - expected).cwiseAbs().maxCoeff() < tol_general);
  }
}

TEST_CASE("fake curvatures: definitions and flat constructions")
{
  Rng rng(104);
  SECTION("abelian with B = C = 0: fakes equal the curvatures")
  {
    auto ctx = context("abelian");
    ThreeConnection conn{Form::random(ctx.g_space(), n_vars, 1, rng),
                         Form(ctx.h_space(), n_vars, 2), Form(ctx.l_space(), n_vars, 3)};
    CurvatureTriple om = curvatures(ctx, conn);
    auto [f1, f2] = fake_curvatures(ctx, conn);
    REQUIRE(max_coeff_distance(f1, om.omega1) < tol_exact);
    REQUIRE(max_coeff_distance(f2, om.omega2) < tol_exact);
  }
  SECTION("flat construction vanishes on every instance")
  {
    for (const std::string & name : {"abelian", "conjugation", "commutator", "product"}) {
      auto ctx = context(name);
      ThreeConnection conn = make_fake_flat(ctx, n_vars, rng);
      auto [f1, f2] = fake_curvatures(ctx, conn);
      INFO(name);
      REQUIRE(f1.max_abs_coeff() < tol_exact);
      REQUIRE(f2.max_abs_coeff() < tol_exact);
    }
  }
  SECTION("the commutator flat construction is not the zero connection")
  {
    auto ctx = context("commutator");
    ThreeConnection conn = make_fake_flat(ctx, n_vars, rng);
    REQUIRE(conn.B.max_abs_coeff() > 1e-3);
  }
}

TEST_CASE("trivial gauge data is the identity transformation")
{
  for (const std::string & name : {"conjugation", "product"}) {
    auto ctx = context(name);
    Rng rng(105);
    ThreeConnection conn = random_connection(ctx, rng);
    GaugeData id = trivial_gauge(ctx, n_vars);
    REQUIRE(connection_distance(transform_first(ctx, conn, id.g), conn) < tol_exact);
    REQUIRE(connection_distance(transform_second(ctx, conn, id.phi), conn) < tol_exact);
    REQUIRE(connection_distance(transform_third(ctx, conn, id.psi), conn) < tol_exact);
    REQUIRE(connection_distance(transform_general(ctx, conn, id), conn) < tol_exact);
  }
}

TEST_CASE("constant-gauge first kind: all curvatures transform by the action")
{
  for (const std::string & name : {"conjugation", "product", "abelian"}) {
    auto ctx = context(name);
    const auto & m = ctx.module();
    Rng rng(106);
    for (int s = 0; s < 5; ++s) {
      ThreeConnection conn = random_connection(ctx, rng);
      GroupElement g = m.G->random(rng, 0.5);
      GroupElement gin = inverse(g);
      CurvatureTriple om = curvatures(ctx, conn);
      CurvatureTriple omp = curvatures(ctx, transform_first(ctx, conn, g));
      INFO(name);
      REQUIRE(max_coeff_distance(omp.omega1, om.omega1.act(m.G->Ad(gin))) < tol_general);
      REQUIRE(max_coeff_distance(omp.omega2, om.omega2.act(m.act_coords_h(gin))) < tol_general);
      REQUIRE(max_coeff_distance(omp.omega3, om.omega3.act(m.act_coords_l(gin))) < tol_general);
    }
  }
}

TEST_CASE("third kind preserves both fake curvatures")
{
  for (const std::string & name : {"conjugation", "product", "commutator"}) {
    auto ctx = context(name);
    Rng rng(107);
    for (int s = 0; s < 5; ++s) {
      ThreeConnection conn = random_connection(ctx, rng);
      Form psi = Form::random(ctx.l_space(), n_vars, 2, rng);
      ThreeConnection primed = transform_third(ctx, conn, psi);
      auto [f1, f2] = fake_curvatures(ctx, conn);
      auto [g1, g2] = fake_curvatures(ctx, primed);
      INFO(name);
      REQUIRE(max_coeff_distance(f1, g1) < tol_general);
      REQUIRE(max_coeff_distance(f2, g2) < tol_general);
    }
  }
}

TEST_CASE("composite equals the closed form; mismatch check is live")
{
  auto ctx = context("product");
  Rng rng(108);
  ThreeConnection conn = random_connection(ctx, rng);
  GaugeData data = random_gauge(ctx, n_vars, rng);
  REQUIRE_NOTHROW(transform_general(ctx, conn, data));
  // An impossible tolerance must surface as the dedicated error.
  REQUIRE_THROWS_AS(transform_general(ctx, conn, data, -1.0), CompositionMismatch);
}

TEST_CASE("covariance of predicted curvatures, each kind alone and combined")
{
  Rng rng(109);
  for (const std::string & name : {"abelian", "conjugation", "commutator", "product"}) {
    auto ctx = context(name);
    ThreeConnection conn = random_connection(ctx, rng);
    GaugeData general = random_gauge(ctx, n_vars, rng);
    GaugeData only_g = trivial_gauge(ctx, n_vars), only_phi = trivial_gauge(ctx, n_vars),
              only_psi = trivial_gauge(ctx, n_vars);
    only_g.g = general.g;
    only_phi.phi = general.phi;
    only_psi.psi = general.psi;
    for (const GaugeData & data : {only_g, only_phi, only_psi, general}) {
      CovarianceReport rep = verify_covariance(ctx, conn, data, 20, rng);
      INFO(name);
      REQUIRE(rep.coherence < tol_general);
      REQUIRE(rep.max_residual() < tol_points);
    }
  }
}

TEST_CASE("fake-flat connections: top curvature transforms with no corrections")
{
  Rng rng(110);
  for (const std::string & name : {"abelian", "conjugation", "commutator", "product"}) {
    auto ctx = context(name);
    const auto & m = ctx.module();
    ThreeConnection conn = make_fake_flat(ctx, n_vars, rng);
    GroupElement g = m.G->random(rng, 0.5);
    ThreeConnection primed = transform_first(ctx, conn, g);
    CurvatureTriple om = curvatures(ctx, conn);
    CurvatureTriple omp = curvatures(ctx, primed);
    INFO(name);
    REQUIRE(max_coeff_distance(omp.omega3, om.omega3.act(m.act_coords_l(inverse(g))))
            < tol_general);
    // The correction terms of the transformation law vanish identically.
    Form corr1 = primed.B.push(m.alpha_lin, ctx.g_space())
                 - conn.B.act(m.act_coords_h(inverse(g))).push(m.alpha_lin, ctx.g_space());
    REQUIRE(corr1.max_abs_coeff() < tol_general);
    auto [f1, f2] = fake_curvatures(ctx, primed);
    REQUIRE(f1.max_abs_coeff() < tol_general);
    REQUIRE(f2.max_abs_coeff() < tol_general);
  }
}

TEST_CASE("numeric backend agrees with the polynomial backend")
{
  auto ctx = context("product");
  Rng rng(111);
  Form f = Form::random(ctx.h_space(), n_vars, 2, rng);
  NumericForm nf = NumericForm::of(f);
  Form df = f.d();
  NumericForm ndf = nf.d();
  for (int s = 0; s < 10; ++s) {
    Vec x = rng.coords(n_vars, 1.0);
    std::vector<Vec> v;
    Mat cols(n_vars, 3);
    for (int i = 0; i < 3; ++i) {
      v.push_back(rng.coords(n_vars, 1.0));
      cols.col(i) = v[static_cast<std::size_t>(i)];
    }
    REQUIRE((ndf(x, v) - df.evaluate(x, cols)).cwiseAbs().maxCoeff() < tol_points);
  }
  // Wedge: numeric shuffle sum against the polynomial wedge.
  Form k = Form::random(ctx.g_space(), n_vars, 1, rng);
  Form kb = k.wedge(f, ctx.act_h());
  NumericForm nkb = NumericForm::of(k).wedge(nf, ctx.act_h());
  for (int s = 0; s < 10; ++s) {
    Vec x = rng.coords(n_vars, 1.0);
    std::vector<Vec> v;
    Mat cols(n_vars, 3);
    for (int i = 0; i < 3; ++i) {
      v.push_back(rng.coords(n_vars, 1.0));
      cols.col(i) = v[static_cast<std::size_t>(i)];
    }
    REQUIRE((nkb(x, v) - kb.evaluate(x, cols)).cwiseAbs().maxCoeff() < tol_exact);
  }
}

TEST_CASE("position-dependent gauge: exact and numeric left logarithmic derivatives agree")
{
  // The conjugation instance has a non-nilpotent gauge group, exercising the
  // finite-difference fallback; the abelian one uses the terminating series.
  for (const std::string & name : {"abelian", "conjugation"}) {
    auto ctx = context(name);
    Rng rng(112);
    PolyGauge gauge = PolyGauge::random(ctx, n_vars, rng);
    NumericForm theta = maurer_cartan(ctx, gauge, n_vars);
    const auto & m = ctx.module();
    for (int s = 0; s < 10; ++s) {
      Vec x = rng.coords(n_vars, 1.0);
      Vec v = rng.coords(n_vars, 1.0);
      // Oracle: independent one-sided differences of g itself at a larger
      // step, matched at a looser tolerance.
      double h = 1e-6;
      Mat gp = m.G->exp(m.g_alg().element(gauge.coords_at(x + h * v))).m;
      Mat gm = m.G->exp(m.g_alg().element(gauge.coords_at(x - h * v))).m;
      Mat g0 = m.G->exp(m.g_alg().element(gauge.coords_at(x))).m;
      Mat oracle = g0.partialPivLu().solve((gp - gm) / (2.0 * h));
      Mat got = m.g_alg().matrix_of(theta(x, {v}));
      INFO(name);
      REQUIRE((got - oracle).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
}

TEST_CASE("position-dependent first kind: curvature covariance at sample points")
{
  Rng rng(113);
  for (const std::string & name : {"abelian", "conjugation", "product"}) {
    auto ctx = context(name);
    ThreeConnection conn = random_connection(ctx, rng, 0.4);
    PolyGauge gauge = PolyGauge::random(ctx, n_vars, rng);
    CovarianceReport rep = verify_first_kind_numeric(ctx, conn, gauge, 10, rng);
    INFO(name);
    REQUIRE(rep.max_residual() < tol_points);
  }
}
