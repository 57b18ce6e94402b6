#include "g3/identities.hpp"

#include <catch_amalgamated.hpp>

using namespace g3;

static constexpr double tol_identity = 1e-10;

static FormContext context(const std::string & name)
{
  return FormContext(std::make_shared<TwoCrossedModule>(make_instance(name)));
}

TEST_CASE("polynomial arithmetic and derivatives")
{
  // (x0 + 2 x1)^2 = x0^2 + 4 x0 x1 + 4 x1^2; d/dx1 = 4 x0 + 8 x1.
  Polynomial p = Polynomial::variable(2, 0) + 2.0 * Polynomial::variable(2, 1);
  Polynomial sq = p * p;
  Vec x(2);
  x << 3.0, -1.0;
  REQUIRE(sq.evaluate(x) == Catch::Approx(1.0));
  REQUIRE(sq.derivative(1).evaluate(x) == Catch::Approx(4.0 * 3.0 - 8.0));
}

TEST_CASE("exterior derivative: hand-computed example and d o d = 0")
{
  auto ctx = context("commutator");
  // omega = x0 x1 X dx0  ==>  d(omega) = -x0 X dx0 ^ dx1.
  Form w(ctx.h_space(), 2, 1);
  w.add_term({0}, 0, Polynomial::variable(2, 0) * Polynomial::variable(2, 1));
  Form dw = w.d();
  REQUIRE(dw.components().size() == 1);
  const auto & polys = dw.components().at({0, 1});
  Vec x(2);
  x << 5.0, 7.0;
  REQUIRE(polys[0].evaluate(x) == Catch::Approx(-5.0));

  Rng rng(31);
  for (int s = 0; s < 20; ++s) {
    Form f = Form::random(ctx.h_space(), 4, 1 + static_cast<int>(rng.index(2)), rng);
    REQUIRE(f.d().d().max_abs_coeff() < 1e-14);
  }
  // Top degree: d is an error.
  Form top = Form::random(ctx.h_space(), 2, 2, rng);
  REQUIRE_THROWS_AS(top.d(), TopDegreeError);
}

TEST_CASE("wedge with bracket pairing: hand-computed example")
{
  auto ctx = context("commutator");
  // A = p X dx0, B = q Y dx1 over the Heisenberg h: A ^ B = p q Z dx0^dx1,
  // and B ^ A = -q p Z dx0^dx1 by the merge sign... [Y,X] = -Z flips it back.
  Polynomial p = Polynomial::variable(2, 0), q = Polynomial::constant(2, 3.0);
  Form A(ctx.h_space(), 2, 1), B(ctx.h_space(), 2, 1);
  A.add_term({0}, 0, p);
  B.add_term({1}, 1, q);
  Form AB = A.wedge(B, ctx.bracket_h());
  Form BA = B.wedge(A, ctx.bracket_h());
  Vec x(2);
  x << 2.0, 0.0;
  Mat vecs(2, 2);
  vecs << 1, 0, 0, 1;
  Vec vab = AB.evaluate(x, vecs), vba = BA.evaluate(x, vecs);
  REQUIRE(vab[2] == Catch::Approx(6.0));
  REQUIRE(vba[2] == Catch::Approx(6.0)); // (-1 from swap) * [Y,X] = +Z
  // Antisymmetry of evaluation in the tangent vectors.
  Mat swapped = vecs;
  swapped.col(0).swap(swapped.col(1));
  REQUIRE(AB.evaluate(x, swapped)[2] == Catch::Approx(-6.0));
}

TEST_CASE("wedge beyond the variable count vanishes")
{
  auto ctx = context("commutator");
  Rng rng(37);
  Form a = Form::random(ctx.h_space(), 3, 2, rng);
  Form b = Form::random(ctx.h_space(), 3, 2, rng);
  Form ab = a.wedge(b, ctx.bracket_h());
  REQUIRE(ab.degree() == 4);
  REQUIRE(ab.is_zero());
}

TEST_CASE("closure gate rejects values outside the target span")
{
  auto ctx = context("conjugation");
  Rng rng(41);
  Form k = Form::random(ctx.g_space(), 3, 1, rng);
  Form m = Form::random(ctx.g_space(), 3, 1, rng);
  Pairing prod = ctx.product(ctx.g_space(), ctx.g_space());
  // Upper triangular matrices are closed under products, so the
  // antisymmetrized product re-expresses in the algebra without complaint.
  Form anti = k.wedge(m, prod) - m.wedge(k, prod);
  REQUIRE_NOTHROW(anti.reexpress(ctx.g_space()));
  // A value outside the target span trips the gate: E21 is not upper triangular.
  Mat e21 = Mat::Zero(3, 3);
  e21(1, 0) = 1.0;
  auto odd = std::make_shared<ValueSpace>("lower", 3, std::vector<Mat>{e21});
  Form bad(odd, 3, 0);
  bad.add_term({}, 0, Polynomial::constant(3, 1.0));
  REQUIRE_THROWS_AS(bad.reexpress(ctx.g_space()), ProjectionError);
}

TEST_CASE("pairing identity catalog holds on all instances", "[property]")
{
  Rng rng(211);
  auto catalog = form_identity_catalog();
  REQUIRE(catalog.size() == 17);
  for (const char * name : {"abelian", "conjugation", "commutator", "product"}) {
    auto ctx = context(name);
    for (const auto & ident : catalog) {
      double r = run_form_identity(ctx, ident, 6, rng, 4);
      INFO("instance " << name << ", identity " << ident.name << ", residual " << r);
      CHECK(r < tol_identity);
    }
  }
}

TEST_CASE("evaluation is multilinear and alternating", "[property]")
{
  auto ctx = context("product");
  Rng rng(47);
  Form f = Form::random(ctx.h_space(), 4, 2, rng);
  for (int s = 0; s < 20; ++s) {
    Vec x = rng.coords(4);
    Mat vecs(4, 2);
    vecs.col(0) = rng.coords(4);
    vecs.col(1) = rng.coords(4);
    Vec v1 = f.evaluate(x, vecs);
    Mat sw = vecs;
    sw.col(0).swap(sw.col(1));
    REQUIRE((f.evaluate(x, sw) + v1).lpNorm<Eigen::Infinity>() < 1e-12);
    Mat scaled = vecs;
    scaled.col(0) *= 2.5;
    REQUIRE((f.evaluate(x, scaled) - 2.5 * v1).lpNorm<Eigen::Infinity>() < 1e-12);
  }
}
