#include "g3/algebras.hpp"

#include <catch_amalgamated.hpp>

using namespace g3;

// Tolerance classes: arithmetic on nilpotent matrix realizations is exact up
// to rounding; generic matrix functions get a looser gate.
static constexpr double tol_exact = 1e-12;
static constexpr double tol_general = 1e-9;

TEST_CASE("deterministic random source is reproducible and bounded")
{
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) {
    double x = a.uniform();
    REQUIRE(x == b.uniform());
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
  // Frozen first draws for seed 0 (expected values computed once from an
  // independent mt19937_64 implementation with the 53-bit mapping and pinned).
  Rng c(0);
  REQUIRE(c.uniform() == Catch::Approx(0.1597933633704608).epsilon(1e-15));
  REQUIRE(c.uniform() == Catch::Approx(0.9921452096298288).epsilon(1e-15));
  REQUIRE(c.uniform() == Catch::Approx(0.03956902584486566).epsilon(1e-15));
}

TEST_CASE("heisenberg structure constants")
{
  auto n3 = heisenberg_algebra();
  REQUIRE(n3->dim() == 3);
  // [X, Y] = Z, [X, Z] = [Y, Z] = 0 in the standard basis.
  Vec x = Vec::Unit(3, 0), y = Vec::Unit(3, 1), z = Vec::Unit(3, 2);
  REQUIRE((n3->bracket_coords(x, y) - z).norm() == 0.0);
  REQUIRE(n3->bracket_coords(x, z).norm() == 0.0);
  REQUIRE(n3->bracket_coords(y, z).norm() == 0.0);
}

TEST_CASE("jacobi identity holds on random samples", "[property]")
{
  Rng rng(7);
  auto algs = {heisenberg_algebra(), upper_triangular3_algebra(), abelian_algebra(3),
               strict_upper_algebra(4)};
  for (const auto & alg : algs) {
    for (int s = 0; s < 50; ++s) {
      Vec u = rng.coords(alg->dim()), v = rng.coords(alg->dim()), w = rng.coords(alg->dim());
      Vec jac = alg->bracket_coords(u, alg->bracket_coords(v, w))
                + alg->bracket_coords(v, alg->bracket_coords(w, u))
                + alg->bracket_coords(w, alg->bracket_coords(u, v));
      REQUIRE(jac.lpNorm<Eigen::Infinity>() < tol_exact);
    }
  }
}

TEST_CASE("exp and log are exact inverses on nilpotent algebras")
{
  Rng rng(11);
  auto n3 = heisenberg_algebra();
  LieGroup grp(n3);
  // Closed form: exp(aX + bY + cZ) has (0,1) entry a, (1,2) entry b and
  // (0,2) entry c + ab/2 (hand-computed from the terminating series).
  AlgebraElement u = n3->element(Vec(Eigen::Vector3d(2.0, 3.0, 5.0)));
  Mat g = grp.exp(u).m;
  REQUIRE(g(0, 1) == Catch::Approx(2.0).margin(tol_exact));
  REQUIRE(g(1, 2) == Catch::Approx(3.0).margin(tol_exact));
  REQUIRE(g(0, 2) == Catch::Approx(5.0 + 3.0).margin(tol_exact));

  for (int s = 0; s < 100; ++s) {
    AlgebraElement v = n3->random(rng, 2.0);
    AlgebraElement back = grp.log(grp.exp(v));
    REQUIRE(distance(v, back) < tol_exact);
  }
}

TEST_CASE("exp is a local homomorphism in an abelian algebra")
{
  Rng rng(13);
  auto ab = abelian_algebra(4);
  LieGroup grp(ab);
  for (int s = 0; s < 50; ++s) {
    AlgebraElement u = ab->random(rng), v = ab->random(rng);
    REQUIRE(distance(grp.exp(u) * grp.exp(v), grp.exp(u + v)) < tol_exact);
  }
}

TEST_CASE("general matrix exp/log round trip within the loose gate")
{
  Rng rng(17);
  auto b3 = upper_triangular3_algebra();
  LieGroup grp(b3);
  for (int s = 0; s < 100; ++s) {
    AlgebraElement v = b3->random(rng, 0.5);
    REQUIRE(distance(v, grp.log(grp.exp(v))) < tol_general);
  }
}

TEST_CASE("projection residual gate rejects matrices outside the span")
{
  auto n3 = heisenberg_algebra();
  Mat bad = Mat::Zero(3, 3);
  bad(1, 0) = 1.0; // lower triangular: not in the Heisenberg span
  REQUIRE_THROWS_AS(n3->project(bad), ProjectionError);
  // In-span matrices project exactly.
  Mat good = 2.0 * n3->basis()[0] - 0.5 * n3->basis()[2];
  Vec c = n3->project(good);
  REQUIRE(c[0] == Catch::Approx(2.0).margin(tol_exact));
  REQUIRE(c[1] == Catch::Approx(0.0).margin(tol_exact));
  REQUIRE(c[2] == Catch::Approx(-0.5).margin(tol_exact));
}

TEST_CASE("adjoint action matches matrix conjugation")
{
  Rng rng(19);
  auto b3 = upper_triangular3_algebra();
  LieGroup grp(b3);
  for (int s = 0; s < 25; ++s) {
    GroupElement g = grp.random(rng, 0.5);
    AlgebraElement u = b3->random(rng);
    Vec via_ad = grp.Ad(g) * u.coords;
    Vec direct = b3->project(g.m * u.matrix() * g.m.inverse());
    REQUIRE((via_ad - direct).lpNorm<Eigen::Infinity>() < tol_general);
  }
}

TEST_CASE("direct sums keep blockwise brackets")
{
  Rng rng(23);
  auto a = heisenberg_algebra();
  auto b = upper_triangular3_algebra();
  auto s = direct_sum(a, b);
  REQUIRE(s->dim() == a->dim() + b->dim());
  Vec u = rng.coords(s->dim()), v = rng.coords(s->dim());
  Vec w = s->bracket_coords(u, v);
  Vec wa = a->bracket_coords(u.head(a->dim()), v.head(a->dim()));
  Vec wb = b->bracket_coords(u.tail(b->dim()), v.tail(b->dim()));
  REQUIRE((w.head(a->dim()) - wa).lpNorm<Eigen::Infinity>() < tol_exact);
  REQUIRE((w.tail(b->dim()) - wb).lpNorm<Eigen::Infinity>() < tol_exact);
}
