#ifndef G3_CROSSED_HPP
#define G3_CROSSED_HPP

#include "algebras.hpp"

#include <optional>

/// \file crossed.hpp
/// 2-crossed modules of Lie groups (L -> H -> G with actions and a Peiffer
/// lifting) together with their differential counterparts, stock instances,
/// and axiom checkers that report per-axiom max residuals over random samples.

namespace g3
{

  /// A 2-crossed module of matrix Lie groups bundled with its differential
  /// (Lie algebra) counterpart.
  ///
  /// Group-level structure maps act on raw matrices; differential structure
  /// is stored as coordinate tensors against the algebra bases.  The two
  /// levels describe the same object, which the test-suite cross-validates.
  class TwoCrossedModule
  {
  public:
    std::string name;
    /// True when all three algebras are realized by nilpotent matrices, so
    /// group arithmetic is exact up to rounding (tight tolerance class).
    bool nilpotent_exact = false;

    std::shared_ptr<const LieGroup> G, H, L;

    // Group-level structure maps, acting on group matrices.
    std::function<Mat(const Mat &)> delta_grp;                ///< L -> H
    std::function<Mat(const Mat &)> alpha_grp;                ///< H -> G
    std::function<Mat(const Mat &, const Mat &)> act_grp_h;   ///< (g, e) -> g|>e
    std::function<Mat(const Mat &, const Mat &)> act_grp_l;   ///< (g, l) -> g|>l
    std::function<Mat(const Mat &, const Mat &)> peiffer_grp; ///< (e, f) -> {e,f}

    // Group action on algebra values (matrix realizations of h resp. l).
    std::function<Mat(const Mat &, const Mat &)> act_alg_h;
    std::function<Mat(const Mat &, const Mat &)> act_alg_l;

    // Differential structure in coordinates.
    Mat delta_lin;                ///< dim_h x dim_l
    Mat alpha_lin;                ///< dim_g x dim_h
    std::vector<Mat> act_lin_h;   ///< per g-basis element: dim_h x dim_h
    std::vector<Mat> act_lin_l;   ///< per g-basis element: dim_l x dim_l
    std::vector<Mat> peiffer_lin; ///< per h-basis element a: {Y_a, -}, dim_l x dim_h

    //--- group-level operations ------------------------------------------

    GroupElement delta(const GroupElement & l) const
    {
      return GroupElement{H.get(), delta_grp(l.m)};
    }

    GroupElement alpha(const GroupElement & e) const
    {
      return GroupElement{G.get(), alpha_grp(e.m)};
    }

    GroupElement act_h(const GroupElement & g, const GroupElement & e) const
    {
      return GroupElement{H.get(), act_grp_h(g.m, e.m)};
    }

    GroupElement act_l(const GroupElement & g, const GroupElement & l) const
    {
      return GroupElement{L.get(), act_grp_l(g.m, l.m)};
    }

    /// Peiffer lifting {e, f}.
    GroupElement peiffer(const GroupElement & e, const GroupElement & f) const
    {
      return GroupElement{L.get(), peiffer_grp(e.m, f.m)};
    }

    /// Peiffer commutator <e,f> = e f e^{-1} (alpha(e) |> f^{-1}).
    GroupElement peiffer_commutator(const GroupElement & e, const GroupElement & f) const
    {
      GroupElement af = act_h(alpha(e), inverse(f));
      return GroupElement{H.get(), e.m * f.m * e.m.inverse() * af.m};
    }

    /// Derived action of H on L: e |>' l = l {delta(l)^{-1}, e}.
    GroupElement rhd_prime(const GroupElement & e, const GroupElement & l) const
    {
      GroupElement dl_inv{H.get(), delta_grp(l.m).inverse()};
      return GroupElement{L.get(), l.m * peiffer_grp(dl_inv.m, e.m)};
    }

    //--- differential operations (coordinates) ----------------------------

    const LieAlgebra & g_alg() const { return G->algebra(); }
    const LieAlgebra & h_alg() const { return H->algebra(); }
    const LieAlgebra & l_alg() const { return L->algebra(); }

    Vec delta_diff(const Vec & x) const { return delta_lin * x; }
    Vec alpha_diff(const Vec & v) const { return alpha_lin * v; }

    /// x |> u for x in g (coords), u in h (coords).
    Vec act_diff_h(const Vec & x, const Vec & u) const
    {
      Vec out = Vec::Zero(h_alg().dim());
      for (Eigen::Index a = 0; a < x.size(); ++a) {
        if (x[a] != 0.0) out += x[a] * (act_lin_h[static_cast<std::size_t>(a)] * u);
      }
      return out;
    }

    /// x |> w for x in g (coords), w in l (coords).
    Vec act_diff_l(const Vec & x, const Vec & w) const
    {
      Vec out = Vec::Zero(l_alg().dim());
      for (Eigen::Index a = 0; a < x.size(); ++a) {
        if (x[a] != 0.0) out += x[a] * (act_lin_l[static_cast<std::size_t>(a)] * w);
      }
      return out;
    }

    /// Differential Peiffer lifting {u, v} for u, v in h (coords).
    Vec peiffer_diff(const Vec & u, const Vec & v) const
    {
      Vec out = Vec::Zero(l_alg().dim());
      for (Eigen::Index a = 0; a < u.size(); ++a) {
        if (u[a] != 0.0) out += u[a] * (peiffer_lin[static_cast<std::size_t>(a)] * v);
      }
      return out;
    }

    /// Differential Peiffer commutator <u,v> = [u,v] - alpha(u) |> v.
    Vec peiffer_commutator_diff(const Vec & u, const Vec & v) const
    {
      return h_alg().bracket_coords(u, v) - act_diff_h(alpha_lin * u, v);
    }

    /// Derived differential action of h on l: v |>' x = -{delta(x), v}.
    Vec rhd_prime_diff(const Vec & v, const Vec & x) const
    {
      return -peiffer_diff(delta_lin * x, v);
    }

    //--- constant gauge action in coordinates -----------------------------

    /// Matrix of g |> (-) acting on h-coordinates.
    Mat act_coords_h(const GroupElement & g) const
    {
      const LieAlgebra & h = h_alg();
      Mat out(h.dim(), h.dim());
      for (Eigen::Index a = 0; a < h.dim(); ++a) {
        out.col(a) = h.project(act_alg_h(g.m, h.basis()[a]));
      }
      return out;
    }

    /// Matrix of g |> (-) acting on l-coordinates.
    Mat act_coords_l(const GroupElement & g) const
    {
      const LieAlgebra & l = l_alg();
      Mat out(l.dim(), l.dim());
      for (Eigen::Index a = 0; a < l.dim(); ++a) {
        out.col(a) = l.project(act_alg_l(g.m, l.basis()[a]));
      }
      return out;
    }
  };

  //------------------------------------------------------------------------
  // Stock instances
  //------------------------------------------------------------------------

  namespace detail
  {
    inline std::function<Mat(const Mat &)> constant_identity_map(int size)
    {
      return [size](const Mat &) { return Mat::Identity(size, size); };
    }

    inline Mat trivial_act(const Mat &, const Mat & v) { return v; }
  } // namespace detail

  /// Abelian instance: three abelian groups, linear delta/alpha with
  /// alpha o delta = 0, trivial actions and trivial Peiffer lifting.
  inline TwoCrossedModule make_abelian(int n = 2)
  {
    TwoCrossedModule m;
    m.name = "abelian";
    m.nilpotent_exact = true;
    auto ga = abelian_algebra(n), ha = abelian_algebra(n), la = abelian_algebra(n);
    m.G = group_over(ga);
    m.H = group_over(ha);
    m.L = group_over(la);

    // delta keeps the first coordinate and kills the rest; alpha keeps the
    // last and kills the rest, so alpha o delta = 0 for n >= 2.
    Mat d = Mat::Zero(n, n), a = Mat::Zero(n, n);
    d(0, 0) = 1.0;
    a(n - 1, n - 1) = 1.0;
    m.delta_lin = d;
    m.alpha_lin = a;
    m.act_lin_h.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
    m.act_lin_l.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));
    m.peiffer_lin.assign(static_cast<std::size_t>(n), Mat::Zero(n, n));

    // Unipotent first-row groups: group multiplication adds coordinates, so
    // exp o (linear map) o log is a group homomorphism.
    auto linear_on_group = [](const std::shared_ptr<const LieAlgebra> & dom,
                              const std::shared_ptr<const LieAlgebra> & cod, Mat lin) {
      return [dom, cod, lin](const Mat & g) {
        Vec c = dom->project(matrix_log(g, dom->nilpotency()));
        return matrix_exp(cod->matrix_of(lin * c), cod->nilpotency());
      };
    };
    m.delta_grp = linear_on_group(la, ha, d);
    m.alpha_grp = linear_on_group(ha, ga, a);
    m.act_grp_h = detail::trivial_act;
    m.act_grp_l = detail::trivial_act;
    m.peiffer_grp = [la](const Mat &, const Mat &) {
      return Mat::Identity(la->matrix_size(), la->matrix_size());
    };
    m.act_alg_h = detail::trivial_act;
    m.act_alg_l = detail::trivial_act;
    return m;
  }

  /// Conjugation instance: G = H = invertible upper-triangular 3x3 matrices,
  /// alpha the identity, G acting on H by conjugation, trivial L.
  inline TwoCrossedModule make_conjugation()
  {
    TwoCrossedModule m;
    m.name = "conjugation";
    m.nilpotent_exact = false;
    auto ba = upper_triangular3_algebra();
    auto la = trivial_algebra();
    auto upper_invertible = [](const Mat & g) {
      return g.isUpperTriangular(1e-12) && std::abs(g.determinant()) > 1e-12;
    };
    m.G = std::make_shared<LieGroup>(ba, upper_invertible);
    m.H = std::make_shared<LieGroup>(ba, upper_invertible);
    m.L = group_over(la);

    const Eigen::Index dh = ba->dim();
    m.delta_grp = detail::constant_identity_map(3);
    m.alpha_grp = [](const Mat & e) { return e; };
    m.act_grp_h = [](const Mat & g, const Mat & e) { return Mat(g * e * g.inverse()); };
    m.act_grp_l = detail::trivial_act;
    m.peiffer_grp = [](const Mat &, const Mat &) { return Mat::Identity(1, 1); };
    m.act_alg_h = [](const Mat & g, const Mat & u) { return Mat(g * u * g.inverse()); };
    m.act_alg_l = detail::trivial_act;

    m.delta_lin = Mat::Zero(dh, 0);
    m.alpha_lin = Mat::Identity(dh, dh);
    m.act_lin_h.clear();
    m.act_lin_l.clear();
    for (Eigen::Index a = 0; a < dh; ++a) {
      m.act_lin_h.push_back(ba->ad(Vec::Unit(dh, a)));
      m.act_lin_l.push_back(Mat::Zero(0, 0));
    }
    m.peiffer_lin.assign(static_cast<std::size_t>(dh), Mat::Zero(0, dh));
    return m;
  }

  /// Commutator instance: trivial G, H = L the Heisenberg group, delta the
  /// identity and {e, f} = e f e^{-1} f^{-1}.
  inline TwoCrossedModule make_commutator()
  {
    TwoCrossedModule m;
    m.name = "commutator";
    m.nilpotent_exact = true;
    auto ga = trivial_algebra();
    auto ha = heisenberg_algebra();
    m.G = group_over(ga);
    m.H = group_over(ha);
    m.L = group_over(ha);

    const Eigen::Index dh = ha->dim();
    m.delta_grp = [](const Mat & l) { return l; };
    m.alpha_grp = [](const Mat &) { return Mat::Identity(1, 1); };
    m.act_grp_h = detail::trivial_act;
    m.act_grp_l = detail::trivial_act;
    m.peiffer_grp = [](const Mat & e, const Mat & f) {
      return Mat(e * f * e.inverse() * f.inverse());
    };
    m.act_alg_h = detail::trivial_act;
    m.act_alg_l = detail::trivial_act;

    m.delta_lin = Mat::Identity(dh, dh);
    m.alpha_lin = Mat::Zero(0, dh);
    m.act_lin_h.clear();
    m.act_lin_l.clear();
    m.peiffer_lin.clear();
    for (Eigen::Index a = 0; a < dh; ++a) {
      m.peiffer_lin.push_back(ha->ad(Vec::Unit(dh, a)));
    }
    return m;
  }

  /// Block-diagonal product of two instances, componentwise structure.
  inline TwoCrossedModule make_product(const TwoCrossedModule & A, const TwoCrossedModule & B)
  {
    TwoCrossedModule m;
    m.name = A.name + "*" + B.name;
    m.nilpotent_exact = A.nilpotent_exact && B.nilpotent_exact;
    m.G = group_over(direct_sum(A.G->algebra_ptr(), B.G->algebra_ptr()));
    m.H = group_over(direct_sum(A.H->algebra_ptr(), B.H->algebra_ptr()));
    m.L = group_over(direct_sum(A.L->algebra_ptr(), B.L->algebra_ptr()));

    const int gA = A.G->matrix_size(), hA = A.H->matrix_size(), lA = A.L->matrix_size();
    auto blockwise1 = [](auto fa, auto fb, int na) {
      return [fa, fb, na](const Mat & x) {
        return block_diag(fa(block_a(x, na)), fb(x.bottomRightCorner(x.rows() - na, x.cols() - na)));
      };
    };
    auto blockwise2 = [](auto fa, auto fb, int na, int nb) {
      return [fa, fb, na, nb](const Mat & x, const Mat & y) {
        return block_diag(fa(block_a(x, na), block_a(y, nb)),
                          fb(x.bottomRightCorner(x.rows() - na, x.cols() - na),
                             y.bottomRightCorner(y.rows() - nb, y.cols() - nb)));
      };
    };
    m.delta_grp = blockwise1(A.delta_grp, B.delta_grp, lA);
    m.alpha_grp = blockwise1(A.alpha_grp, B.alpha_grp, hA);
    m.act_grp_h = blockwise2(A.act_grp_h, B.act_grp_h, gA, hA);
    m.act_grp_l = blockwise2(A.act_grp_l, B.act_grp_l, gA, lA);
    m.peiffer_grp = blockwise2(A.peiffer_grp, B.peiffer_grp, hA, hA);
    m.act_alg_h = blockwise2(A.act_alg_h, B.act_alg_h, gA, hA);
    m.act_alg_l = blockwise2(A.act_alg_l, B.act_alg_l, gA, lA);

    const Eigen::Index dgA = A.g_alg().dim(), dgB = B.g_alg().dim();
    const Eigen::Index dhA = A.h_alg().dim(), dhB = B.h_alg().dim();
    const Eigen::Index dlA = A.l_alg().dim(), dlB = B.l_alg().dim();
    auto embed = [](const Mat & a, const Mat & b) { return block_diag(a, b); };
    m.delta_lin = embed(A.delta_lin, B.delta_lin);
    m.alpha_lin = embed(A.alpha_lin, B.alpha_lin);
    for (Eigen::Index a = 0; a < dgA; ++a) {
      m.act_lin_h.push_back(embed(A.act_lin_h[static_cast<std::size_t>(a)], Mat::Zero(dhB, dhB)));
      m.act_lin_l.push_back(embed(A.act_lin_l[static_cast<std::size_t>(a)], Mat::Zero(dlB, dlB)));
    }
    for (Eigen::Index a = 0; a < dgB; ++a) {
      m.act_lin_h.push_back(embed(Mat::Zero(dhA, dhA), B.act_lin_h[static_cast<std::size_t>(a)]));
      m.act_lin_l.push_back(embed(Mat::Zero(dlA, dlA), B.act_lin_l[static_cast<std::size_t>(a)]));
    }
    for (Eigen::Index a = 0; a < dhA; ++a) {
      Mat p = Mat::Zero(dlA + dlB, dhA + dhB);
      p.topLeftCorner(dlA, dhA) = A.peiffer_lin[static_cast<std::size_t>(a)];
      m.peiffer_lin.push_back(p);
    }
    for (Eigen::Index a = 0; a < dhB; ++a) {
      Mat p = Mat::Zero(dlA + dlB, dhA + dhB);
      p.bottomRightCorner(dlB, dhB) = B.peiffer_lin[static_cast<std::size_t>(a)];
      m.peiffer_lin.push_back(p);
    }
    return m;
  }

  /// Make an instance by name: abelian | conjugation | commutator | product.
  inline TwoCrossedModule make_instance(const std::string & name)
  {
    if (name == "abelian") return make_abelian();
    if (name == "conjugation") return make_conjugation();
    if (name == "commutator") return make_commutator();
    if (name == "product") return make_product(make_commutator(), make_conjugation());
    throw ConfigError("unknown instance '" + name + "'");
  }

  //------------------------------------------------------------------------
  // Axiom checks
  //------------------------------------------------------------------------

  /// Residual of one axiom across all samples.
  struct AxiomResult
  {
    std::string name;
    double max_residual = 0.0;

    void update(double r) { max_residual = std::max(max_residual, r); }
  };

  /// Per-axiom residual report.
  struct AxiomReport
  {
    std::string instance;
    std::string level; ///< "group" or "differential"
    int samples = 0;
    std::vector<AxiomResult> results;

    double max_residual() const
    {
      double r = 0.0;
      for (const auto & a : results) r = std::max(r, a.max_residual);
      return r;
    }

    bool pass(double tol) const { return max_residual() <= tol; }
  };

  namespace detail
  {
    inline void record(AxiomReport & rep, std::size_t idx, double residual)
    {
      rep.results[idx].max_residual = std::max(rep.results[idx].max_residual, residual);
    }
  } // namespace detail

  /// Check the group-level axioms on random samples.
  inline AxiomReport check_group_axioms(const TwoCrossedModule & m, int samples, Rng & rng,
                                        double scale = 0.5)
  {
    AxiomReport rep;
    rep.instance = m.name;
    rep.level = "group";
    rep.samples = samples;
    const char * names[] = {
        "complex-alpha-delta-trivial",   "delta-equivariant",
        "alpha-equivariant",             "peiffer-delta-matches-commutator",
        "peiffer-on-delta-pairs",        "peiffer-left-multiplicativity",
        "peiffer-right-multiplicativity","peiffer-delta-symmetrization",
        "peiffer-g-equivariance",        "action-h-automorphism",
        "action-l-automorphism",         "action-h-composition",
        "action-l-composition",          "derived-action-units",
        "derived-action-multiplicative"};
    for (const char * n : names) rep.results.push_back({n, 0.0});

    for (int s = 0; s < samples; ++s) {
      GroupElement g = m.G->random(rng, scale), g2 = m.G->random(rng, scale);
      GroupElement e = m.H->random(rng, scale), f = m.H->random(rng, scale),
                   h = m.H->random(rng, scale);
      GroupElement l = m.L->random(rng, scale), k = m.L->random(rng, scale);

      // (1) complex: alpha(delta(l)) = 1 and actions are intertwined.
      detail::record(rep, 0, deviation_from_identity(m.alpha(m.delta(l))));
      detail::record(rep, 1, distance(m.delta(m.act_l(g, l)), m.act_h(g, m.delta(l))));
      detail::record(rep, 2, distance(m.alpha(m.act_h(g, e)), conj(g, m.alpha(e))));
      // (2) delta{e,f} = <e,f>.
      detail::record(rep, 3, distance(m.delta(m.peiffer(e, f)), m.peiffer_commutator(e, f)));
      // (3) {delta l, delta k} = l k l^{-1} k^{-1}.
      GroupElement lk{m.L.get(), Mat(l.m * k.m * l.m.inverse() * k.m.inverse())};
      detail::record(rep, 4, distance(m.peiffer(m.delta(l), m.delta(k)), lk));
      // (4) {ef, h} = {e, f h f^{-1}} (alpha(e) |> {f, h}).
      GroupElement lhs4 = m.peiffer(GroupElement{m.H.get(), Mat(e.m * f.m)}, h);
      GroupElement rhs4{m.L.get(),
                        Mat(m.peiffer(e, conj(f, h)).m * m.act_l(m.alpha(e), m.peiffer(f, h)).m)};
      detail::record(rep, 5, distance(lhs4, rhs4));
      // (5) {e, fh} = {e,f}{e,h}{<e,h>^{-1}, alpha(e) |> f}.
      GroupElement lhs5 = m.peiffer(e, GroupElement{m.H.get(), Mat(f.m * h.m)});
      GroupElement peh_inv{m.H.get(), Mat(m.peiffer_commutator(e, h).m.inverse())};
      GroupElement rhs5{m.L.get(), Mat(m.peiffer(e, f).m * m.peiffer(e, h).m
                                       * m.peiffer(peh_inv, m.act_h(m.alpha(e), f)).m)};
      detail::record(rep, 6, distance(lhs5, rhs5));
      // (6) {delta(l), e} {e, delta(l)} = l (alpha(e) |> l^{-1}).
      GroupElement lhs6{m.L.get(), Mat(m.peiffer(m.delta(l), e).m * m.peiffer(e, m.delta(l)).m)};
      GroupElement rhs6{m.L.get(), Mat(l.m * m.act_l(m.alpha(e), inverse(l)).m)};
      detail::record(rep, 7, distance(lhs6, rhs6));
      // G-equivariance of the Peiffer lifting.
      detail::record(rep, 8, distance(m.act_l(g, m.peiffer(e, f)),
                                      m.peiffer(m.act_h(g, e), m.act_h(g, f))));
      // Actions by automorphisms, compatible with group multiplication.
      detail::record(rep, 9, distance(m.act_h(g, GroupElement{m.H.get(), Mat(e.m * f.m)}),
                                      GroupElement{m.H.get(),
                                                   Mat(m.act_h(g, e).m * m.act_h(g, f).m)}));
      detail::record(rep, 10, distance(m.act_l(g, GroupElement{m.L.get(), Mat(l.m * k.m)}),
                                       GroupElement{m.L.get(),
                                                    Mat(m.act_l(g, l).m * m.act_l(g, k).m)}));
      detail::record(rep, 11, distance(m.act_h(GroupElement{m.G.get(), Mat(g.m * g2.m)}, e),
                                       m.act_h(g, m.act_h(g2, e))));
      detail::record(rep, 12, distance(m.act_l(GroupElement{m.G.get(), Mat(g.m * g2.m)}, l),
                                       m.act_l(g, m.act_l(g2, l))));
      // Derived action: units {1,e} = {e,1} = 1 and multiplicativity in l.
      double u1 = deviation_from_identity(m.peiffer(m.H->identity(), e));
      double u2 = deviation_from_identity(m.peiffer(e, m.H->identity()));
      detail::record(rep, 13, std::max(u1, u2));
      GroupElement lk2{m.L.get(), Mat(l.m * k.m)};
      detail::record(rep, 14, distance(m.rhd_prime(e, lk2),
                                       GroupElement{m.L.get(),
                                                    Mat(m.rhd_prime(e, l).m * m.rhd_prime(e, k).m)}));
    }
    return rep;
  }

  /// Check the differential-level axioms on random samples.
  inline AxiomReport check_differential_axioms(const TwoCrossedModule & m, int samples, Rng & rng,
                                               double scale = 1.0)
  {
    AxiomReport rep;
    rep.instance = m.name;
    rep.level = "differential";
    rep.samples = samples;
    const char * names[] = {
        "complex-alpha-delta-zero",      "delta-equivariant",
        "alpha-equivariant",             "peiffer-delta-matches-commutator",
        "peiffer-on-delta-pairs",        "peiffer-bracket-left",
        "peiffer-bracket-right",         "peiffer-delta-symmetrization",
        "peiffer-g-equivariance",        "action-derivation-h",
        "action-derivation-l",           "action-is-lie-hom-h",
        "action-is-lie-hom-l",           "derived-action-crossed-module"};
    for (const char * n : names) rep.results.push_back({n, 0.0});

    const LieAlgebra & ha = m.h_alg();
    const LieAlgebra & la = m.l_alg();
    const LieAlgebra & ga = m.g_alg();

    for (int s = 0; s < samples; ++s) {
      Vec xg = rng.coords(ga.dim(), scale), yg = rng.coords(ga.dim(), scale);
      Vec u = rng.coords(ha.dim(), scale), v = rng.coords(ha.dim(), scale),
          w = rng.coords(ha.dim(), scale);
      Vec x = rng.coords(la.dim(), scale), y = rng.coords(la.dim(), scale);
      auto nrm = [](const Vec & z) { return z.size() ? z.lpNorm<Eigen::Infinity>() : 0.0; };

      // (1) complex of g-modules.
      detail::record(rep, 0, nrm(m.alpha_lin * (m.delta_lin * x)));
      detail::record(rep, 1, nrm(m.delta_lin * m.act_diff_l(xg, x) - m.act_diff_h(xg, m.delta_lin * x)));
      detail::record(rep, 2, nrm(m.alpha_diff(m.act_diff_h(xg, u))
                                 - ga.bracket_coords(xg, m.alpha_diff(u))));
      // (2) delta{u,v} = [u,v] - alpha(u) |> v.
      detail::record(rep, 3, nrm(m.delta_lin * m.peiffer_diff(u, v) - m.peiffer_commutator_diff(u, v)));
      // (3) {delta x, delta y} = [x, y].
      detail::record(rep, 4, nrm(m.peiffer_diff(m.delta_lin * x, m.delta_lin * y)
                                 - la.bracket_coords(x, y)));
      // (4) {[u,v], w} = alpha(u)|>{v,w} + {u,[v,w]} - alpha(v)|>{u,w} - {v,[u,w]}.
      Vec lhs4 = m.peiffer_diff(ha.bracket_coords(u, v), w);
      Vec rhs4 = m.act_diff_l(m.alpha_diff(u), m.peiffer_diff(v, w))
                 + m.peiffer_diff(u, ha.bracket_coords(v, w))
                 - m.act_diff_l(m.alpha_diff(v), m.peiffer_diff(u, w))
                 - m.peiffer_diff(v, ha.bracket_coords(u, w));
      detail::record(rep, 5, nrm(lhs4 - rhs4));
      // (5) {u, [v,w]} = {delta{u,v}, w} - {delta{u,w}, v}.
      Vec lhs5 = m.peiffer_diff(u, ha.bracket_coords(v, w));
      Vec rhs5 = m.peiffer_diff(m.delta_lin * m.peiffer_diff(u, v), w)
                 - m.peiffer_diff(m.delta_lin * m.peiffer_diff(u, w), v);
      detail::record(rep, 6, nrm(lhs5 - rhs5));
      // (6) {delta x, v} + {v, delta x} = -alpha(v) |> x.
      detail::record(rep, 7, nrm(m.peiffer_diff(m.delta_lin * x, v)
                                 + m.peiffer_diff(v, m.delta_lin * x)
                                 + m.act_diff_l(m.alpha_diff(v), x)));
      // G-equivariance of the Peiffer lifting.
      detail::record(rep, 8, nrm(m.act_diff_l(xg, m.peiffer_diff(u, v))
                                 - m.peiffer_diff(m.act_diff_h(xg, u), v)
                                 - m.peiffer_diff(u, m.act_diff_h(xg, v))));
      // Actions by derivations of the brackets.
      detail::record(rep, 9, nrm(m.act_diff_h(xg, ha.bracket_coords(u, v))
                                 - ha.bracket_coords(m.act_diff_h(xg, u), v)
                                 - ha.bracket_coords(u, m.act_diff_h(xg, v))));
      detail::record(rep, 10, nrm(m.act_diff_l(xg, la.bracket_coords(x, y))
                                  - la.bracket_coords(m.act_diff_l(xg, x), y)
                                  - la.bracket_coords(x, m.act_diff_l(xg, y))));
      // Actions are Lie algebra homomorphisms g -> Der.
      detail::record(rep, 11, nrm(m.act_diff_h(ga.bracket_coords(xg, yg), u)
                                  - m.act_diff_h(xg, m.act_diff_h(yg, u))
                                  + m.act_diff_h(yg, m.act_diff_h(xg, u))));
      detail::record(rep, 12, nrm(m.act_diff_l(ga.bracket_coords(xg, yg), x)
                                  - m.act_diff_l(xg, m.act_diff_l(yg, x))
                                  + m.act_diff_l(yg, m.act_diff_l(xg, x))));
      // Derived action v |>' x = -{delta x, v} makes delta a crossed module:
      // delta(v |>' x) = [v, delta x] and delta(x) |>' y = [x, y].
      double r1 = nrm(m.delta_lin * m.rhd_prime_diff(v, x)
                      - ha.bracket_coords(v, m.delta_lin * x));
      double r2 = nrm(m.rhd_prime_diff(m.delta_lin * x, y) - la.bracket_coords(x, y));
      detail::record(rep, 13, std::max(r1, r2));
    }
    return rep;
  }

} // namespace g3

#endif
