#ifndef G3_IDENTITIES_HPP
#define G3_IDENTITIES_HPP

#include "forms.hpp"

/// \file identities.hpp
/// Catalog of graded wedge/derivative identities relating the pairings of a
/// 2-crossed module on Lie-algebra-valued forms.  Every identity is checked
/// with exact polynomial coefficient arithmetic on random forms, so the
/// reported residual is pure rounding noise when the identity holds.

namespace g3
{

  /// One identity: name plus a residual functional on random data.
  struct FormIdentity
  {
    std::string name;
    /// Returns the max coefficient residual of LHS - RHS for one random draw.
    std::function<double(const FormContext &, Rng &, int /*n_vars*/)> residual;
  };

  namespace detail
  {
    inline double sgn(int e) { return (e % 2 == 0) ? 1.0 : -1.0; }
  } // namespace detail

  /// Build the full identity catalog for one module instance.
  inline std::vector<FormIdentity> form_identity_catalog()
  {
    using C = const FormContext &;
    std::vector<FormIdentity> cat;

    // alpha(P') wedge-act P = P' wedge-bracket P - P' wedge-peiffer-commutator P.
    cat.push_back({"act-splits-bracket-peiffer", [](C ctx, Rng & rng, int n) {
      int k1 = 1 + static_cast<int>(rng.index(2)), k2 = 1 + static_cast<int>(rng.index(2));
      Form p1 = Form::random(ctx.h_space(), n, k1, rng);
      Form p2 = Form::random(ctx.h_space(), n, k2, rng);
      Form lhs = p1.push(ctx.module().alpha_lin, ctx.g_space()).wedge(p2, ctx.act_h());
      Form rhs = p1.wedge(p2, ctx.bracket_h()) - p1.wedge(p2, ctx.peiffer_commutator());
      return max_coeff_distance(lhs, rhs);
    }});

    // -alpha(P) wedge-act psi = P wedge-peiffer delta(psi) + (-1)^{ks} delta(psi) wedge-peiffer P.
    cat.push_back({"act-alpha-delta-pairing", [](C ctx, Rng & rng, int n) {
      int k = 1 + static_cast<int>(rng.index(2)), s = 2;
      Form p = Form::random(ctx.h_space(), n, k, rng);
      Form psi = Form::random(ctx.l_space(), n, s, rng);
      Form dpsi = psi.push(ctx.module().delta_lin, ctx.h_space());
      Form lhs = -1.0 * p.push(ctx.module().alpha_lin, ctx.g_space()).wedge(psi, ctx.act_l());
      Form rhs = p.wedge(dpsi, ctx.peiffer())
                 + detail::sgn(k * s) * dpsi.wedge(p, ctx.peiffer());
      return max_coeff_distance(lhs, rhs);
    }});

    // delta(psi) wedge-peiffer P = -(-1)^{ks} P wedge-derived-action psi.
    cat.push_back({"delta-pairing-derived-action", [](C ctx, Rng & rng, int n) {
      int k = 1 + static_cast<int>(rng.index(2)), s = 2;
      Form p = Form::random(ctx.h_space(), n, k, rng);
      Form psi = Form::random(ctx.l_space(), n, s, rng);
      Form lhs = psi.push(ctx.module().delta_lin, ctx.h_space()).wedge(p, ctx.peiffer());
      Form rhs = -detail::sgn(k * s) * p.wedge(psi, ctx.rhd_prime());
      return max_coeff_distance(lhs, rhs);
    }});

    // P wedge-peiffer (F ^ F) = (P wedge-peiffer-commutator F) wedge-peiffer F, F degree 1.
    cat.push_back({"pairing-square-right", [](C ctx, Rng & rng, int n) {
      int k = 1 + static_cast<int>(rng.index(2));
      Form p = Form::random(ctx.h_space(), n, k, rng);
      Form f = Form::random(ctx.h_space(), n, 1, rng);
      Form ff = 0.5 * f.wedge(f, ctx.bracket_h()); // F ^ F for a 1-form
      Form lhs = p.wedge(ff, ctx.peiffer());
      Form rhs = p.wedge(f, ctx.peiffer_commutator()).wedge(f, ctx.peiffer());
      return max_coeff_distance(lhs, rhs);
    }});

    // (F ^ F) wedge-peiffer P = F wedge-peiffer (F wedge-bracket P)
    //                           + alpha(F) wedge-act (F wedge-peiffer P).
    cat.push_back({"square-pairing-left", [](C ctx, Rng & rng, int n) {
      int k = 1 + static_cast<int>(rng.index(2));
      Form p = Form::random(ctx.h_space(), n, k, rng);
      Form f = Form::random(ctx.h_space(), n, 1, rng);
      Form ff = 0.5 * f.wedge(f, ctx.bracket_h());
      Form lhs = ff.wedge(p, ctx.peiffer());
      Form rhs = f.wedge(f.wedge(p, ctx.bracket_h()), ctx.peiffer())
                 + f.push(ctx.module().alpha_lin, ctx.g_space())
                       .wedge(f.wedge(p, ctx.peiffer()), ctx.act_l());
      return max_coeff_distance(lhs, rhs);
    }});

    // delta(K wedge-act psi) = K wedge-act delta(psi).
    cat.push_back({"delta-intertwines-action", [](C ctx, Rng & rng, int n) {
      int t = 1 + static_cast<int>(rng.index(2)), s = 2;
      Form k = Form::random(ctx.g_space(), n, t, rng);
      Form psi = Form::random(ctx.l_space(), n, s, rng);
      Form lhs = k.wedge(psi, ctx.act_l()).push(ctx.module().delta_lin, ctx.h_space());
      Form rhs = k.wedge(psi.push(ctx.module().delta_lin, ctx.h_space()), ctx.act_h());
      return max_coeff_distance(lhs, rhs);
    }});

    // K wedge-adjoint M = K ^ M - (-1)^{ts} M ^ K (both matrix products,
    // re-expressed in the algebra through the closure gate).
    cat.push_back({"action-vs-two-products", [](C ctx, Rng & rng, int n) {
      int t = 1 + static_cast<int>(rng.index(2)), s = 1 + static_cast<int>(rng.index(2));
      Form k = Form::random(ctx.g_space(), n, t, rng);
      Form m = Form::random(ctx.g_space(), n, s, rng);
      Pairing prod = ctx.product(ctx.g_space(), ctx.g_space());
      Form lhs = k.wedge(m, ctx.bracket_g());
      Form rhs = (k.wedge(m, prod) - detail::sgn(t * s) * m.wedge(k, prod))
                     .reexpress(ctx.g_space());
      return max_coeff_distance(lhs, rhs);
    }});

    // d(K wedge-act psi) = dK wedge-act psi + (-1)^t K wedge-act d(psi).
    cat.push_back({"leibniz-action", [](C ctx, Rng & rng, int n) {
      int t = 1, s = 1 + static_cast<int>(rng.index(2));
      Form k = Form::random(ctx.g_space(), n, t, rng);
      Form psi = Form::random(ctx.l_space(), n, s, rng);
      Form lhs = k.wedge(psi, ctx.act_l()).d();
      Form rhs = k.d().wedge(psi, ctx.act_l()) + detail::sgn(t) * k.wedge(psi.d(), ctx.act_l());
      return max_coeff_distance(lhs, rhs);
    }});

    // d(P1 wedge-peiffer P2) = dP1 wedge-peiffer P2 + (-1)^{k1} P1 wedge-peiffer dP2.
    cat.push_back({"leibniz-pairing", [](C ctx, Rng & rng, int n) {
      int k1 = 1 + static_cast<int>(rng.index(2)), k2 = 1;
      Form p1 = Form::random(ctx.h_space(), n, k1, rng);
      Form p2 = Form::random(ctx.h_space(), n, k2, rng);
      Form lhs = p1.wedge(p2, ctx.peiffer()).d();
      Form rhs = p1.d().wedge(p2, ctx.peiffer())
                 + detail::sgn(k1) * p1.wedge(p2.d(), ctx.peiffer());
      return max_coeff_distance(lhs, rhs);
    }});

    // K wedge-act (P1 wedge-peiffer P2)
    //   = (K wedge-act P1) wedge-peiffer P2 + (-1)^{t k1} P1 wedge-peiffer (K wedge-act P2).
    cat.push_back({"action-derivation-pairing", [](C ctx, Rng & rng, int n) {
      int t = 1, k1 = 1 + static_cast<int>(rng.index(2)), k2 = 1;
      Form k = Form::random(ctx.g_space(), n, t, rng);
      Form p1 = Form::random(ctx.h_space(), n, k1, rng);
      Form p2 = Form::random(ctx.h_space(), n, k2, rng);
      Form lhs = k.wedge(p1.wedge(p2, ctx.peiffer()), ctx.act_l());
      Form rhs = k.wedge(p1, ctx.act_h()).wedge(p2, ctx.peiffer())
                 + detail::sgn(t * k1) * p1.wedge(k.wedge(p2, ctx.act_h()), ctx.peiffer());
      return max_coeff_distance(lhs, rhs);
    }});

    // d(K ^ M) = dK ^ M + (-1)^t K ^ dM in the enveloping span.
    cat.push_back({"leibniz-product", [](C ctx, Rng & rng, int n) {
      int t = 1 + static_cast<int>(rng.index(2)), s = 1;
      Form k = Form::random(ctx.g_space(), n, t, rng);
      Form m = Form::random(ctx.g_space(), n, s, rng);
      Pairing prod = ctx.product(ctx.g_space(), ctx.g_space());
      Form lhs = k.wedge(m, prod).d();
      Form rhs = k.d().wedge(m, prod) + detail::sgn(t) * k.wedge(m.d(), prod);
      return max_coeff_distance(lhs, rhs);
    }});

    // K wedge-act (M wedge-act psi) + M wedge-act (K wedge-act psi)
    //   = (K ^ M + M ^ K) wedge-composed-act psi  (K, M 1-forms, psi 2-form).
    cat.push_back({"symmetrized-nested-action", [](C ctx, Rng & rng, int n) {
      Form k = Form::random(ctx.g_space(), n, 1, rng);
      Form m = Form::random(ctx.g_space(), n, 1, rng);
      Form psi = Form::random(ctx.h_space(), n, 2, rng);
      Pairing act = ctx.act_h();
      Form lhs = k.wedge(m.wedge(psi, act), act) + m.wedge(k.wedge(psi, act), act);
      // For 1-forms the symmetrized product wedge collapses to the bracket
      // wedge, so the right-hand side acts through the bracket value.
      Form rhs = k.wedge(m, ctx.bracket_g()).wedge(psi, act);
      return max_coeff_distance(lhs, rhs);
    }});

    // delta(psi) wedge-peiffer delta(psi) = 0 for a 2-form psi.
    cat.push_back({"delta-image-pairing-vanishes", [](C ctx, Rng & rng, int n) {
      Form psi = Form::random(ctx.l_space(), n, 2, rng);
      Form dpsi = psi.push(ctx.module().delta_lin, ctx.h_space());
      return dpsi.wedge(dpsi, ctx.peiffer()).max_abs_coeff();
    }});

    // (P ^ P) wedge-bracket P = 0 for a 1-form P (computed in the span).
    cat.push_back({"triple-wedge-bracket-vanishes", [](C ctx, Rng & rng, int n) {
      Form p = Form::random(ctx.h_space(), n, 1, rng);
      Pairing prod = ctx.product(ctx.h_space(), ctx.h_space());
      Form pp = p.wedge(p, prod);
      // Commutator pairing from the product span into its own bracket span.
      std::vector<Mat> gens;
      for (const Mat & s : prod.result->basis()) {
        for (const Mat & y : ctx.h_space()->basis()) gens.push_back(s * y - y * s);
      }
      auto span2 = ValueSpace::span_of("bracket-span", ctx.h_space()->matrix_size(), gens);
      Pairing br = detail::tabulate("span-bracket", prod.result, ctx.h_space(), span2,
                                    [&](Eigen::Index a, Eigen::Index b) {
                                      const Mat & s = prod.result->basis()[static_cast<std::size_t>(a)];
                                      const Mat & y = ctx.h_space()->basis()[static_cast<std::size_t>(b)];
                                      return span2->project(s * y - y * s);
                                    });
      return pp.wedge(p, br).max_abs_coeff();
    }});

    // (g|>P1) wedge-peiffer (g|>P2) = g |> (P1 wedge-peiffer P2), constant g.
    cat.push_back({"constant-gauge-pairing-equivariance", [](C ctx, Rng & rng, int n) {
      Form p1 = Form::random(ctx.h_space(), n, 2, rng);
      Form p2 = Form::random(ctx.h_space(), n, 1, rng);
      GroupElement g = ctx.module().G->random(rng, 0.5);
      Mat ah = ctx.module().act_coords_h(g), al = ctx.module().act_coords_l(g);
      Form lhs = p1.act(ah).wedge(p2.act(ah), ctx.peiffer());
      Form rhs = p1.wedge(p2, ctx.peiffer()).act(al);
      return max_coeff_distance(lhs, rhs);
    }});

    // (Ad_g K) wedge-act (g|>U) = g |> (K wedge-act U), constant g.
    cat.push_back({"constant-gauge-action-equivariance", [](C ctx, Rng & rng, int n) {
      Form k = Form::random(ctx.g_space(), n, 1, rng);
      Form u = Form::random(ctx.h_space(), n, 2, rng);
      GroupElement g = ctx.module().G->random(rng, 0.5);
      Mat ad = ctx.module().G->Ad(g), ah = ctx.module().act_coords_h(g);
      Form lhs = k.act(ad).wedge(u.act(ah), ctx.act_h());
      Form rhs = k.wedge(u, ctx.act_h()).act(ah);
      return max_coeff_distance(lhs, rhs);
    }});

    // (alpha(P) ^ A + A ^ alpha(P)) wedge-act P
    //   = (A wedge-act P) ^ P - P ^ (A wedge-act P) - (A wedge-act P) wedge-pc P,
    // with A a g-valued 1-form and P an h-valued 2-form.
    cat.push_back({"anchored-product-action-expansion", [](C ctx, Rng & rng, int n) {
      Form a = Form::random(ctx.g_space(), n, 1, rng);
      Form p = Form::random(ctx.h_space(), n, 2, rng);
      Form ap = p.push(ctx.module().alpha_lin, ctx.g_space());
      Form lhs = acted_product_wedge(ap, a, p, ctx.act_h())
                 + acted_product_wedge(a, ap, p, ctx.act_h());
      Form th = a.wedge(p, ctx.act_h()); // 3-form, h-valued
      Pairing prod = ctx.product(ctx.h_space(), ctx.h_space());
      Form comm = (th.wedge(p, prod) - p.wedge(th, prod)).reexpress(ctx.h_space());
      Form rhs = comm - th.wedge(p, ctx.peiffer_commutator());
      return max_coeff_distance(lhs, rhs);
    }});

    return cat;
  }

  /// Run one identity `samples` times; returns the max residual seen.
  inline double run_form_identity(const FormContext & ctx, const FormIdentity & ident,
                                  int samples, Rng & rng, int n_vars = 4)
  {
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
      worst = std::max(worst, ident.residual(ctx, rng, n_vars));
    }
    return worst;
  }

} // namespace g3

#endif
