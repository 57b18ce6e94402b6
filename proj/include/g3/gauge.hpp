#pragma once

#include <array>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "g3/forms.hpp"

namespace g3
{
  /// Raised when a requested connection cannot satisfy its constraints on the
  /// given module instance (e.g. no C with delta(C) matching dB exists).
  struct Unsolvable : Error
  {
    using Error::Error;
  };

  /// A triple of algebra-valued polynomial forms of degrees 1, 2, 3.
  struct ThreeConnection
  {
    Form A; ///< degree-1, g-valued
    Form B; ///< degree-2, h-valued
    Form C; ///< degree-3, l-valued
  };

  /// The three curvature forms of a connection, of degrees 2, 3, 4.
  struct CurvatureTriple
  {
    Form omega1;
    Form omega2;
    Form omega3;
  };

  /// Gauge data: a constant group element (or identity), an h-valued 1-form
  /// and an l-valued 2-form.  Position-dependent gauges live on the numeric
  /// backend below.
  struct GaugeData
  {
    GroupElement g;
    Form phi;
    Form psi;
  };

  /// Exterior derivative, with forms above the top degree taken to be zero.
  inline Form d_or_zero(const Form & f)
  {
    if (f.degree() >= f.n_vars()) return Form(f.space(), f.n_vars(), f.degree() + 1);
    return f.d();
  }

  inline Form zero_form(const FormContext & ctx, const std::shared_ptr<const ValueSpace> & space,
                        int n_vars, int degree)
  {
    (void)ctx;
    return Form(space, n_vars, degree);
  }

  /// Curvatures: Omega1 = dA + A^A, Omega2 = dB + A wedge-act B,
  /// Omega3 = dC + A wedge-act C + B wedge-pairing B.  For a g-valued 1-form
  /// A^A equals half the bracket wedge.
  inline CurvatureTriple curvatures(const FormContext & ctx, const ThreeConnection & conn)
  {
    CurvatureTriple out;
    out.omega1 = d_or_zero(conn.A) + 0.5 * conn.A.wedge(conn.A, ctx.bracket_g());
    out.omega2 = d_or_zero(conn.B) + conn.A.wedge(conn.B, ctx.act_h());
    out.omega3 = d_or_zero(conn.C) + conn.A.wedge(conn.C, ctx.act_l())
                 + conn.B.wedge(conn.B, ctx.peiffer());
    return out;
  }

  /// Fake curvatures F1 = Omega1 - alpha(B), F2 = Omega2 - delta(C).
  inline std::pair<Form, Form> fake_curvatures(const FormContext & ctx,
                                               const ThreeConnection & conn)
  {
    CurvatureTriple om = curvatures(ctx, conn);
    Form f1 = om.omega1 - conn.B.push(ctx.module().alpha_lin, ctx.g_space());
    Form f2 = om.omega2 - conn.C.push(ctx.module().delta_lin, ctx.h_space());
    return {f1, f2};
  }

  namespace detail
  {
    /// Solve lin * c = coords(f) componentwise (least squares, residual-checked);
    /// used to invert delta on the image when building flat connections.
    inline Form solve_push(const Form & f, const Mat & lin,
                           std::shared_ptr<const ValueSpace> target, double tol = 1e-12)
    {
      Form out(std::move(target), f.n_vars(), f.degree());
      if (lin.cols() == 0 || lin.rows() == 0) {
        if (f.max_abs_coeff() > tol) throw Unsolvable("no preimage for a curvature component");
        return out;
      }
      Eigen::ColPivHouseholderQR<Mat> qr(lin);
      for (const auto & [key, polys] : f.components()) {
        // Collect per-monomial coefficient vectors so each solve is a single
        // linear system with a verifiable residual.
        std::map<Polynomial::Key, Vec> monomials;
        for (std::size_t a = 0; a < polys.size(); ++a) {
          for (const auto & [mk, c] : polys[a].terms()) {
            auto it = monomials.find(mk);
            if (it == monomials.end()) {
              it = monomials.emplace(mk, Vec::Zero(static_cast<Eigen::Index>(polys.size()))).first;
            }
            it->second[static_cast<Eigen::Index>(a)] += c;
          }
        }
        for (const auto & [mk, rhs] : monomials) {
          Vec c = qr.solve(rhs);
          if ((lin * c - rhs).cwiseAbs().maxCoeff() > tol) {
            throw Unsolvable("no preimage for a curvature component");
          }
          Polynomial mono(f.n_vars());
          mono.add_term(mk, 1.0);
          for (Eigen::Index a = 0; a < c.size(); ++a) {
            if (c[a] != 0.0) out.add_term(key, a, mono, c[a]);
          }
        }
      }
      return out;
    }

    /// Project the coordinates of every monomial of `f` onto the kernel of `lin`.
    inline Form restrict_to_kernel(const Form & f, const Mat & lin)
    {
      if (lin.rows() == 0 || lin.cols() == 0) return f; // no constraint to impose
      Eigen::FullPivLU<Mat> lu(lin);
      Mat ker = lu.kernel();
      if (ker.cols() == 0) return Form(f.space(), f.n_vars(), f.degree());
      Mat proj = ker * (ker.transpose() * ker).ldlt().solve(ker.transpose()).eval();
      Form out(f.space(), f.n_vars(), f.degree());
      for (const auto & [key, polys] : f.components()) {
        for (Eigen::Index c = 0; c < proj.rows(); ++c) {
          Polynomial acc(f.n_vars());
          bool any = false;
          for (std::size_t a = 0; a < polys.size(); ++a) {
            double w = proj(c, static_cast<Eigen::Index>(a));
            if (w != 0.0 && !polys[a].is_zero()) {
              acc += w * polys[a];
              any = true;
            }
          }
          if (any) out.add_term(key, c, acc);
        }
      }
      return out;
    }
  } // namespace detail

  /// A random connection with vanishing fake curvatures: A = 0, B restricted
  /// to ker(alpha), C solved from delta(C) = dB.  Falls back to the zero
  /// connection when the instance admits no nonzero solution.
  inline ThreeConnection make_fake_flat(const FormContext & ctx, int n_vars, Rng & rng)
  {
    const TwoCrossedModule & m = ctx.module();
    ThreeConnection conn;
    conn.A = Form(ctx.g_space(), n_vars, 1);
    Form b = Form::random(ctx.h_space(), n_vars, 2, rng, 2, 0.5);
    conn.B = detail::restrict_to_kernel(b, m.alpha_lin);
    try {
      conn.C = detail::solve_push(d_or_zero(conn.B), m.delta_lin, ctx.l_space());
    } catch (const Unsolvable &) {
      conn.B = Form(ctx.h_space(), n_vars, 2);
      conn.C = Form(ctx.l_space(), n_vars, 3);
    }
    return conn;
  }

  /// First-kind transformation with a constant gauge: A -> Ad_{g^{-1}} A,
  /// B -> g^{-1} |> B, C -> g^{-1} |> C (the dg term vanishes).
  inline ThreeConnection transform_first(const FormContext & ctx, const ThreeConnection & conn,
                                         const GroupElement & g)
  {
    const TwoCrossedModule & m = ctx.module();
    GroupElement gin = inverse(g);
    ThreeConnection out;
    out.A = conn.A.act(m.G->Ad(gin));
    out.B = conn.B.act(m.act_coords_h(gin));
    out.C = conn.C.act(m.act_coords_l(gin));
    return out;
  }

  /// Second-kind transformation by an h-valued 1-form phi.
  inline ThreeConnection transform_second(const FormContext & ctx, const ThreeConnection & conn,
                                          const Form & phi)
  {
    const TwoCrossedModule & m = ctx.module();
    ThreeConnection out;
    out.A = conn.A + phi.push(m.alpha_lin, ctx.g_space());
    // For a 1-form, phi ^ phi is half the bracket wedge.
    out.B = conn.B + d_or_zero(phi) + out.A.wedge(phi, ctx.act_h())
            - 0.5 * phi.wedge(phi, ctx.bracket_h());
    out.C = conn.C - out.B.wedge(phi, ctx.peiffer()) - phi.wedge(conn.B, ctx.peiffer());
    return out;
  }

  /// Third-kind transformation by an l-valued 2-form psi.
  inline ThreeConnection transform_third(const FormContext & ctx, const ThreeConnection & conn,
                                         const Form & psi)
  {
    const TwoCrossedModule & m = ctx.module();
    ThreeConnection out;
    out.A = conn.A;
    out.B = conn.B - psi.push(m.delta_lin, ctx.h_space());
    out.C = conn.C - d_or_zero(psi) - conn.A.wedge(psi, ctx.act_l());
    return out;
  }

  /// Closed form of the composite transformation (constant gauge).
  inline ThreeConnection transform_closed_form(const FormContext & ctx,
                                               const ThreeConnection & conn,
                                               const GaugeData & data)
  {
    const TwoCrossedModule & m = ctx.module();
    GroupElement gin = inverse(data.g);
    Form bg = conn.B.act(m.act_coords_h(gin));
    ThreeConnection out;
    out.A = conn.A.act(m.G->Ad(gin)) + data.phi.push(m.alpha_lin, ctx.g_space());
    out.B = bg + d_or_zero(data.phi) + out.A.wedge(data.phi, ctx.act_h())
            - 0.5 * data.phi.wedge(data.phi, ctx.bracket_h())
            - data.psi.push(m.delta_lin, ctx.h_space());
    out.C = conn.C.act(m.act_coords_l(gin)) - d_or_zero(data.psi)
            - out.A.wedge(data.psi, ctx.act_l()) + data.phi.wedge(data.psi, ctx.rhd_prime())
            - out.B.wedge(data.phi, ctx.peiffer()) - data.phi.wedge(bg, ctx.peiffer());
    return out;
  }

  /// Composite transformation (first, then second, then third).  Also
  /// evaluates the closed form and raises CompositionMismatch when the two
  /// pipelines disagree beyond `tol` in polynomial coefficients.
  inline ThreeConnection transform_general(const FormContext & ctx, const ThreeConnection & conn,
                                           const GaugeData & data, double tol = 1e-9)
  {
    ThreeConnection step = transform_first(ctx, conn, data.g);
    step = transform_second(ctx, step, data.phi);
    step = transform_third(ctx, step, data.psi);
    ThreeConnection closed = transform_closed_form(ctx, conn, data);
    double mismatch = std::max({max_coeff_distance(step.A, closed.A),
                                max_coeff_distance(step.B, closed.B),
                                max_coeff_distance(step.C, closed.C)});
    if (mismatch > tol) {
      throw CompositionMismatch("composite and closed-form transformations disagree by "
                                + std::to_string(mismatch));
    }
    return step;
  }

  /// Predicted curvatures of the transformed connection, assembled from the
  /// untransformed curvatures, the transformed B and C, and the gauge data.
  /// The lines are chained: each level consumes the previous predicted one.
  inline CurvatureTriple predicted_curvatures(const FormContext & ctx,
                                              const ThreeConnection & conn,
                                              const ThreeConnection & primed,
                                              const GaugeData & data)
  {
    const TwoCrossedModule & m = ctx.module();
    GroupElement gin = inverse(data.g);
    Mat ad = m.G->Ad(gin), ah = m.act_coords_h(gin), al = m.act_coords_l(gin);
    CurvatureTriple om = curvatures(ctx, conn);

    Form alpha_bp = primed.B.push(m.alpha_lin, ctx.g_space());
    Form delta_cp = primed.C.push(m.delta_lin, ctx.h_space());
    Form bg = conn.B.act(ah);
    Form cg = conn.C.act(al);

    CurvatureTriple out;
    out.omega1 = om.omega1.act(ad) + alpha_bp - bg.push(m.alpha_lin, ctx.g_space());
    Form fake1 = out.omega1 - alpha_bp;
    out.omega2 = om.omega2.act(ah) + fake1.wedge(data.phi, ctx.act_h()) + delta_cp
                 - cg.push(m.delta_lin, ctx.h_space());
    Form fake2 = out.omega2 - delta_cp;
    Form om2_hat = (om.omega2 - conn.C.push(m.delta_lin, ctx.h_space())).act(ah);
    out.omega3 = om.omega3.act(al) - fake2.wedge(data.phi, ctx.peiffer())
                 + data.phi.wedge(om2_hat, ctx.peiffer()) - fake1.wedge(data.psi, ctx.act_l());
    return out;
  }

  /// Residuals of the covariance check, per curvature level, plus the
  /// composite-vs-closed-form coherence gap.
  struct CovarianceReport
  {
    double res1 = 0.0;
    double res2 = 0.0;
    double res3 = 0.0;
    double coherence = 0.0;

    double max_residual() const { return std::max({res1, res2, res3}); }
  };

  namespace detail
  {
    inline double point_residual(const Form & a, const Form & b, int points, Rng & rng)
    {
      int n = a.n_vars();
      double out = 0.0;
      for (int p = 0; p < points; ++p) {
        Vec x = rng.coords(n, 1.0);
        Mat vecs(n, a.degree());
        for (Eigen::Index r = 0; r < vecs.rows(); ++r) {
          for (Eigen::Index c = 0; c < vecs.cols(); ++c) vecs(r, c) = rng.uniform(-1.0, 1.0);
        }
        Vec gap = a.evaluate(x, vecs) - b.evaluate(x, vecs);
        if (gap.size() > 0) out = std::max(out, gap.cwiseAbs().maxCoeff());
      }
      return out;
    }
  } // namespace detail

  /// Transform `conn` by `data`, compute curvatures of the result, and
  /// compare them at `points` random (point, tangent-vectors) samples with
  /// the predicted curvatures.
  inline CovarianceReport verify_covariance(const FormContext & ctx, const ThreeConnection & conn,
                                            const GaugeData & data, int points, Rng & rng)
  {
    ThreeConnection composed = transform_first(ctx, conn, data.g);
    composed = transform_second(ctx, composed, data.phi);
    composed = transform_third(ctx, composed, data.psi);
    ThreeConnection closed = transform_closed_form(ctx, conn, data);

    CurvatureTriple actual = curvatures(ctx, composed);
    CurvatureTriple predicted = predicted_curvatures(ctx, conn, composed, data);

    CovarianceReport out;
    out.coherence = std::max({max_coeff_distance(composed.A, closed.A),
                              max_coeff_distance(composed.B, closed.B),
                              max_coeff_distance(composed.C, closed.C)});
    out.res1 = detail::point_residual(actual.omega1, predicted.omega1, points, rng);
    out.res2 = detail::point_residual(actual.omega2, predicted.omega2, points, rng);
    out.res3 = detail::point_residual(actual.omega3, predicted.omega3, points, rng);
    return out;
  }

  /// Identity gauge data over `n_vars` variables.
  inline GaugeData trivial_gauge(const FormContext & ctx, int n_vars)
  {
    return {ctx.module().G->identity(), Form(ctx.h_space(), n_vars, 1),
            Form(ctx.l_space(), n_vars, 2)};
  }

  /// Random gauge data (constant group part).
  inline GaugeData random_gauge(const FormContext & ctx, int n_vars, Rng & rng,
                                double scale = 0.5)
  {
    return {ctx.module().G->random(rng, scale),
            Form::random(ctx.h_space(), n_vars, 1, rng, 2, scale),
            Form::random(ctx.l_space(), n_vars, 2, rng, 2, scale)};
  }

  // -------------------------------------------------------------------------
  // Pointwise numeric backend for position-dependent gauges g(x) = exp(xi(x)).
  // Polynomials cannot represent such a gauge, so forms are evaluated at
  // sample points instead; exterior derivatives use central differences.
  // -------------------------------------------------------------------------

  /// A form known only through point evaluations: feed a base point and one
  /// tangent vector per degree, get value-space coordinates back.
  class NumericForm
  {
  public:
    using Eval = std::function<Vec(const Vec &, const std::vector<Vec> &)>;

    NumericForm(std::shared_ptr<const ValueSpace> space, int n_vars, int degree, Eval eval)
      : m_space(std::move(space)), m_n(n_vars), m_deg(degree), m_eval(std::move(eval))
    {
    }

    const std::shared_ptr<const ValueSpace> & space() const { return m_space; }
    int n_vars() const { return m_n; }
    int degree() const { return m_deg; }

    Vec operator()(const Vec & x, const std::vector<Vec> & vecs) const
    {
      if (static_cast<int>(vecs.size()) != m_deg) {
        throw DimensionMismatch("evaluation vectors do not match form degree");
      }
      return m_eval(x, vecs);
    }

    static NumericForm of(const Form & f)
    {
      return {f.space(), f.n_vars(), f.degree(), [f](const Vec & x, const std::vector<Vec> & v) {
                Mat cols(x.size(), static_cast<Eigen::Index>(v.size()));
                for (std::size_t i = 0; i < v.size(); ++i) {
                  cols.col(static_cast<Eigen::Index>(i)) = v[i];
                }
                return f.evaluate(x, cols);
              }};
    }

    /// Exterior derivative via central differences with the pinned step.
    NumericForm d(double step = fd_step) const
    {
      NumericForm self = *this;
      return {m_space, m_n, m_deg + 1,
              [self, step](const Vec & x, const std::vector<Vec> & v) {
                Vec out = Vec::Zero(self.m_space->dim());
                double sign = 1.0;
                for (std::size_t i = 0; i < v.size(); ++i, sign = -sign) {
                  std::vector<Vec> rest;
                  for (std::size_t j = 0; j < v.size(); ++j) {
                    if (j != i) rest.push_back(v[j]);
                  }
                  Vec plus = self(x + step * v[i], rest);
                  Vec minus = self(x - step * v[i], rest);
                  out += sign / (2.0 * step) * (plus - minus);
                }
                return out;
              }};
    }

    /// Wedge through a pairing: alternating shuffle sum over the tangent slots.
    NumericForm wedge(const NumericForm & other, const Pairing & pairing) const
    {
      if (m_space != pairing.left || other.m_space != pairing.right) {
        throw DimensionMismatch("wedge operands do not match pairing '" + pairing.name + "'");
      }
      NumericForm lhs = *this, rhs = other;
      int p = m_deg, q = other.m_deg;
      return {pairing.result, m_n, p + q,
              [lhs, rhs, pairing, p, q](const Vec & x, const std::vector<Vec> & v) {
                Vec out = Vec::Zero(pairing.result->dim());
                std::vector<int> pick;
                std::function<void(int)> walk = [&](int start) {
                  if (static_cast<int>(pick.size()) == p) {
                    std::vector<Vec> lv, rv;
                    std::vector<bool> used(v.size(), false);
                    for (int i : pick) {
                      lv.push_back(v[static_cast<std::size_t>(i)]);
                      used[static_cast<std::size_t>(i)] = true;
                    }
                    // Shuffle sign: count right-slot indices that precede
                    // unused left-slot indices in the original order.
                    int inversions = 0;
                    for (int j = 0; j < p + q; ++j) {
                      if (used[static_cast<std::size_t>(j)]) {
                        for (int i = 0; i < j; ++i) {
                          if (!used[static_cast<std::size_t>(i)]) ++inversions;
                        }
                      } else {
                        rv.push_back(v[static_cast<std::size_t>(j)]);
                      }
                    }
                    double sign = (inversions % 2 == 0) ? 1.0 : -1.0;
                    Vec a = lhs(x, lv), b = rhs(x, rv);
                    for (Eigen::Index ia = 0; ia < a.size(); ++ia) {
                      if (a[ia] == 0.0) continue;
                      for (Eigen::Index ib = 0; ib < b.size(); ++ib) {
                        if (b[ib] == 0.0) continue;
                        Vec val = pairing.apply(ia, ib);
                        if (val.size() > 0) out += (sign * a[ia] * b[ib]) * val;
                      }
                    }
                    return;
                  }
                  for (int i = start; i < p + q; ++i) {
                    pick.push_back(i);
                    walk(i + 1);
                    pick.pop_back();
                  }
                };
                walk(0);
                return out;
              }};
    }

    /// Pointwise linear map on values (e.g. a gauge action at each point).
    NumericForm act(std::function<Mat(const Vec &)> coords,
                    std::shared_ptr<const ValueSpace> target) const
    {
      NumericForm self = *this;
      return {std::move(target), m_n, m_deg,
              [self, coords = std::move(coords)](const Vec & x, const std::vector<Vec> & v) {
                return Vec(coords(x) * self(x, v));
              }};
    }

    friend NumericForm operator+(const NumericForm & a, const NumericForm & b)
    {
      if (a.m_space != b.m_space || a.m_deg != b.m_deg) {
        throw DimensionMismatch("numeric form sum over mismatched space/degree");
      }
      return {a.m_space, a.m_n, a.m_deg, [a, b](const Vec & x, const std::vector<Vec> & v) {
                return Vec(a(x, v) + b(x, v));
              }};
    }

    friend NumericForm operator-(const NumericForm & a, const NumericForm & b)
    {
      if (a.m_space != b.m_space || a.m_deg != b.m_deg) {
        throw DimensionMismatch("numeric form difference over mismatched space/degree");
      }
      return {a.m_space, a.m_n, a.m_deg, [a, b](const Vec & x, const std::vector<Vec> & v) {
                return Vec(a(x, v) - b(x, v));
              }};
    }

    friend NumericForm operator*(double s, const NumericForm & f)
    {
      return {f.m_space, f.m_n, f.m_deg,
              [s, f](const Vec & x, const std::vector<Vec> & v) { return Vec(s * f(x, v)); }};
    }

  private:
    static constexpr double fd_step = 1e-5;

    std::shared_ptr<const ValueSpace> m_space;
    int m_n = 0;
    int m_deg = 0;
    Eval m_eval;
  };

  /// A position-dependent gauge g(x) = exp(xi(x)) given by polynomial
  /// coordinates of xi in the g-basis.
  struct PolyGauge
  {
    std::vector<Polynomial> xi;

    Vec coords_at(const Vec & x) const
    {
      Vec out(static_cast<Eigen::Index>(xi.size()));
      for (std::size_t a = 0; a < xi.size(); ++a) {
        out[static_cast<Eigen::Index>(a)] = xi[a].evaluate(x);
      }
      return out;
    }

    static PolyGauge random(const FormContext & ctx, int n_vars, Rng & rng, double scale = 0.3)
    {
      PolyGauge out;
      for (Eigen::Index a = 0; a < ctx.module().g_alg().dim(); ++a) {
        out.xi.push_back(Polynomial::random(n_vars, 2, rng, scale));
      }
      return out;
    }
  };

  namespace detail
  {
    /// Directional derivative of the xi coordinates, exact for polynomials.
    inline Vec xi_directional(const PolyGauge & gauge, const Vec & x, const Vec & v)
    {
      Vec out = Vec::Zero(static_cast<Eigen::Index>(gauge.xi.size()));
      for (std::size_t a = 0; a < gauge.xi.size(); ++a) {
        double acc = 0.0;
        for (int i = 0; i < static_cast<int>(x.size()); ++i) {
          if (v[i] != 0.0) acc += v[i] * gauge.xi[a].derivative(i).evaluate(x);
        }
        out[static_cast<Eigen::Index>(a)] = acc;
      }
      return out;
    }
  } // namespace detail

  /// The 1-form g^{-1} dg for g(x) = exp(xi(x)).  For a nilpotent algebra the
  /// terminating series sum_k (-ad_xi)^k/(k+1)! (dxi) is exact; otherwise the
  /// derivative of g falls back to central differences with the pinned step.
  inline NumericForm maurer_cartan(const FormContext & ctx, const PolyGauge & gauge,
                                   int n_vars, double step = 1e-5)
  {
    auto alg_ptr = ctx.module().G->algebra_ptr();
    return {ctx.g_space(), n_vars, 1,
            [gauge, alg_ptr, step](const Vec & x, const std::vector<Vec> & v) {
              const LieAlgebra & a = *alg_ptr;
              Vec xi = gauge.coords_at(x);
              Vec dxi = detail::xi_directional(gauge, x, v[0]);
              if (a.nilpotency() > 0) {
                Vec term = dxi, out = dxi;
                double fact = 1.0;
                Mat adxi = a.ad(xi);
                for (int k = 1; k < a.nilpotency(); ++k) {
                  term = Vec(-adxi * term);
                  fact *= static_cast<double>(k + 1);
                  out += term / fact;
                }
                return out;
              }
              Mat gp = matrix_exp(a.matrix_of(gauge.coords_at(x + step * v[0])), 0);
              Mat gm = matrix_exp(a.matrix_of(gauge.coords_at(x - step * v[0])), 0);
              Mat g = matrix_exp(a.matrix_of(xi), 0);
              Mat lu = g.partialPivLu().solve((gp - gm) / (2.0 * step));
              return a.project(lu);
            }};
  }

  /// Point-evaluable counterpart of ThreeConnection for the numeric backend.
  struct NumericConnection
  {
    NumericForm A;
    NumericForm B;
    NumericForm C;
  };

  /// First-kind transformation with a position-dependent gauge:
  /// A -> Ad_{g^{-1}} A + g^{-1} dg, B -> g^{-1} |> B, C -> g^{-1} |> C.
  inline NumericConnection transform_first_numeric(const FormContext & ctx,
                                                   const ThreeConnection & conn,
                                                   const PolyGauge & gauge)
  {
    const TwoCrossedModule & m = ctx.module();
    auto group_at = [&m, gauge](const Vec & x) {
      return m.G->exp(m.g_alg().element(gauge.coords_at(x)));
    };
    auto ad_inv = [&m, group_at](const Vec & x) { return m.G->Ad(inverse(group_at(x))); };
    auto act_h_inv = [&m, group_at](const Vec & x) {
      return m.act_coords_h(inverse(group_at(x)));
    };
    auto act_l_inv = [&m, group_at](const Vec & x) {
      return m.act_coords_l(inverse(group_at(x)));
    };
    int n = conn.A.n_vars();
    NumericConnection out{
        NumericForm::of(conn.A).act(ad_inv, ctx.g_space()) + maurer_cartan(ctx, gauge, n),
        NumericForm::of(conn.B).act(act_h_inv, ctx.h_space()),
        NumericForm::of(conn.C).act(act_l_inv, ctx.l_space())};
    return out;
  }

  /// Numeric curvatures, mirroring the polynomial definition.
  inline std::array<NumericForm, 3> curvatures_numeric(const FormContext & ctx,
                                                       const NumericConnection & conn)
  {
    NumericForm om1 = conn.A.d() + 0.5 * conn.A.wedge(conn.A, ctx.bracket_g());
    NumericForm om2 = conn.B.d() + conn.A.wedge(conn.B, ctx.act_h());
    NumericForm om3 = conn.C.d() + conn.A.wedge(conn.C, ctx.act_l())
                      + conn.B.wedge(conn.B, ctx.peiffer());
    return {om1, om2, om3};
  }

  /// First-kind covariance with a position-dependent gauge: the curvatures of
  /// the transformed connection must equal g^{-1} |> (curvatures) pointwise.
  inline CovarianceReport verify_first_kind_numeric(const FormContext & ctx,
                                                    const ThreeConnection & conn,
                                                    const PolyGauge & gauge, int points,
                                                    Rng & rng)
  {
    const TwoCrossedModule & m = ctx.module();
    int n = conn.A.n_vars();
    NumericConnection primed = transform_first_numeric(ctx, conn, gauge);
    auto actual = curvatures_numeric(ctx, primed);
    CurvatureTriple om = curvatures(ctx, conn);
    std::array<NumericForm, 3> base{NumericForm::of(om.omega1), NumericForm::of(om.omega2),
                                    NumericForm::of(om.omega3)};
    auto group_at = [&m, gauge](const Vec & x) {
      return m.G->exp(m.g_alg().element(gauge.coords_at(x)));
    };
    std::array<std::function<Mat(const Vec &)>, 3> gauge_act{
        [&m, group_at](const Vec & x) { return m.G->Ad(inverse(group_at(x))); },
        [&m, group_at](const Vec & x) { return m.act_coords_h(inverse(group_at(x))); },
        [&m, group_at](const Vec & x) { return m.act_coords_l(inverse(group_at(x))); }};

    CovarianceReport out;
    std::array<double *, 3> slots{&out.res1, &out.res2, &out.res3};
    for (int level = 0; level < 3; ++level) {
      int deg = 2 + level;
      if (deg > n) continue;
      for (int p = 0; p < points; ++p) {
        Vec x = rng.coords(n, 1.0);
        std::vector<Vec> vecs;
        for (int i = 0; i < deg; ++i) {
          Vec v(n);
          for (Eigen::Index r = 0; r < n; ++r) v[r] = rng.uniform(-1.0, 1.0);
          vecs.push_back(v);
        }
        Vec expected = gauge_act[static_cast<std::size_t>(level)](x)
                       * base[static_cast<std::size_t>(level)](x, vecs);
        Vec got = actual[static_cast<std::size_t>(level)](x, vecs);
        Vec gap = got - expected;
        double & slot = *slots[static_cast<std::size_t>(level)];
        if (gap.size() > 0) slot = std::max(slot, gap.cwiseAbs().maxCoeff());
      }
    }
    return out;
  }
} // namespace g3
