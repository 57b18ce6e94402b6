#ifndef G3_FORMS_HPP
#define G3_FORMS_HPP

#include "crossed.hpp"
#include "poly.hpp"

#include <map>

/// \file forms.hpp
/// Lie-algebra-valued differential forms with exact polynomial coefficients:
/// exterior derivative, the graded wedge products paired through a 2-crossed
/// module (matrix product, bracket, actions, Peiffer lifting and its
/// commutator, derived action), pushforwards along delta/alpha, constant
/// gauge action, and pointwise evaluation.

namespace g3
{

  //------------------------------------------------------------------------
  // Value spaces
  //------------------------------------------------------------------------

  /// Span of matrices in which a form takes values.  Lie-algebra-valued forms
  /// use the algebra basis; matrix-product wedges land in a computed span of
  /// products (the "enveloping span"), with projection residuals gated.
  class ValueSpace
  {
  public:
    static constexpr double projection_tolerance = 1e-10;

    ValueSpace() = default;

    ValueSpace(std::string name, int matrix_size, std::vector<Mat> basis)
      : m_name(std::move(name)), m_msize(matrix_size), m_basis(std::move(basis))
    {
      const Eigen::Index d = dim();
      m_stacked = Mat(static_cast<Eigen::Index>(m_msize) * m_msize, d);
      for (Eigen::Index a = 0; a < d; ++a) {
        m_stacked.col(a) = Eigen::Map<const Vec>(m_basis[a].data(), m_stacked.rows());
      }
      if (d > 0) m_solver.compute(m_stacked);
    }

    /// Value space reusing the basis of a Lie algebra.
    static std::shared_ptr<const ValueSpace> of_algebra(const LieAlgebra & alg)
    {
      return std::make_shared<ValueSpace>(alg.name(), alg.matrix_size(), alg.basis());
    }

    /// Span of a family of matrices: a maximal linearly independent subset is
    /// selected by rank-revealing QR and kept as the basis.
    static std::shared_ptr<const ValueSpace> span_of(const std::string & name, int matrix_size,
                                                     const std::vector<Mat> & gens,
                                                     std::vector<std::size_t> * picked = nullptr)
    {
      if (picked) picked->clear();
      if (gens.empty()) {
        return std::make_shared<ValueSpace>(name, matrix_size, std::vector<Mat>{});
      }
      Mat stacked(static_cast<Eigen::Index>(matrix_size) * matrix_size,
                  static_cast<Eigen::Index>(gens.size()));
      for (std::size_t a = 0; a < gens.size(); ++a) {
        stacked.col(static_cast<Eigen::Index>(a)) =
            Eigen::Map<const Vec>(gens[a].data(), stacked.rows());
      }
      Eigen::ColPivHouseholderQR<Mat> qr(stacked);
      qr.setThreshold(1e-9);
      std::vector<Mat> basis;
      if (picked) picked->clear();
      for (Eigen::Index r = 0; r < qr.rank(); ++r) {
        std::size_t idx = static_cast<std::size_t>(qr.colsPermutation().indices()[r]);
        basis.push_back(gens[idx]);
        if (picked) picked->push_back(idx);
      }
      return std::make_shared<ValueSpace>(name, matrix_size, std::move(basis));
    }

    const std::string & name() const { return m_name; }
    int matrix_size() const { return m_msize; }
    Eigen::Index dim() const { return static_cast<Eigen::Index>(m_basis.size()); }
    const std::vector<Mat> & basis() const { return m_basis; }

    /// Coordinates of a matrix in this span; residual above the closure gate
    /// is an error.
    Vec project(const Mat & m) const
    {
      if (dim() == 0) {
        if (m.lpNorm<Eigen::Infinity>() > projection_tolerance) {
          throw ProjectionError("nonzero matrix projected onto trivial span " + m_name);
        }
        return Vec(0);
      }
      Vec rhs = Eigen::Map<const Vec>(m.data(), m.size());
      Vec c = m_solver.solve(rhs);
      double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
      if ((m_stacked * c - rhs).lpNorm<Eigen::Infinity>() > projection_tolerance * scale) {
        throw ProjectionError("closure gate: matrix does not lie in span " + m_name);
      }
      return c;
    }

    Mat matrix_of(const Vec & coords) const
    {
      Mat m = Mat::Zero(m_msize, m_msize);
      for (Eigen::Index a = 0; a < dim(); ++a) m += coords[a] * m_basis[a];
      return m;
    }

  private:
    std::string m_name;
    int m_msize = 1;
    std::vector<Mat> m_basis;
    Mat m_stacked;
    Eigen::ColPivHouseholderQR<Mat> m_solver;
  };

  //------------------------------------------------------------------------
  // Bilinear pairings between value spaces
  //------------------------------------------------------------------------

  /// Bilinear pairing used inside a wedge product: basis x basis -> result coords.
  struct Pairing
  {
    std::string name;
    std::shared_ptr<const ValueSpace> left, right, result;
    std::vector<std::vector<Vec>> table; ///< table[a][b] = coords of X_a . Y_b

    Vec apply(Eigen::Index a, Eigen::Index b) const
    {
      return table[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    }
  };

  namespace detail
  {
    inline Pairing tabulate(std::string name, std::shared_ptr<const ValueSpace> left,
                            std::shared_ptr<const ValueSpace> right,
                            std::shared_ptr<const ValueSpace> result,
                            const std::function<Vec(Eigen::Index, Eigen::Index)> & fn)
    {
      Pairing p{std::move(name), std::move(left), std::move(right), std::move(result), {}};
      p.table.resize(static_cast<std::size_t>(p.left->dim()));
      for (Eigen::Index a = 0; a < p.left->dim(); ++a) {
        for (Eigen::Index b = 0; b < p.right->dim(); ++b) {
          p.table[static_cast<std::size_t>(a)].push_back(fn(a, b));
        }
      }
      return p;
    }
  } // namespace detail

  /// All pairings attached to one 2-crossed module instance, with shared
  /// value spaces for g, h and l.
  class FormContext
  {
  public:
    explicit FormContext(std::shared_ptr<const TwoCrossedModule> mod) : m_mod(std::move(mod))
    {
      m_g = ValueSpace::of_algebra(m_mod->g_alg());
      m_h = ValueSpace::of_algebra(m_mod->h_alg());
      m_l = ValueSpace::of_algebra(m_mod->l_alg());
    }

    const TwoCrossedModule & module() const { return *m_mod; }
    std::shared_ptr<const TwoCrossedModule> module_ptr() const { return m_mod; }
    std::shared_ptr<const ValueSpace> g_space() const { return m_g; }
    std::shared_ptr<const ValueSpace> h_space() const { return m_h; }
    std::shared_ptr<const ValueSpace> l_space() const { return m_l; }

    /// Lie bracket pairing of a value space carrying an algebra structure.
    Pairing bracket(const std::shared_ptr<const ValueSpace> & s, const LieAlgebra & alg) const
    {
      return detail::tabulate("bracket", s, s, s, [&alg](Eigen::Index a, Eigen::Index b) {
        return alg.bracket_coords(Vec::Unit(alg.dim(), a), Vec::Unit(alg.dim(), b));
      });
    }

    Pairing bracket_g() const { return bracket(m_g, m_mod->g_alg()); }
    Pairing bracket_h() const { return bracket(m_h, m_mod->h_alg()); }
    Pairing bracket_l() const { return bracket(m_l, m_mod->l_alg()); }

    /// Action pairing g x h -> h.
    Pairing act_h() const
    {
      const auto & m = *m_mod;
      return detail::tabulate("act_h", m_g, m_h, m_h, [&m](Eigen::Index a, Eigen::Index b) {
        return Vec(m.act_lin_h[static_cast<std::size_t>(a)].col(b));
      });
    }

    /// Action pairing g x l -> l.
    Pairing act_l() const
    {
      const auto & m = *m_mod;
      return detail::tabulate("act_l", m_g, m_l, m_l, [&m](Eigen::Index a, Eigen::Index b) {
        return Vec(m.act_lin_l[static_cast<std::size_t>(a)].col(b));
      });
    }

    /// Peiffer lifting pairing h x h -> l.
    Pairing peiffer() const
    {
      const auto & m = *m_mod;
      return detail::tabulate("peiffer", m_h, m_h, m_l, [&m](Eigen::Index a, Eigen::Index b) {
        return Vec(m.peiffer_lin[static_cast<std::size_t>(a)].col(b));
      });
    }

    /// Peiffer commutator pairing h x h -> h: <u,v> = [u,v] - alpha(u)|>v.
    Pairing peiffer_commutator() const
    {
      const auto & m = *m_mod;
      const auto & h = m.h_alg();
      return detail::tabulate("peiffer_commutator", m_h, m_h, m_h,
                              [&m, &h](Eigen::Index a, Eigen::Index b) {
                                return m.peiffer_commutator_diff(Vec(Vec::Unit(h.dim(), a)),
                                                                 Vec(Vec::Unit(h.dim(), b)));
                              });
    }

    /// Derived action pairing h x l -> l: v |>' x = -{delta x, v}.
    Pairing rhd_prime() const
    {
      const auto & m = *m_mod;
      return detail::tabulate("rhd_prime", m_h, m_l, m_l,
                              [&m](Eigen::Index a, Eigen::Index b) {
                                return m.rhd_prime_diff(
                                    Vec(Vec::Unit(m.h_alg().dim(), a)),
                                    Vec(Vec::Unit(m.l_alg().dim(), b)));
                              });
    }

    /// Matrix-product pairing into the enveloping span of pairwise products
    /// (and the operand bases), gated by the span's closure tolerance.
    Pairing product(const std::shared_ptr<const ValueSpace> & left,
                    const std::shared_ptr<const ValueSpace> & right) const
    {
      std::vector<Mat> gens;
      for (const Mat & a : left->basis()) {
        for (const Mat & b : right->basis()) gens.push_back(a * b);
      }
      auto span = ValueSpace::span_of("product(" + left->name() + "," + right->name() + ")",
                                      left->matrix_size(), gens);
      return detail::tabulate("product", left, right, span,
                              [&](Eigen::Index a, Eigen::Index b) {
                                return span->project(left->basis()[static_cast<std::size_t>(a)]
                                                     * right->basis()[static_cast<std::size_t>(b)]);
                              });
    }

  private:
    std::shared_ptr<const TwoCrossedModule> m_mod;
    std::shared_ptr<const ValueSpace> m_g, m_h, m_l;
  };

  //------------------------------------------------------------------------
  // Forms
  //------------------------------------------------------------------------

  namespace detail
  {
    /// Sign of merging two disjoint increasing tuples, or 0 when they overlap.
    inline int merge_sign(const std::vector<int> & I, const std::vector<int> & J,
                          std::vector<int> & out)
    {
      out.clear();
      int inversions = 0;
      for (int j : J) {
        int greater = 0;
        for (int i : I) {
          if (i == j) return 0;
          if (i > j) ++greater;
        }
        inversions += greater;
      }
      out = I;
      out.insert(out.end(), J.begin(), J.end());
      std::sort(out.begin(), out.end());
      return (inversions % 2 == 0) ? 1 : -1;
    }
  } // namespace detail

  /// Differential form of fixed degree with polynomial coefficients and
  /// values in a matrix span.  Components are indexed by strictly increasing
  /// coordinate tuples; only nonzero components are stored.
  class Form
  {
  public:
    using Key = std::vector<int>;

    Form() = default;

    Form(std::shared_ptr<const ValueSpace> space, int n_vars, int degree)
      : m_space(std::move(space)), m_n(n_vars), m_deg(degree)
    {
      if (degree < 0) throw DimensionMismatch("negative form degree");
    }

    const std::shared_ptr<const ValueSpace> & space() const { return m_space; }
    int n_vars() const { return m_n; }
    int degree() const { return m_deg; }
    const std::map<Key, std::vector<Polynomial>> & components() const { return m_comp; }

    bool is_zero() const
    {
      for (const auto & [k, polys] : m_comp) {
        for (const auto & p : polys) {
          if (!p.is_zero()) return false;
        }
      }
      return true;
    }

    /// Mutable access to a component, created on demand.
    std::vector<Polynomial> & component(const Key & key)
    {
      auto it = m_comp.find(key);
      if (it == m_comp.end()) {
        it = m_comp.emplace(key, std::vector<Polynomial>(static_cast<std::size_t>(m_space->dim()),
                                                         Polynomial(m_n))).first;
      }
      return it->second;
    }

    /// Add c * p to coordinate `a` of component `key`.
    void add_term(const Key & key, Eigen::Index a, const Polynomial & p, double c = 1.0)
    {
      if (c == 0.0 || p.is_zero()) return;
      component(key)[static_cast<std::size_t>(a)] += c * p;
    }

    Form & operator+=(const Form & o)
    {
      check_compatible(o);
      for (const auto & [k, polys] : o.m_comp) {
        auto & mine = component(k);
        for (std::size_t a = 0; a < polys.size(); ++a) mine[a] += polys[a];
      }
      return *this;
    }

    Form & operator-=(const Form & o)
    {
      check_compatible(o);
      for (const auto & [k, polys] : o.m_comp) {
        auto & mine = component(k);
        for (std::size_t a = 0; a < polys.size(); ++a) mine[a] -= polys[a];
      }
      return *this;
    }

    friend Form operator+(Form a, const Form & b) { return a += b; }
    friend Form operator-(Form a, const Form & b) { return a -= b; }

    friend Form operator*(double s, const Form & f)
    {
      Form out(f.m_space, f.m_n, f.m_deg);
      for (const auto & [k, polys] : f.m_comp) {
        for (std::size_t a = 0; a < polys.size(); ++a) {
          out.add_term(k, static_cast<Eigen::Index>(a), polys[a], s);
        }
      }
      return out;
    }

    /// Exterior derivative.  \throws TopDegreeError at top degree.
    Form d() const
    {
      if (m_deg >= m_n) throw TopDegreeError("exterior derivative of a top-degree form");
      Form out(m_space, m_n, m_deg + 1);
      for (const auto & [key, polys] : m_comp) {
        for (int v = 0; v < m_n; ++v) {
          bool inside = false;
          int below = 0;
          for (int i : key) {
            if (i == v) inside = true;
            if (i < v) ++below;
          }
          if (inside) continue;
          Key k2 = key;
          k2.insert(std::upper_bound(k2.begin(), k2.end(), v), v);
          double sign = (below % 2 == 0) ? 1.0 : -1.0;
          for (std::size_t a = 0; a < polys.size(); ++a) {
            out.add_term(k2, static_cast<Eigen::Index>(a), polys[a].derivative(v), sign);
          }
        }
      }
      return out;
    }

    /// Wedge product through a bilinear pairing.
    Form wedge(const Form & other, const Pairing & pairing) const
    {
      if (m_space != pairing.left || other.m_space != pairing.right) {
        throw DimensionMismatch("wedge operands do not match pairing '" + pairing.name + "'");
      }
      if (m_n != other.m_n) throw DimensionMismatch("wedge operands over different variables");
      Form out(pairing.result, m_n, m_deg + other.m_deg);
      std::vector<int> merged;
      for (const auto & [ki, pi] : m_comp) {
        for (const auto & [kj, pj] : other.m_comp) {
          int sign = detail::merge_sign(ki, kj, merged);
          if (sign == 0) continue;
          for (std::size_t a = 0; a < pi.size(); ++a) {
            if (pi[a].is_zero()) continue;
            for (std::size_t b = 0; b < pj.size(); ++b) {
              if (pj[b].is_zero()) continue;
              Vec val = pairing.apply(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
              if (val.size() == 0) continue;
              Polynomial prod = pi[a] * pj[b];
              for (Eigen::Index c = 0; c < val.size(); ++c) {
                if (val[c] != 0.0) out.add_term(merged, c, prod, sign * val[c]);
              }
            }
          }
        }
      }
      return out;
    }

    /// Pushforward along a linear map on values (e.g. delta or alpha).
    Form push(const Mat & lin, std::shared_ptr<const ValueSpace> target) const
    {
      if (lin.cols() != m_space->dim() || lin.rows() != target->dim()) {
        throw DimensionMismatch("pushforward map has wrong shape");
      }
      Form out(std::move(target), m_n, m_deg);
      for (const auto & [k, polys] : m_comp) {
        for (std::size_t a = 0; a < polys.size(); ++a) {
          if (polys[a].is_zero()) continue;
          for (Eigen::Index c = 0; c < lin.rows(); ++c) {
            double w = lin(c, static_cast<Eigen::Index>(a));
            if (w != 0.0) out.add_term(k, c, polys[a], w);
          }
        }
      }
      return out;
    }

    /// Apply a constant coordinate transformation on values (e.g. Ad_g or a
    /// constant gauge action).
    Form act(const Mat & coord_matrix) const { return push(coord_matrix, m_space); }

    /// Re-express the form in another value space, monomial by monomial.
    /// Each monomial's coefficient matrix is projected through the target's
    /// closure gate, so values that genuinely leave the target span raise a
    /// ProjectionError even when individual basis matrices of this span do.
    Form reexpress(std::shared_ptr<const ValueSpace> target) const
    {
      Form out(target, m_n, m_deg);
      for (const auto & [key, polys] : m_comp) {
        // Gather coefficient vectors per monomial.
        std::map<Polynomial::Key, Vec> monomials;
        for (std::size_t a = 0; a < polys.size(); ++a) {
          for (const auto & [mk, c] : polys[a].terms()) {
            auto it = monomials.find(mk);
            if (it == monomials.end()) {
              it = monomials.emplace(mk, Vec::Zero(m_space->dim())).first;
            }
            it->second[static_cast<Eigen::Index>(a)] += c;
          }
        }
        for (const auto & [mk, coeffs] : monomials) {
          Vec c = out.space()->project(m_space->matrix_of(coeffs));
          Polynomial mono(m_n);
          mono.add_term(mk, 1.0);
          for (Eigen::Index a = 0; a < c.size(); ++a) {
            if (c[a] != 0.0) out.add_term(key, a, mono, c[a]);
          }
        }
      }
      return out;
    }

    /// Evaluate at a point on a list of tangent vectors (columns of `vecs`).
    Vec evaluate(const Vec & x, const Mat & vecs) const
    {
      if (vecs.cols() != m_deg || (m_deg > 0 && vecs.rows() != m_n)) {
        throw DimensionMismatch("evaluation vectors do not match form degree");
      }
      Vec out = Vec::Zero(m_space->dim());
      Mat minor(m_deg, m_deg);
      for (const auto & [key, polys] : m_comp) {
        for (int r = 0; r < m_deg; ++r) {
          for (int c = 0; c < m_deg; ++c) {
            minor(r, c) = vecs(key[static_cast<std::size_t>(r)], c);
          }
        }
        double factor = (m_deg == 0) ? 1.0 : minor.determinant();
        if (factor == 0.0) continue;
        for (std::size_t a = 0; a < polys.size(); ++a) {
          out[static_cast<Eigen::Index>(a)] += factor * polys[a].evaluate(x);
        }
      }
      return out;
    }

    /// Largest absolute coefficient across all components.
    double max_abs_coeff() const
    {
      double out = 0.0;
      for (const auto & [k, polys] : m_comp) {
        for (const auto & p : polys) out = std::max(out, p.max_abs_coeff());
      }
      return out;
    }

    /// Random form: every component gets random low-degree polynomials.
    static Form random(std::shared_ptr<const ValueSpace> space, int n_vars, int degree,
                       Rng & rng, int poly_degree = 2, double scale = 1.0)
    {
      Form out(space, n_vars, degree);
      Key key;
      std::function<void(int, int)> walk = [&](int start, int remaining) {
        if (remaining == 0) {
          for (Eigen::Index a = 0; a < out.space()->dim(); ++a) {
            out.add_term(key, a, Polynomial::random(n_vars, poly_degree, rng, scale));
          }
          return;
        }
        for (int v = start; v <= n_vars - remaining; ++v) {
          key.push_back(v);
          walk(v + 1, remaining - 1);
          key.pop_back();
        }
      };
      if (degree <= n_vars) walk(0, degree);
      return out;
    }

  private:
    void check_compatible(const Form & o) const
    {
      if (m_space != o.m_space || m_n != o.m_n || m_deg != o.m_deg) {
        throw DimensionMismatch("form sum over mismatched space/degree");
      }
    }

    std::shared_ptr<const ValueSpace> m_space;
    int m_n = 0;
    int m_deg = 0;
    std::map<Key, std::vector<Polynomial>> m_comp;
  };

  /// Max-norm difference of coefficients; forms must share space and degree.
  inline double max_coeff_distance(const Form & a, const Form & b)
  {
    Form diff = a - b;
    return diff.max_abs_coeff();
  }

  /// Triple wedge K^a ^ M^b ^ psi^c valued in X_a |> (X_b |> Z_c): the
  /// composite-action extension used when a matrix-product form acts on an
  /// h- or l-valued form.
  inline Form acted_product_wedge(const Form & K, const Form & M, const Form & psi,
                                  const Pairing & act)
  {
    Form inner = M.wedge(psi, act);
    return K.wedge(inner, act);
  }

} // namespace g3

#endif
