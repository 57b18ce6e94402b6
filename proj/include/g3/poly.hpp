#ifndef G3_POLY_HPP
#define G3_POLY_HPP

#include "core.hpp"

#include <map>

/// \file poly.hpp
/// Multivariate polynomials with exact coefficient arithmetic, used as the
/// coefficient ring of differential forms so algebraic identities can be
/// verified coefficient-by-coefficient instead of only at sample points.

namespace g3
{

  /// Polynomial in n variables, stored sparsely as exponent-vector -> coefficient.
  class Polynomial
  {
  public:
    using Key = std::vector<int>;

    Polynomial() = default;
    explicit Polynomial(int n_vars) : m_n(n_vars) {}

    /// Constant polynomial.
    static Polynomial constant(int n_vars, double c)
    {
      Polynomial p(n_vars);
      if (c != 0.0) p.m_terms[Key(static_cast<std::size_t>(n_vars), 0)] = c;
      return p;
    }

    /// The coordinate monomial x_i.
    static Polynomial variable(int n_vars, int i)
    {
      Polynomial p(n_vars);
      Key k(static_cast<std::size_t>(n_vars), 0);
      k[static_cast<std::size_t>(i)] = 1;
      p.m_terms[k] = 1.0;
      return p;
    }

    int n_vars() const { return m_n; }
    const std::map<Key, double> & terms() const { return m_terms; }
    bool is_zero() const { return m_terms.empty(); }

    void add_term(const Key & k, double c)
    {
      double & slot = m_terms[k];
      slot += c;
      if (slot == 0.0) m_terms.erase(k);
    }

    Polynomial & operator+=(const Polynomial & o)
    {
      for (const auto & [k, c] : o.m_terms) add_term(k, c);
      return *this;
    }

    Polynomial & operator-=(const Polynomial & o)
    {
      for (const auto & [k, c] : o.m_terms) add_term(k, -c);
      return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial & b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial & b) { return a -= b; }

    friend Polynomial operator*(const Polynomial & a, const Polynomial & b)
    {
      Polynomial out(a.m_n);
      for (const auto & [ka, ca] : a.m_terms) {
        for (const auto & [kb, cb] : b.m_terms) {
          Key k = ka;
          for (std::size_t i = 0; i < k.size(); ++i) k[i] += kb[i];
          out.add_term(k, ca * cb);
        }
      }
      return out;
    }

    friend Polynomial operator*(double s, const Polynomial & a)
    {
      Polynomial out(a.m_n);
      if (s != 0.0) {
        for (const auto & [k, c] : a.m_terms) out.m_terms[k] = s * c;
      }
      return out;
    }

    /// Partial derivative with respect to x_i.
    Polynomial derivative(int i) const
    {
      Polynomial out(m_n);
      for (const auto & [k, c] : m_terms) {
        int e = k[static_cast<std::size_t>(i)];
        if (e > 0) {
          Key kd = k;
          kd[static_cast<std::size_t>(i)] = e - 1;
          out.add_term(kd, c * e);
        }
      }
      return out;
    }

    double evaluate(const Vec & x) const
    {
      double out = 0.0;
      for (const auto & [k, c] : m_terms) {
        double t = c;
        for (std::size_t i = 0; i < k.size(); ++i) {
          for (int e = 0; e < k[i]; ++e) t *= x[static_cast<Eigen::Index>(i)];
        }
        out += t;
      }
      return out;
    }

    /// Largest absolute coefficient.
    double max_abs_coeff() const
    {
      double out = 0.0;
      for (const auto & [k, c] : m_terms) out = std::max(out, std::abs(c));
      return out;
    }

    /// Random polynomial of total degree <= max_degree with a few terms.
    static Polynomial random(int n_vars, int max_degree, Rng & rng, double scale = 1.0)
    {
      Polynomial p(n_vars);
      int terms = 1 + static_cast<int>(rng.index(3));
      for (int t = 0; t < terms; ++t) {
        Key k(static_cast<std::size_t>(n_vars), 0);
        int deg = static_cast<int>(rng.index(static_cast<std::uint64_t>(max_degree) + 1));
        for (int d = 0; d < deg; ++d) {
          k[rng.index(static_cast<std::uint64_t>(n_vars))] += 1;
        }
        p.add_term(k, rng.uniform(-scale, scale));
      }
      return p;
    }

  private:
    int m_n = 0;
    std::map<Key, double> m_terms;
  };

} // namespace g3

#endif
