#ifndef G3_CORE_HPP
#define G3_CORE_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

/// \file core.hpp
/// Matrix Lie algebras and Lie groups with exact arithmetic on nilpotent
/// instances: basis projection, brackets, exp/log, adjoint actions and a
/// deterministic random source shared by every sampling routine.

namespace g3
{

  using Mat = Eigen::MatrixXd;
  using Vec = Eigen::VectorXd;

  //------------------------------------------------------------------------
  // Errors
  //------------------------------------------------------------------------

  /// Base class of every error thrown by the library.
  struct Error : std::runtime_error
  {
    using std::runtime_error::runtime_error;
  };

  /// A matrix could not be expressed in the requested basis within tolerance.
  struct ProjectionError : Error
  {
    using Error::Error;
  };

  /// Operands live in incompatible spaces (different algebra, size or degree).
  struct DimensionMismatch : Error
  {
    using Error::Error;
  };

  /// Exterior derivative requested on a form that already has top degree.
  struct TopDegreeError : Error
  {
    using Error::Error;
  };

  /// A composite of transformations disagrees with its closed form.
  struct CompositionMismatch : Error
  {
    using Error::Error;
  };

  /// Sources and targets along a chain of arrows fail to match up.
  struct ChainBroken : Error
  {
    using Error::Error;
  };

  /// Invalid or inconsistent configuration input.
  struct ConfigError : Error
  {
    using Error::Error;
  };

  //------------------------------------------------------------------------
  // Deterministic random source
  //------------------------------------------------------------------------

  /// Seeded random source used by every sampling routine in the library.
  ///
  /// Built on std::mt19937_64 (whose output sequence is fixed by the
  /// standard) with an explicit 53-bit mapping to doubles, so identical
  /// seeds produce identical samples on every platform.
  class Rng
  {
  public:
    explicit Rng(std::uint64_t seed = 0) : m_engine(seed) {}

    /// Uniform double in [0, 1).
    double uniform()
    {
      return static_cast<double>(m_engine() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi)
    {
      return lo + (hi - lo) * uniform();
    }

    /// Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n)
    {
      return m_engine() % n;
    }

    /// Coordinate vector with entries uniform in [-scale, scale].
    Vec coords(Eigen::Index dim, double scale = 1.0)
    {
      Vec v(dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        v[i] = uniform(-scale, scale);
      }
      return v;
    }

  private:
    std::mt19937_64 m_engine;
  };

  //------------------------------------------------------------------------
  // Lie algebras
  //------------------------------------------------------------------------

  class LieAlgebra;

  /// Element of a Lie algebra, stored by coordinates in the algebra basis.
  struct AlgebraElement
  {
    const LieAlgebra * algebra = nullptr;
    Vec coords;

    Mat matrix() const;
    double norm() const { return coords.size() ? coords.lpNorm<Eigen::Infinity>() : 0.0; }
  };

  /// Finite-dimensional Lie algebra presented by a basis of real matrices.
  ///
  /// Structure constants are recovered from matrix commutators; elements are
  /// handled by coordinates and projected back through a pre-factored least
  /// squares solve whose residual is gated (non-closure is an error, not a
  /// silent approximation).
  class LieAlgebra
  {
  public:
    /// Residual gate for expressing a matrix in the algebra basis.
    static constexpr double projection_tolerance = 1e-10;

    LieAlgebra() = default;

    /// \param name          identifier used in reports and serialization
    /// \param matrix_size   size of the square matrices realizing the algebra
    /// \param basis         linearly independent basis matrices
    /// \param nilpotency    smallest q with X1*...*Xq = 0 for all products of
    ///                      basis matrices, or 0 when no such q exists; when
    ///                      positive, exp/log are exact terminating series
    LieAlgebra(std::string name, int matrix_size, std::vector<Mat> basis, int nilpotency = 0)
      : m_name(std::move(name)),
        m_matrix_size(matrix_size),
        m_basis(std::move(basis)),
        m_nilpotency(nilpotency)
    {
      const Eigen::Index d = dim();
      Mat stacked(static_cast<Eigen::Index>(matrix_size) * matrix_size, d);
      for (Eigen::Index a = 0; a < d; ++a) {
        if (m_basis[a].rows() != matrix_size || m_basis[a].cols() != matrix_size) {
          throw DimensionMismatch("basis matrix size mismatch in algebra " + m_name);
        }
        stacked.col(a) = Eigen::Map<const Vec>(m_basis[a].data(), stacked.rows());
      }
      m_stacked = stacked;
      if (d > 0) {
        m_solver.compute(stacked);
        if (m_solver.rank() < d) {
          throw ProjectionError("basis of algebra " + m_name + " is not linearly independent");
        }
      }
      // Structure constants: ad_[a](c,b) is the c-coordinate of [X_a, X_b].
      m_ad.resize(static_cast<std::size_t>(d), Mat::Zero(d, d));
      for (Eigen::Index a = 0; a < d; ++a) {
        for (Eigen::Index b = 0; b < d; ++b) {
          Mat comm = m_basis[a] * m_basis[b] - m_basis[b] * m_basis[a];
          m_ad[a].col(b) = project(comm);
        }
      }
    }

    const std::string & name() const { return m_name; }
    int matrix_size() const { return m_matrix_size; }
    Eigen::Index dim() const { return static_cast<Eigen::Index>(m_basis.size()); }
    const std::vector<Mat> & basis() const { return m_basis; }
    int nilpotency() const { return m_nilpotency; }

    /// Coordinates of a matrix known to lie in the algebra span.
    /// \throws ProjectionError when the relative residual exceeds the gate.
    Vec project(const Mat & m) const
    {
      if (dim() == 0) {
        double scale = std::max(1.0, m.lpNorm<Eigen::Infinity>());
        if (m.lpNorm<Eigen::Infinity>() > projection_tolerance * scale) {
          throw ProjectionError("nonzero matrix projected onto trivial algebra " + m_name);
        }
        return Vec(0);
      }
      Vec rhs = Eigen::Map<const Vec>(m.data(), m.size());
      Vec c = m_solver.solve(rhs);
      double scale = std::max(1.0, rhs.lpNorm<Eigen::Infinity>());
      double residual = (m_stacked * c - rhs).lpNorm<Eigen::Infinity>();
      if (residual > projection_tolerance * scale) {
        throw ProjectionError("projection residual " + std::to_string(residual)
                              + " onto algebra " + m_name + " exceeds gate");
      }
      return c;
    }

    /// Element from coordinates.
    AlgebraElement element(Vec coords) const
    {
      if (coords.size() != dim()) {
        throw DimensionMismatch("coordinate size mismatch in algebra " + m_name);
      }
      return AlgebraElement{this, std::move(coords)};
    }

    /// Element from a matrix in the algebra span.
    AlgebraElement element(const Mat & m) const { return AlgebraElement{this, project(m)}; }

    /// Zero element.
    AlgebraElement zero() const { return AlgebraElement{this, Vec::Zero(dim())}; }

    /// Matrix realization from coordinates.
    Mat matrix_of(const Vec & coords) const
    {
      Mat m = Mat::Zero(m_matrix_size, m_matrix_size);
      for (Eigen::Index a = 0; a < dim(); ++a) {
        m += coords[a] * m_basis[a];
      }
      return m;
    }

    /// Lie bracket in coordinates, via the precomputed structure constants.
    Vec bracket_coords(const Vec & u, const Vec & v) const
    {
      Vec out = Vec::Zero(dim());
      for (Eigen::Index a = 0; a < dim(); ++a) {
        if (u[a] != 0.0) {
          out += u[a] * (m_ad[a] * v);
        }
      }
      return out;
    }

    /// Matrix of ad(u) acting on coordinates.
    Mat ad(const Vec & u) const
    {
      Mat out = Mat::Zero(dim(), dim());
      for (Eigen::Index a = 0; a < dim(); ++a) {
        out += u[a] * m_ad[a];
      }
      return out;
    }

    /// Random element with coordinates uniform in [-scale, scale].
    AlgebraElement random(Rng & rng, double scale = 1.0) const
    {
      return AlgebraElement{this, rng.coords(dim(), scale)};
    }

  private:
    std::string m_name;
    int m_matrix_size = 1;
    std::vector<Mat> m_basis;
    int m_nilpotency = 0;
    Mat m_stacked;
    Eigen::ColPivHouseholderQR<Mat> m_solver;
    std::vector<Mat> m_ad;
  };

  inline Mat AlgebraElement::matrix() const { return algebra->matrix_of(coords); }

  /// Lie bracket of two elements of the same algebra.
  inline AlgebraElement bracket(const AlgebraElement & u, const AlgebraElement & v)
  {
    if (u.algebra != v.algebra) {
      throw DimensionMismatch("bracket of elements of different algebras");
    }
    return AlgebraElement{u.algebra, u.algebra->bracket_coords(u.coords, v.coords)};
  }

  inline AlgebraElement operator+(const AlgebraElement & u, const AlgebraElement & v)
  {
    if (u.algebra != v.algebra) {
      throw DimensionMismatch("sum of elements of different algebras");
    }
    return AlgebraElement{u.algebra, u.coords + v.coords};
  }

  inline AlgebraElement operator-(const AlgebraElement & u, const AlgebraElement & v)
  {
    if (u.algebra != v.algebra) {
      throw DimensionMismatch("difference of elements of different algebras");
    }
    return AlgebraElement{u.algebra, u.coords - v.coords};
  }

  inline AlgebraElement operator*(double s, const AlgebraElement & u)
  {
    return AlgebraElement{u.algebra, s * u.coords};
  }

  //------------------------------------------------------------------------
  // Matrix exponentials and logarithms
  //------------------------------------------------------------------------

  /// Matrix exponential; exact terminating series when the algebra is
  /// realized by nilpotent matrices, Pade-based otherwise.
  inline Mat matrix_exp(const Mat & m, int nilpotency)
  {
    if (nilpotency > 0) {
      Mat out = Mat::Identity(m.rows(), m.cols());
      Mat term = Mat::Identity(m.rows(), m.cols());
      for (int k = 1; k < nilpotency; ++k) {
        term = (term * m) / static_cast<double>(k);
        out += term;
      }
      return out;
    }
    return m.exp();
  }

  /// Matrix logarithm of an invertible matrix; exact terminating series when
  /// the matrix is unipotent with the given nilpotency degree.
  inline Mat matrix_log(const Mat & m, int nilpotency)
  {
    if (nilpotency > 0) {
      Mat n = m - Mat::Identity(m.rows(), m.cols());
      Mat out = Mat::Zero(m.rows(), m.cols());
      Mat term = Mat::Identity(m.rows(), m.cols());
      for (int k = 1; k < nilpotency; ++k) {
        term = term * n;
        out += (k % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(k) * term;
      }
      return out;
    }
    return m.log();
  }

  //------------------------------------------------------------------------
  // Lie groups
  //------------------------------------------------------------------------

  class LieGroup;

  /// Element of a matrix Lie group.
  struct GroupElement
  {
    const LieGroup * group = nullptr;
    Mat m;
  };

  /// Matrix Lie group attached to a matrix Lie algebra.
  class LieGroup
  {
  public:
    LieGroup() = default;

    /// \param algebra     the Lie algebra, shared between group and algebra ops
    /// \param membership  optional predicate characterizing group matrices
    LieGroup(std::shared_ptr<const LieAlgebra> algebra,
             std::function<bool(const Mat &)> membership = nullptr)
      : m_algebra(std::move(algebra)), m_membership(std::move(membership))
    {
    }

    const LieAlgebra & algebra() const { return *m_algebra; }
    std::shared_ptr<const LieAlgebra> algebra_ptr() const { return m_algebra; }
    int matrix_size() const { return m_algebra->matrix_size(); }

    GroupElement identity() const
    {
      return GroupElement{this, Mat::Identity(matrix_size(), matrix_size())};
    }

    GroupElement element(Mat m) const
    {
      if (m_membership && !m_membership(m)) {
        throw DimensionMismatch("matrix fails membership predicate of group over "
                                + m_algebra->name());
      }
      return GroupElement{this, std::move(m)};
    }

    /// Group exponential of an algebra element.
    GroupElement exp(const AlgebraElement & u) const
    {
      return GroupElement{this, matrix_exp(u.matrix(), m_algebra->nilpotency())};
    }

    /// Group logarithm, landing back in the algebra.
    AlgebraElement log(const GroupElement & g) const
    {
      return m_algebra->element(matrix_log(g.m, m_algebra->nilpotency()));
    }

    /// Random group element exp(u) with u a random algebra element.
    GroupElement random(Rng & rng, double scale = 1.0) const
    {
      return exp(m_algebra->random(rng, scale));
    }

    /// Adjoint action Ad_g on algebra coordinates.
    Mat Ad(const GroupElement & g) const
    {
      const Eigen::Index d = m_algebra->dim();
      Mat out(d, d);
      Mat ginv = g.m.inverse();
      for (Eigen::Index a = 0; a < d; ++a) {
        out.col(a) = m_algebra->project(g.m * m_algebra->basis()[a] * ginv);
      }
      return out;
    }

  private:
    std::shared_ptr<const LieAlgebra> m_algebra;
    std::function<bool(const Mat &)> m_membership;
  };

  inline GroupElement operator*(const GroupElement & a, const GroupElement & b)
  {
    if (a.group != b.group) {
      throw DimensionMismatch("product of elements of different groups");
    }
    return GroupElement{a.group, a.m * b.m};
  }

  inline GroupElement inverse(const GroupElement & g)
  {
    return GroupElement{g.group, g.m.inverse()};
  }

  /// Conjugation a b a^{-1}.
  inline GroupElement conj(const GroupElement & a, const GroupElement & b)
  {
    return GroupElement{a.group, a.m * b.m * a.m.inverse()};
  }

  /// Distance to the identity, used to express "this element is trivial".
  inline double deviation_from_identity(const GroupElement & g)
  {
    return (g.m - Mat::Identity(g.m.rows(), g.m.cols())).lpNorm<Eigen::Infinity>();
  }

  /// Max-norm distance between two group elements.
  inline double distance(const GroupElement & a, const GroupElement & b)
  {
    return (a.m - b.m).lpNorm<Eigen::Infinity>();
  }

  /// Max-norm distance between two algebra elements.
  inline double distance(const AlgebraElement & a, const AlgebraElement & b)
  {
    return (a.coords - b.coords).lpNorm<Eigen::Infinity>();
  }

} // namespace g3

#endif
