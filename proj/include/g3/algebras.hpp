#ifndef G3_ALGEBRAS_HPP
#define G3_ALGEBRAS_HPP

#include "core.hpp"

/// \file algebras.hpp
/// Stock matrix Lie algebras and groups: trivial, abelian (in a unipotent
/// realization that keeps exp/log exact), Heisenberg, upper-triangular, and
/// block-diagonal direct sums used by product constructions.

namespace g3
{

  /// Zero-dimensional algebra realized by 1x1 matrices.
  inline std::shared_ptr<const LieAlgebra> trivial_algebra()
  {
    return std::make_shared<LieAlgebra>("trivial", 1, std::vector<Mat>{}, 1);
  }

  /// Abelian R^n realized by nilpotent "first row" matrices c -> sum c_i E_{1,i+1}
  /// inside (n+1)x(n+1); all products of basis elements vanish, so exp/log are
  /// the exact one-term series.
  inline std::shared_ptr<const LieAlgebra> abelian_algebra(int n)
  {
    std::vector<Mat> basis;
    for (int i = 0; i < n; ++i) {
      Mat b = Mat::Zero(n + 1, n + 1);
      b(0, i + 1) = 1.0;
      basis.push_back(b);
    }
    return std::make_shared<LieAlgebra>("abelian" + std::to_string(n), n + 1,
                                        std::move(basis), 2);
  }

  /// Heisenberg algebra: strictly upper triangular 3x3 matrices.
  inline std::shared_ptr<const LieAlgebra> heisenberg_algebra()
  {
    Mat x = Mat::Zero(3, 3), y = Mat::Zero(3, 3), z = Mat::Zero(3, 3);
    x(0, 1) = 1.0;
    y(1, 2) = 1.0;
    z(0, 2) = 1.0;
    return std::make_shared<LieAlgebra>("heisenberg", 3, std::vector<Mat>{x, y, z}, 3);
  }

  /// Strictly upper triangular nxn matrices (nilpotency class n-1).
  inline std::shared_ptr<const LieAlgebra> strict_upper_algebra(int n)
  {
    std::vector<Mat> basis;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        Mat b = Mat::Zero(n, n);
        b(i, j) = 1.0;
        basis.push_back(b);
      }
    }
    return std::make_shared<LieAlgebra>("strict_upper" + std::to_string(n), n,
                                        std::move(basis), n);
  }

  /// Full upper triangular 3x3 matrices (Borel algebra, not nilpotent).
  inline std::shared_ptr<const LieAlgebra> upper_triangular3_algebra()
  {
    std::vector<Mat> basis;
    for (int i = 0; i < 3; ++i) {
      for (int j = i; j < 3; ++j) {
        Mat b = Mat::Zero(3, 3);
        b(i, j) = 1.0;
        basis.push_back(b);
      }
    }
    return std::make_shared<LieAlgebra>("upper_triangular3", 3, std::move(basis), 0);
  }

  /// Block-diagonal direct sum of two matrix Lie algebras.
  inline std::shared_ptr<const LieAlgebra> direct_sum(
      const std::shared_ptr<const LieAlgebra> & a,
      const std::shared_ptr<const LieAlgebra> & b)
  {
    const int na = a->matrix_size(), nb = b->matrix_size();
    std::vector<Mat> basis;
    for (const Mat & m : a->basis()) {
      Mat e = Mat::Zero(na + nb, na + nb);
      e.topLeftCorner(na, na) = m;
      basis.push_back(e);
    }
    for (const Mat & m : b->basis()) {
      Mat e = Mat::Zero(na + nb, na + nb);
      e.bottomRightCorner(nb, nb) = m;
      basis.push_back(e);
    }
    int nil = 0;
    if (a->nilpotency() > 0 && b->nilpotency() > 0) {
      nil = std::max(a->nilpotency(), b->nilpotency());
    }
    return std::make_shared<LieAlgebra>(a->name() + "+" + b->name(), na + nb,
                                        std::move(basis), nil);
  }

  /// Group of invertible matrices over an algebra (no extra membership test).
  inline std::shared_ptr<const LieGroup> group_over(std::shared_ptr<const LieAlgebra> alg)
  {
    return std::make_shared<LieGroup>(std::move(alg));
  }

  /// Top-left block of a block-diagonal matrix.
  inline Mat block_a(const Mat & m, int na) { return m.topLeftCorner(na, na); }

  /// Bottom-right block of a block-diagonal matrix.
  inline Mat block_b(const Mat & m, int nb) { return m.bottomRightCorner(nb, nb); }

  /// Assemble a block-diagonal matrix from two blocks.
  inline Mat block_diag(const Mat & a, const Mat & b)
  {
    Mat m = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
    m.topLeftCorner(a.rows(), a.cols()) = a;
    m.bottomRightCorner(b.rows(), b.cols()) = b;
    return m;
  }

} // namespace g3

#endif
