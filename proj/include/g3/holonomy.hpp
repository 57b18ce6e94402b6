#ifndef G3_HOLONOMY_HPP
#define G3_HOLONOMY_HPP

#include "gauge.hpp"
#include "gray.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <memory>
#include <vector>

/// \file holonomy.hpp
/// Lattice 3-gauge theory on parameter cubes.
///
/// A cube coloring assigns group values to the oriented sub-cells of a
/// parameter square / cube / 4-cube: G-values on edges, H-values on faces and
/// L-values on 3-cells, subject to two compatibility laws (one per level)
/// that make the assignment a consistent piece of Gray-groupoid data.  On a
/// 4-cube the boundary 3-cells compose into a 14-factor L-valued product -
/// the 3-dimensional holonomy - whose fourth mixed derivative recovers the
/// 3-curvature of a connection.  A gauge coloring (vertex, edge and face data
/// of a lax transformation) acts on cube colorings by exact group arithmetic,
/// and the holonomy transforms by conjugation; this covariance holds exactly,
/// independent of any discretization fineness.

namespace g3
{

  struct BadDimension : Error
  {
    using Error::Error;
  };

  struct NotFakeFlat : Error
  {
    using Error::Error;
  };

  struct SubdivisionTooCoarse : Error
  {
    using Error::Error;
  };

  struct InconsistentGauge : Error
  {
    using Error::Error;
  };

  //------------------------------------------------------------------------
  // Cell labels
  //------------------------------------------------------------------------

  /// Label of an oriented sub-cell of the parameter cube: the ascending list
  /// of directions the cell extends along, plus the ascending set of
  /// directions whose coordinate is pinned at its far end (the offset).
  struct CellLabel
  {
    std::vector<int> dirs;
    std::vector<int> offset;

    bool operator<(const CellLabel & o) const
    {
      if (dirs != o.dirs) return dirs < o.dirs;
      return offset < o.offset;
    }
  };

  namespace detail
  {
    inline std::vector<int> sorted(std::vector<int> v)
    {
      std::sort(v.begin(), v.end());
      return v;
    }

    inline std::vector<int> with(std::vector<int> s, int extra)
    {
      s.push_back(extra);
      return sorted(std::move(s));
    }

    inline CellLabel cell(std::vector<int> dirs, std::vector<int> offset)
    {
      return CellLabel{sorted(std::move(dirs)), sorted(std::move(offset))};
    }
  } // namespace detail

  //------------------------------------------------------------------------
  // Colorings
  //------------------------------------------------------------------------

  /// Group-valued coloring of the cells of a parameter cube of dimension 2,
  /// 3 or 4: edge values in G, face values in H, 3-cell values in L.
  class CubeColoring
  {
  public:
    int dimension = 0;
    std::shared_ptr<const TwoCrossedModule> mod;
    std::map<CellLabel, GroupElement> edge_values;
    std::map<CellLabel, GroupElement> face_values;
    std::map<CellLabel, GroupElement> cube_values;

    CubeColoring() = default;

    CubeColoring(std::shared_ptr<const TwoCrossedModule> m, int dim)
      : dimension(dim), mod(std::move(m))
    {
      if (dim < 2 || dim > 4) {
        throw BadDimension("coloring dimension must be 2, 3 or 4");
      }
    }

    /// Identity coloring: every cell carries the unit of its group.
    static CubeColoring identity(std::shared_ptr<const TwoCrossedModule> m, int dim)
    {
      CubeColoring c(std::move(m), dim);
      c.visit_cells([&c](const CellLabel & lab) {
        switch (lab.dirs.size()) {
          case 1: c.edge_values.emplace(lab, c.mod->G->identity()); break;
          case 2: c.face_values.emplace(lab, c.mod->H->identity()); break;
          default: c.cube_values.emplace(lab, c.mod->L->identity()); break;
        }
      });
      return c;
    }

    /// Enumerate all cell labels of the cube in a fixed order.
    template <typename Fn>
    void visit_cells(Fn && fn) const
    {
      std::vector<int> all(static_cast<std::size_t>(dimension));
      for (int i = 0; i < dimension; ++i) all[static_cast<std::size_t>(i)] = i + 1;
      auto rest_subsets = [&](const std::vector<int> & used, auto && cb) {
        std::vector<int> rest;
        for (int d : all)
          if (std::find(used.begin(), used.end(), d) == used.end()) rest.push_back(d);
        const std::size_t n = rest.size();
        for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
          std::vector<int> s;
          for (std::size_t b = 0; b < n; ++b)
            if (mask & (std::size_t{1} << b)) s.push_back(rest[b]);
          cb(std::move(s));
        }
      };
      for (int i : all) {
        rest_subsets({i}, [&](std::vector<int> s) { fn(detail::cell({i}, std::move(s))); });
      }
      for (int i : all) {
        for (int j : all) {
          if (j <= i) continue;
          rest_subsets({i, j},
                       [&](std::vector<int> s) { fn(detail::cell({i, j}, std::move(s))); });
        }
      }
      if (dimension >= 3) {
        for (int i : all)
          for (int j : all)
            for (int k : all) {
              if (!(i < j && j < k)) continue;
              rest_subsets({i, j, k}, [&](std::vector<int> s) {
                fn(detail::cell({i, j, k}, std::move(s)));
              });
            }
      }
    }

    const GroupElement & f(int i, std::vector<int> offset) const
    {
      return at(edge_values, detail::cell({i}, std::move(offset)), "edge");
    }

    const GroupElement & F(int i, int j, std::vector<int> offset) const
    {
      return at(face_values, detail::cell({i, j}, std::move(offset)), "face");
    }

    const GroupElement & k(int i, int j, int kk, std::vector<int> offset) const
    {
      return at(cube_values, detail::cell({i, j, kk}, std::move(offset)), "3-cell");
    }

    /// Ordered product of the base-path edges f^{x1} f^{x2;x1} ... along the
    /// main diagonal staircase of the cube.
    GroupElement base_path() const
    {
      GroupElement out = mod->G->identity();
      std::vector<int> off;
      for (int i = 1; i <= dimension; ++i) {
        out = out * f(i, off);
        off = detail::with(off, i);
      }
      return out;
    }

    /// Face compatibility defect: for each face, the gap between the two
    /// boundary paths after absorbing the face value through alpha.
    double face_residual() const
    {
      double worst = 0.0;
      for (const auto & [lab, Fv] : face_values) {
        int i = lab.dirs[0], j = lab.dirs[1];
        GroupElement lhs = f(i, lab.offset) * f(j, detail::with(lab.offset, i));
        GroupElement rhs = mod->alpha(Fv)
                           * (f(j, lab.offset) * f(i, detail::with(lab.offset, j)));
        worst = std::max(worst, distance(lhs, rhs));
      }
      return worst;
    }

    /// H-value of the lower (side = -1) or upper (side = +1) boundary
    /// composite of the 3-cell spanned by i < j < k at a given offset.
    GroupElement side_value(int i, int j, int kk, const std::vector<int> & offset,
                            int side) const
    {
      if (side < 0) {
        return mod->act_h(f(i, offset), F(j, kk, detail::with(offset, i)))
               * F(i, kk, offset)
               * mod->act_h(f(kk, offset), F(i, j, detail::with(offset, kk)));
      }
      return F(i, j, offset)
             * mod->act_h(f(j, offset), F(i, kk, detail::with(offset, j)))
             * F(j, kk, offset);
    }

    /// 3-cell compatibility defect: the gap between the upper boundary
    /// composite and the lower one twisted by delta of the cell value.
    double cube_residual() const
    {
      double worst = 0.0;
      for (const auto & [lab, kv] : cube_values) {
        int i = lab.dirs[0], j = lab.dirs[1], kk = lab.dirs[2];
        GroupElement lower = side_value(i, j, kk, lab.offset, -1);
        GroupElement upper = side_value(i, j, kk, lab.offset, +1);
        worst = std::max(worst, distance(upper, inverse(mod->delta(kv)) * lower));
      }
      return worst;
    }

  private:
    static const GroupElement & at(const std::map<CellLabel, GroupElement> & m,
                                   const CellLabel & lab, const char * what)
    {
      auto it = m.find(lab);
      if (it == m.end()) throw BadDimension(std::string("missing ") + what + " value");
      return it->second;
    }
  };

  /// Cell data of a lax transformation between two colorings: vertex values
  /// in G, edge values in H, face values in L.  The cells are labelled like
  /// those of the underlying cube.
  class GaugeColoring
  {
  public:
    int dimension = 0;
    std::shared_ptr<const TwoCrossedModule> mod;
    std::map<CellLabel, GroupElement> vertex_values;
    std::map<CellLabel, GroupElement> edge_values;
    std::map<CellLabel, GroupElement> face_values;

    GaugeColoring() = default;

    GaugeColoring(std::shared_ptr<const TwoCrossedModule> m, int dim)
      : dimension(dim), mod(std::move(m))
    {
      if (dim < 2 || dim > 4) {
        throw BadDimension("gauge coloring dimension must be 2, 3 or 4");
      }
    }

    const GroupElement & g(std::vector<int> offset) const
    {
      return at(vertex_values, detail::cell({}, std::move(offset)), "vertex");
    }

    const GroupElement & h(int i, std::vector<int> offset) const
    {
      return at(edge_values, detail::cell({i}, std::move(offset)), "edge");
    }

    const GroupElement & k(int i, int j, std::vector<int> offset) const
    {
      return at(face_values, detail::cell({i, j}, std::move(offset)), "face");
    }

    static GaugeColoring trivial(std::shared_ptr<const TwoCrossedModule> m, int dim)
    {
      return build(std::move(m), dim, [](const GaugeColoring & gc, const CellLabel & lab) {
        switch (lab.dirs.size()) {
          case 0: return gc.mod->G->identity();
          case 1: return gc.mod->H->identity();
          default: return gc.mod->L->identity();
        }
      });
    }

    /// Gauge data with a single constant vertex value and trivial higher
    /// cells; the induced action on colorings is plain conjugation.
    static GaugeColoring constant(std::shared_ptr<const TwoCrossedModule> m, int dim,
                                  const GroupElement & g0)
    {
      return build(std::move(m), dim, [&g0](const GaugeColoring & gc, const CellLabel & lab) {
        switch (lab.dirs.size()) {
          case 0: return g0;
          case 1: return gc.mod->H->identity();
          default: return gc.mod->L->identity();
        }
      });
    }

    /// Unconstrained random gauge data; the cells of a lax transformation on
    /// a free cube complex carry no relations among themselves.
    static GaugeColoring random(std::shared_ptr<const TwoCrossedModule> m, int dim,
                                Rng & rng, double scale = 0.5)
    {
      return build(std::move(m), dim,
                   [&rng, scale](const GaugeColoring & gc, const CellLabel & lab) {
                     switch (lab.dirs.size()) {
                       case 0: return gc.mod->G->random(rng, scale);
                       case 1: return gc.mod->H->random(rng, scale);
                       default: return gc.mod->L->random(rng, scale);
                     }
                   });
    }

  private:
    template <typename Fn>
    static GaugeColoring build(std::shared_ptr<const TwoCrossedModule> m, int dim, Fn && fn)
    {
      GaugeColoring gc(std::move(m), dim);
      std::vector<int> all(static_cast<std::size_t>(dim));
      for (int i = 0; i < dim; ++i) all[static_cast<std::size_t>(i)] = i + 1;
      auto subsets_avoiding = [&](const std::vector<int> & used, auto && cb) {
        std::vector<int> rest;
        for (int d : all)
          if (std::find(used.begin(), used.end(), d) == used.end()) rest.push_back(d);
        for (std::size_t mask = 0; mask < (std::size_t{1} << rest.size()); ++mask) {
          std::vector<int> s;
          for (std::size_t b = 0; b < rest.size(); ++b)
            if (mask & (std::size_t{1} << b)) s.push_back(rest[b]);
          cb(std::move(s));
        }
      };
      subsets_avoiding({}, [&](std::vector<int> s) {
        CellLabel lab = detail::cell({}, std::move(s));
        gc.vertex_values.emplace(lab, fn(gc, lab));
      });
      for (int i : all) {
        subsets_avoiding({i}, [&](std::vector<int> s) {
          CellLabel lab = detail::cell({i}, std::move(s));
          gc.edge_values.emplace(lab, fn(gc, lab));
        });
      }
      for (int i : all)
        for (int j : all) {
          if (j <= i) continue;
          subsets_avoiding({i, j}, [&](std::vector<int> s) {
            CellLabel lab = detail::cell({i, j}, std::move(s));
            gc.face_values.emplace(lab, fn(gc, lab));
          });
        }
      return gc;
    }

    static const GroupElement & at(const std::map<CellLabel, GroupElement> & m,
                                   const CellLabel & lab, const char * what)
    {
      auto it = m.find(lab);
      if (it == m.end()) throw BadDimension(std::string("missing gauge ") + what + " value");
      return it->second;
    }
  };

  //------------------------------------------------------------------------
  // Pasting expressions for 2-cells
  //------------------------------------------------------------------------

  /// A lattice 1-path: a list of (direction, offset) edges in path order.
  using LatticePath = std::vector<std::pair<int, std::vector<int>>>;

  /// Expression tree for a pasting of face 2-cells: faces, vertical
  /// composites, and left/right edge-path whiskers.  The same tree is
  /// evaluated both as a Gray-groupoid 2-arrow on a coloring and as the
  /// L-component of a lax transformation applied to the pasting.
  struct Paste2
  {
    enum class Kind { face, vcomp, whisk_left, whisk_right };

    Kind kind = Kind::face;
    int i = 0, j = 0;
    std::vector<int> offset;
    std::shared_ptr<const Paste2> a, b; // vcomp children / whisker body in a
    LatticePath path;                   // whisker path
  };

  using Paste2Ptr = std::shared_ptr<const Paste2>;

  inline Paste2Ptr paste_face(int i, int j, std::vector<int> offset)
  {
    auto p = std::make_shared<Paste2>();
    p->kind = Paste2::Kind::face;
    p->i = i;
    p->j = j;
    p->offset = detail::sorted(std::move(offset));
    return p;
  }

  inline Paste2Ptr paste_vcomp(Paste2Ptr a, Paste2Ptr b)
  {
    auto p = std::make_shared<Paste2>();
    p->kind = Paste2::Kind::vcomp;
    p->a = std::move(a);
    p->b = std::move(b);
    return p;
  }

  inline Paste2Ptr paste_whisk_left(LatticePath path, Paste2Ptr body)
  {
    auto p = std::make_shared<Paste2>();
    p->kind = Paste2::Kind::whisk_left;
    p->path = std::move(path);
    p->a = std::move(body);
    return p;
  }

  inline Paste2Ptr paste_whisk_right(Paste2Ptr body, LatticePath path)
  {
    auto p = std::make_shared<Paste2>();
    p->kind = Paste2::Kind::whisk_right;
    p->path = std::move(path);
    p->a = std::move(body);
    return p;
  }

  /// 2-arrow carried by a single face: source path runs along i then j, the
  /// target path (reached through alpha) along j then i.
  inline Arrow2 face_arrow(const CubeColoring & c, int i, int j,
                           const std::vector<int> & offset)
  {
    return Arrow2{c.f(i, offset) * c.f(j, detail::with(offset, i)), c.F(i, j, offset)};
  }

  /// Ordered product of coloring edges along a lattice path.
  inline GroupElement path_value(const CubeColoring & c, const LatticePath & path)
  {
    GroupElement out = c.mod->G->identity();
    for (const auto & [dir, off] : path) out = out * c.f(dir, off);
    return out;
  }

  /// Evaluate a pasting expression as a Gray-groupoid 2-arrow over a
  /// coloring.  Composability of every junction is enforced by the groupoid.
  inline Arrow2 eval_paste(const GrayGroupoid & gray, const CubeColoring & c,
                           const Paste2Ptr & node)
  {
    switch (node->kind) {
      case Paste2::Kind::face: return face_arrow(c, node->i, node->j, node->offset);
      case Paste2::Kind::vcomp:
        return gray.compose1(eval_paste(gray, c, node->a), eval_paste(gray, c, node->b));
      case Paste2::Kind::whisk_left:
        return gray.compose0(path_value(c, node->path), eval_paste(gray, c, node->a));
      case Paste2::Kind::whisk_right:
      default:
        return gray.compose0(eval_paste(gray, c, node->a), path_value(c, node->path));
    }
  }

  /// 1-source of a pasting expression as an explicit edge list.
  inline LatticePath paste_source_path(const Paste2Ptr & node)
  {
    switch (node->kind) {
      case Paste2::Kind::face:
        return {{node->i, node->offset}, {node->j, detail::with(node->offset, node->i)}};
      case Paste2::Kind::vcomp: return paste_source_path(node->a);
      case Paste2::Kind::whisk_left: {
        LatticePath out = node->path;
        LatticePath inner = paste_source_path(node->a);
        out.insert(out.end(), inner.begin(), inner.end());
        return out;
      }
      case Paste2::Kind::whisk_right:
      default: {
        LatticePath out = paste_source_path(node->a);
        out.insert(out.end(), node->path.begin(), node->path.end());
        return out;
      }
    }
  }

  //------------------------------------------------------------------------
  // Boundary composites of a 3-cell
  //------------------------------------------------------------------------

  namespace detail
  {
    /// Composability tolerance matched to the coloring's own compatibility
    /// defect, so approximate (connection-derived) colorings still paste.
    inline double paste_tolerance(const CubeColoring & c)
    {
      return std::max(GrayGroupoid::compose_tolerance,
                      50.0 * std::max(c.face_residual(), c.cube_residual()));
    }
  } // namespace detail

  enum class Side { minus, plus };

  /// Pasting expression of the lower (minus) or upper (plus) boundary
  /// composite of the 3-cell spanned by directions (d1, d2, d3) at an offset.
  inline Paste2Ptr side_paste(int d1, int d2, int d3, const std::vector<int> & off,
                              Side side)
  {
    auto edge = [&off](int dir, std::vector<int> rel) {
      LatticePath p;
      std::vector<int> o = off;
      for (int r : rel) o = detail::with(o, r);
      p.push_back({dir, std::move(o)});
      return p;
    };
    auto face = [&off](int a, int b, std::vector<int> rel) {
      std::vector<int> o = off;
      for (int r : rel) o = detail::with(o, r);
      return paste_face(a, b, std::move(o));
    };
    if (side == Side::minus) {
      return paste_vcomp(
        paste_vcomp(paste_whisk_left(edge(d1, {}), face(d2, d3, {d1})),
                    paste_whisk_right(face(d1, d3, {}), edge(d2, {d1, d3}))),
        paste_whisk_left(edge(d3, {}), face(d1, d2, {d3})));
    }
    return paste_vcomp(
      paste_vcomp(paste_whisk_right(face(d1, d2, {}), edge(d3, {d1, d2})),
                  paste_whisk_left(edge(d2, {}), face(d1, d3, {d2}))),
      paste_whisk_right(face(d2, d3, {}), edge(d1, {d2, d3})));
  }

  /// Boundary composite of a 3-dimensional coloring as a 2-arrow.
  inline Arrow2 sigma_chain(const CubeColoring & c, Side side)
  {
    if (c.dimension != 3) {
      throw BadDimension("boundary composite requires a 3-dimensional coloring");
    }
    GrayGroupoid gray(c.mod, detail::paste_tolerance(c));
    return eval_paste(gray, c, side_paste(1, 2, 3, {}, side));
  }

  //------------------------------------------------------------------------
  // The 13-factor chain
  //------------------------------------------------------------------------

  namespace detail
  {
    /// Abstract data consumed by the 13-factor chain.  The same formulas
    /// evaluate the boundary 3-cells of a 4-cube (transverse direction = the
    /// fourth axis) and the gauge transformation of a 3-cell value
    /// (transverse direction = the gauge layer), so the two callers supply
    /// accessors in a common shape: near-side edges/faces (a, b), far-side
    /// faces (b0) and cube (cube0), and connecting vertex/edge/face data
    /// (v, eh, fk) running across the transverse direction.
    struct ChainData
    {
      const TwoCrossedModule * mod = nullptr;
      std::function<GroupElement(int, std::vector<int>)> a;
      std::function<GroupElement(int, int, std::vector<int>)> b;
      std::function<GroupElement(int, int, std::vector<int>)> b0;
      std::function<GroupElement(std::vector<int>)> v;
      std::function<GroupElement(int, std::vector<int>)> eh;
      std::function<GroupElement(int, int, std::vector<int>)> fk;
      std::function<GroupElement()> cube0;
    };

    /// The six lower-side chain factors (the seventh, the near-side 3-cell
    /// value itself, is appended by the callers).
    inline std::array<GroupElement, 6> chain_minus(const ChainData & d)
    {
      const TwoCrossedModule & m = *d.mod;
      GroupElement a1 = d.a(1, {}), a3 = d.a(3, {});
      GroupElement b23_1 = d.b(2, 3, {1}), b13 = d.b(1, 3, {});
      GroupElement eh2_13 = d.eh(2, {1, 3});

      GroupElement K10 = m.act_h(a1, m.act_h(d.a(2, {1}), d.eh(3, {1, 2})) * d.eh(2, {1}));
      GroupElement p1 =
        m.peiffer(inverse(d.eh(1, {})), m.act_h(a1 * d.v({1}), d.b0(2, 3, {1})));
      GroupElement K1 = m.rhd_prime(K10, m.rhd_prime(d.eh(1, {}), inverse(p1)));

      GroupElement K2 = m.act_l(a1, d.fk(2, 3, {1}));

      GroupElement K3 =
        m.rhd_prime(m.act_h(a1, b23_1 * m.act_h(d.a(3, {1}), eh2_13)), d.fk(1, 3, {}));

      GroupElement p4 = m.peiffer(inverse(b13), m.act_h(a1 * d.a(3, {1}), eh2_13));
      GroupElement K4 = m.rhd_prime(m.act_h(a1, b23_1), m.rhd_prime(b13, p4));

      GroupElement K50 = m.act_h(a1, b23_1) * b13
                         * m.act_h(a3, m.act_h(d.a(1, {3}), eh2_13) * d.eh(1, {3}));
      GroupElement p5 =
        m.peiffer(inverse(d.eh(3, {})), m.act_h(a3 * d.v({3}), d.b0(1, 2, {3})));
      GroupElement K5 = m.rhd_prime(K50, m.rhd_prime(d.eh(3, {}), inverse(p5)));

      GroupElement K6 =
        m.rhd_prime(m.act_h(a1, b23_1) * b13, m.act_l(a3, d.fk(1, 2, {3})));

      return {K1, K2, K3, K4, K5, K6};
    }

    /// The seven upper-side chain factors, the first of which carries the
    /// far-side 3-cell value across the transverse direction.
    inline std::array<GroupElement, 7> chain_plus(const ChainData & d)
    {
      const TwoCrossedModule & m = *d.mod;
      GroupElement a1 = d.a(1, {}), a2 = d.a(2, {});
      GroupElement b12 = d.b(1, 2, {});
      GroupElement eh3_12 = d.eh(3, {1, 2}), eh1_23 = d.eh(1, {2, 3});

      GroupElement h_top = m.act_h(a1, m.act_h(d.a(2, {1}), eh3_12) * d.eh(2, {1}))
                           * d.eh(1, {});
      GroupElement K0 = m.rhd_prime(h_top, m.act_l(d.v({}), d.cube0()));

      GroupElement w1 = m.act_h(a1 * d.a(2, {1}), eh3_12);
      GroupElement K1 = m.rhd_prime(w1, d.fk(1, 2, {}));

      GroupElement K2 = m.rhd_prime(b12, m.peiffer(inverse(b12), w1));

      GroupElement wh3 = b12 * m.act_h(a2, m.act_h(d.a(1, {2}), eh3_12) * d.eh(1, {2}));
      GroupElement p3 =
        m.peiffer(inverse(d.eh(2, {})), m.act_h(a2 * d.v({2}), d.b0(1, 3, {2})));
      GroupElement K3 = m.rhd_prime(wh3, m.rhd_prime(d.eh(2, {}), inverse(p3)));

      GroupElement K4 = m.rhd_prime(b12, m.act_l(a2, d.fk(1, 3, {2})));

      GroupElement wh5 = b12 * m.act_h(a2, d.b(1, 3, {2}) * m.act_h(d.a(3, {2}), eh1_23));
      GroupElement K5 = m.rhd_prime(wh5, d.fk(2, 3, {}));

      GroupElement wh6 = b12 * m.act_h(a2, d.b(1, 3, {2}));
      GroupElement p6 = m.peiffer(inverse(d.b(2, 3, {})), m.act_h(a2 * d.a(3, {2}), eh1_23));
      GroupElement K6 = m.rhd_prime(wh6, m.rhd_prime(d.b(2, 3, {}), p6));

      return {K0, K1, K2, K3, K4, K5, K6};
    }

    /// Chain data for the boundary of a 4-dimensional coloring: directions
    /// (1,2,3) are the cube axes, direction 4 is transverse.
    inline ChainData chain_data_4cube(const CubeColoring & c)
    {
      ChainData d;
      d.mod = c.mod.get();
      d.a = [&c](int i, std::vector<int> rel) { return c.f(i, std::move(rel)); };
      d.b = [&c](int i, int j, std::vector<int> rel) { return c.F(i, j, std::move(rel)); };
      d.b0 = [&c](int i, int j, std::vector<int> rel) {
        return c.F(i, j, with(std::move(rel), 4));
      };
      d.v = [&c](std::vector<int> rel) { return c.f(4, std::move(rel)); };
      d.eh = [&c](int i, std::vector<int> rel) { return c.F(i, 4, std::move(rel)); };
      d.fk = [&c](int i, int j, std::vector<int> rel) {
        return c.k(i, j, 4, std::move(rel));
      };
      d.cube0 = [&c]() { return c.k(1, 2, 3, {4}); };
      return d;
    }
  } // namespace detail

  /// Pasting expression of the common 2-source of both chain sides on a
  /// 4-dimensional coloring.
  inline Paste2Ptr chain_source_paste()
  {
    auto e = [](int dir, std::vector<int> off) {
      return LatticePath{{dir, detail::sorted(std::move(off))}};
    };
    Paste2Ptr E1 = paste_whisk_left(
      e(1, {}),
      paste_vcomp(paste_whisk_left(e(2, {1}), paste_face(3, 4, {1, 2})),
                  paste_whisk_right(paste_face(2, 4, {1}), e(3, {1, 2, 4}))));
    LatticePath tail = {{2, {1, 4}}, {3, {1, 2, 4}}};
    Paste2Ptr E2 = paste_whisk_right(paste_face(1, 4, {}), tail);
    Paste2Ptr E3 = paste_whisk_left(
      e(4, {}),
      paste_vcomp(paste_vcomp(paste_whisk_left(e(1, {4}), paste_face(2, 3, {1, 4})),
                              paste_whisk_right(paste_face(1, 3, {4}), e(2, {1, 3, 4}))),
                  paste_whisk_left(e(3, {4}), paste_face(1, 2, {3, 4}))));
    return paste_vcomp(paste_vcomp(E1, E2), E3);
  }

  /// Ordered chain factors over the boundary of a 4-dimensional coloring
  /// together with their composite 3-arrow (based at the common 2-source).
  struct ChainResult
  {
    std::vector<GroupElement> factors;
    Arrow3 composite;
  };

  inline ChainResult k_chain(const CubeColoring & c, Side side)
  {
    if (c.dimension != 4) {
      throw BadDimension("chain evaluation requires a 4-dimensional coloring");
    }
    GrayGroupoid gray(c.mod, detail::paste_tolerance(c));
    Arrow2 start = [&]() -> Arrow2 {
      try {
        return eval_paste(gray, c, chain_source_paste());
      } catch (const NotComposable & e) {
        throw ChainBroken(std::string("chain source does not paste: ") + e.what());
      }
    }();
    detail::ChainData d = detail::chain_data_4cube(c);

    std::vector<GroupElement> factors;
    if (side == Side::minus) {
      auto ks = detail::chain_minus(d);
      factors.assign(ks.begin(), ks.end());
      factors.push_back(c.k(1, 2, 3, {}));
    } else {
      auto ks = detail::chain_plus(d);
      factors.assign(ks.begin(), ks.end());
    }

    // Compose through the groupoid; each step's 2-source is the previous
    // step's 2-target, so the composite accumulates the ordered product.
    Arrow3 acc{start.X, start.e, c.mod->L->identity()};
    for (const GroupElement & kf : factors) {
      Arrow2 cur = gray.t2(acc);
      acc = gray.compose2(acc, Arrow3{cur.X, cur.e, kf});
    }
    return ChainResult{std::move(factors), std::move(acc)};
  }

  /// 3-dimensional holonomy of a 4-dimensional coloring: the ordered product
  /// of the lower-side factors against the inverted upper-side factors.  The
  /// result must be a delta-flat automorphism of the common 2-source; its
  /// failure to be one (relative to `integrity_tol`) signals inconsistent
  /// cell data.
  inline GroupElement holonomy3(const CubeColoring & c, double integrity_tol = 1e-9)
  {
    ChainResult lower = k_chain(c, Side::minus);
    ChainResult upper = k_chain(c, Side::plus);
    GroupElement hol = lower.composite.l * inverse(upper.composite.l);
    double defect = deviation_from_identity(c.mod->delta(hol));
    double scale = 1.0 + hol.m.lpNorm<Eigen::Infinity>();
    if (defect > integrity_tol * scale) {
      throw ChainBroken("holonomy fails to close: delta defect "
                        + std::to_string(defect));
    }
    return hol;
  }

  //------------------------------------------------------------------------
  // Colorings from a connection
  //------------------------------------------------------------------------

  namespace detail
  {
    /// Shared geometry for cell-by-cell transports: base point, direction
    /// vectors (columns) and signed edge scales.
    struct CellGrid
    {
      const FormContext * ctx = nullptr;
      const ThreeConnection * conn = nullptr;
      Vec x0;
      std::vector<Vec> dirs;
      std::vector<double> scales;
      int N = 1;

      /// Point at lattice parameter t (in units of whole edges).
      Vec point(const std::vector<double> & t) const
      {
        Vec p = x0;
        for (std::size_t a = 0; a < dirs.size(); ++a) p += t[a] * scales[a] * dirs[a];
        return p;
      }

      GroupElement edge_step(int dir, const std::vector<double> & t_mid) const
      {
        const LieAlgebra & g = ctx->module().g_alg();
        Vec coords = conn->A.evaluate(point(t_mid), dirs[static_cast<std::size_t>(dir - 1)]);
        double step = scales[static_cast<std::size_t>(dir - 1)] / static_cast<double>(N);
        AlgebraElement u = g.element(Vec(step * coords));
        return ctx->module().G->exp(u);
      }
    };

    inline Mat column(const Vec & v)
    {
      Mat m(v.size(), 1);
      m.col(0) = v;
      return m;
    }

    inline Mat columns(const Vec & v, const Vec & w)
    {
      Mat m(v.size(), 2);
      m.col(0) = v;
      m.col(1) = w;
      return m;
    }

    inline Mat columns(const Vec & v, const Vec & w, const Vec & u)
    {
      Mat m(v.size(), 3);
      m.col(0) = v;
      m.col(1) = w;
      m.col(2) = u;
      return m;
    }
  } // namespace detail

  /// Color the cells of a parameter cube from a fake-flat connection by
  /// midpoint-rule cell transports: edges are ordered products of N
  /// exponential steps of A, faces compose N^2 cell exponentials of B
  /// whiskered along access paths, 3-cells compose N^3 cell exponentials of
  /// C likewise.  The compatibility defects of the result decay with both
  /// the edge scales and 1/N.
  inline CubeColoring color_from_connection(const FormContext & ctx,
                                            const ThreeConnection & conn, const Vec & x,
                                            const std::vector<Vec> & dirs,
                                            const std::vector<double> & scales, int N,
                                            double fake_flat_tol = 1e-8,
                                            double coarse_factor = 0.0)
  {
    const int dim = static_cast<int>(dirs.size());
    if (dim < 2 || dim > 4 || scales.size() != dirs.size()) {
      throw BadDimension("need 2 to 4 directions with matching scales");
    }
    if (N < 1) throw BadDimension("subdivision must be positive");
    {
      auto [f1, f2] = fake_curvatures(ctx, conn);
      double defect = std::max(f1.max_abs_coeff(), f2.max_abs_coeff());
      if (defect > fake_flat_tol) {
        throw NotFakeFlat("fake curvature coefficient " + std::to_string(defect));
      }
    }

    const TwoCrossedModule & m = ctx.module();
    detail::CellGrid grid{&ctx, &conn, x, dirs, scales, N};
    CubeColoring out(ctx.module_ptr(), dim);
    const double Nd = static_cast<double>(N);

    auto base_t = [&](const std::vector<int> & offset) {
      std::vector<double> t(static_cast<std::size_t>(dim), 0.0);
      for (int d : offset) t[static_cast<std::size_t>(d - 1)] = 1.0;
      return t;
    };

    // Ordered transport along a whole edge.
    auto edge_value = [&](int dir, const std::vector<int> & offset) {
      std::vector<double> t = base_t(offset);
      GroupElement acc = m.G->identity();
      for (int s = 0; s < N; ++s) {
        t[static_cast<std::size_t>(dir - 1)] = (s + 0.5) / Nd;
        acc = acc * grid.edge_step(dir, t);
      }
      return acc;
    };

    // Partial transport of `steps` edge steps from the cell base corner.
    auto partial = [&](int dir, std::vector<double> t, int steps) {
      GroupElement acc = m.G->identity();
      for (int s = 0; s < steps; ++s) {
        t[static_cast<std::size_t>(dir - 1)] += 0.5 / Nd;
        acc = acc * grid.edge_step(dir, t);
        t[static_cast<std::size_t>(dir - 1)] += 0.5 / Nd;
      }
      return acc;
    };

    auto face_value = [&](int di, int dj, const std::vector<int> & offset) {
      const std::size_t ii = static_cast<std::size_t>(di - 1);
      const std::size_t jj = static_cast<std::size_t>(dj - 1);
      const double cell = scales[ii] * scales[jj] / (Nd * Nd);
      std::vector<double> t0 = base_t(offset);
      // Left-boundary transports along dj, cached cumulatively.
      std::vector<GroupElement> up(static_cast<std::size_t>(N), m.G->identity());
      for (int r = 1; r < N; ++r) {
        up[static_cast<std::size_t>(r)] = partial(dj, t0, r);
      }
      GroupElement acc = m.H->identity();
      for (int r = N - 1; r >= 0; --r) {
        std::vector<double> trow = t0;
        trow[jj] = r / Nd;
        for (int s = N - 1; s >= 0; --s) {
          GroupElement path = up[static_cast<std::size_t>(r)] * partial(di, trow, s);
          std::vector<double> tm = trow;
          tm[ii] = (s + 0.5) / Nd;
          tm[jj] = (r + 0.5) / Nd;
          Vec coords = conn.B.evaluate(grid.point(tm), detail::columns(dirs[ii], dirs[jj]));
          GroupElement cellv = m.H->exp(m.h_alg().element(Vec(cell * coords)));
          acc = acc * m.act_h(path, cellv);
        }
      }
      return acc;
    };

    auto cube_value = [&](int di, int dj, int dk, const std::vector<int> & offset) {
      const std::size_t ii = static_cast<std::size_t>(di - 1);
      const std::size_t jj = static_cast<std::size_t>(dj - 1);
      const std::size_t kk = static_cast<std::size_t>(dk - 1);
      const double cell = scales[ii] * scales[jj] * scales[kk] / (Nd * Nd * Nd);
      std::vector<double> t0 = base_t(offset);
      std::vector<GroupElement> lift(static_cast<std::size_t>(N), m.G->identity());
      for (int w = 1; w < N; ++w) lift[static_cast<std::size_t>(w)] = partial(dk, t0, w);
      GroupElement acc = m.L->identity();
      for (int w = N - 1; w >= 0; --w) {
        std::vector<double> tlay = t0;
        tlay[kk] = w / Nd;
        std::vector<GroupElement> up(static_cast<std::size_t>(N), m.G->identity());
        for (int r = 1; r < N; ++r) up[static_cast<std::size_t>(r)] = partial(dj, tlay, r);
        for (int r = N - 1; r >= 0; --r) {
          std::vector<double> trow = tlay;
          trow[jj] = r / Nd;
          for (int s = N - 1; s >= 0; --s) {
            GroupElement path = lift[static_cast<std::size_t>(w)]
                                * up[static_cast<std::size_t>(r)] * partial(di, trow, s);
            std::vector<double> tm = trow;
            tm[ii] = (s + 0.5) / Nd;
            tm[jj] = (r + 0.5) / Nd;
            tm[kk] = (w + 0.5) / Nd;
            Vec coords = conn.C.evaluate(grid.point(tm),
                                         detail::columns(dirs[ii], dirs[jj], dirs[kk]));
            GroupElement cellv = m.L->exp(m.l_alg().element(Vec(cell * coords)));
            acc = acc * m.act_l(path, cellv);
          }
        }
      }
      return acc;
    };

    out.visit_cells([&](const CellLabel & lab) {
      switch (lab.dirs.size()) {
        case 1:
          out.edge_values.emplace(lab, edge_value(lab.dirs[0], lab.offset));
          break;
        case 2:
          out.face_values.emplace(lab, face_value(lab.dirs[0], lab.dirs[1], lab.offset));
          break;
        default:
          out.cube_values.emplace(
            lab, cube_value(lab.dirs[0], lab.dirs[1], lab.dirs[2], lab.offset));
          break;
      }
    });

    if (coarse_factor > 0.0) {
      double hmax = 0.0;
      for (double s : scales) hmax = std::max(hmax, std::abs(s));
      double model = coarse_factor * std::max(1e-12, hmax * hmax * hmax * (hmax + 1.0 / Nd));
      double res = std::max(out.face_residual(), out.cube_residual());
      if (res > model) {
        throw SubdivisionTooCoarse("compatibility defect " + std::to_string(res)
                                   + " exceeds model " + std::to_string(model));
      }
    }
    return out;
  }

  /// Fourth-order central mixed difference of the holonomy logarithm over
  /// the 2^4 sign combinations of the scaled 4-cube: an l-valued
  /// approximation of the 3-curvature evaluated on the four directions.
  inline AlgebraElement finite_diff_omega3(const FormContext & ctx,
                                           const ThreeConnection & conn, const Vec & x,
                                           const std::vector<Vec> & dirs, double h, int N,
                                           double integrity_tol = 1e-5)
  {
    if (dirs.size() != 4) throw BadDimension("need exactly four directions");
    const LieAlgebra & l = ctx.module().l_alg();
    Vec acc = Vec::Zero(l.dim());
    for (int mask = 0; mask < 16; ++mask) {
      std::vector<double> scales(4);
      double parity = 1.0;
      for (int a = 0; a < 4; ++a) {
        double s = (mask & (1 << a)) ? -1.0 : 1.0;
        scales[static_cast<std::size_t>(a)] = s * h;
        parity *= s;
      }
      CubeColoring c = color_from_connection(ctx, conn, x, dirs, scales, N);
      GroupElement hol = holonomy3(c, integrity_tol);
      acc += parity * ctx.module().L->log(hol).coords;
    }
    double denom = std::pow(2.0 * h, 4);
    return l.element(Vec(acc / denom));
  }

  //------------------------------------------------------------------------
  // Exact random colorings
  //------------------------------------------------------------------------

  namespace detail
  {
    /// Solve hom(out) = target for a group homomorphism whose differential
    /// is a known linear map between the algebra coordinate spaces.
    template <typename Hom>
    GroupElement hom_preimage(const LieGroup & domain, const LieGroup & codomain,
                              const Mat & hom_lin, Hom && hom, const GroupElement & target,
                              double tol = 1e-9)
    {
      if (domain.algebra().dim() == 0) {
        if (deviation_from_identity(target) > tol) {
          throw Unsolvable("target outside the image of a trivial-domain map");
        }
        return domain.identity();
      }
      AlgebraElement lt = codomain.log(target);
      Vec xi = hom_lin.colPivHouseholderQr().solve(lt.coords);
      GroupElement out = domain.exp(domain.algebra().element(xi));
      double scale = 1.0 + target.m.lpNorm<Eigen::Infinity>();
      if (distance(hom(out), target) > tol * scale) {
        throw Unsolvable("target has no preimage under the structure map");
      }
      return out;
    }

    inline Mat kernel_basis(const Mat & lin)
    {
      if (lin.rows() == 0 || lin.cols() == 0) {
        return Mat::Identity(lin.cols(), lin.cols());
      }
      Eigen::FullPivLU<Mat> lu(lin);
      return lu.kernel();
    }

    inline GroupElement kernel_random(const LieGroup & grp, const Mat & kernel, Rng & rng,
                                      double scale)
    {
      const LieAlgebra & alg = grp.algebra();
      if (alg.dim() == 0 || kernel.cols() == 0) return grp.identity();
      Vec coeff = rng.coords(kernel.cols(), scale);
      return grp.exp(alg.element(Vec(kernel * coeff)));
    }
  } // namespace detail

  /// Random coloring satisfying both compatibility laws to machine
  /// precision: edges are drawn so the face law is solvable, faces are the
  /// solved values dressed with kernel freedom, and 3-cell values are solved
  /// from the two boundary composites.
  inline CubeColoring random_coloring(std::shared_ptr<const TwoCrossedModule> mod, int dim,
                                      Rng & rng, double scale = 0.5)
  {
    CubeColoring out(mod, dim);
    const TwoCrossedModule & m = *mod;
    Mat ker_alpha = detail::kernel_basis(m.alpha_lin);
    Mat ker_delta = detail::kernel_basis(m.delta_lin);

    // Per-direction constant part plus an alpha-image part per edge: the
    // constants cancel in the face law, the alpha-image parts keep its
    // right-hand side inside the image of alpha.
    std::map<int, GroupElement> z;
    for (int i = 1; i <= dim; ++i) z.emplace(i, m.G->random(rng, scale));
    std::map<std::pair<int, int>, GroupElement> face_const;

    out.visit_cells([&](const CellLabel & lab) {
      if (lab.dirs.size() == 1) {
        int i = lab.dirs[0];
        out.edge_values.emplace(lab, z.at(i) * m.alpha(m.H->random(rng, scale)));
      }
    });
    out.visit_cells([&](const CellLabel & lab) {
      if (lab.dirs.size() != 2) return;
      int i = lab.dirs[0], j = lab.dirs[1];
      auto key = std::make_pair(i, j);
      if (!face_const.count(key)) {
        face_const.emplace(key, detail::kernel_random(*m.H, ker_alpha, rng, scale));
      }
      GroupElement target = out.f(i, lab.offset) * out.f(j, detail::with(lab.offset, i))
                            * inverse(out.f(j, lab.offset)
                                      * out.f(i, detail::with(lab.offset, j)));
      GroupElement part = detail::hom_preimage(
        *m.H, *m.G, m.alpha_lin, [&m](const GroupElement & e) { return m.alpha(e); },
        target);
      GroupElement dress = m.delta(m.L->random(rng, scale));
      out.face_values.emplace(lab, part * dress * face_const.at(key));
    });
    out.visit_cells([&](const CellLabel & lab) {
      if (lab.dirs.size() != 3) return;
      int i = lab.dirs[0], j = lab.dirs[1], kk = lab.dirs[2];
      GroupElement target = out.side_value(i, j, kk, lab.offset, -1)
                            * inverse(out.side_value(i, j, kk, lab.offset, +1));
      GroupElement part = detail::hom_preimage(
        *m.L, *m.H, m.delta_lin, [&m](const GroupElement & l) { return m.delta(l); },
        target);
      out.cube_values.emplace(lab, part * detail::kernel_random(*m.L, ker_delta, rng, scale));
    });
    return out;
  }

  //------------------------------------------------------------------------
  // Lattice gauge transformation
  //------------------------------------------------------------------------

  namespace detail
  {
    /// Chain data for transporting the 3-cell value spanned by (d1,d2,d3) at
    /// a base offset across the gauge layer.
    inline ChainData chain_data_gauge(const CubeColoring & base, const CubeColoring & tilde,
                                      const GaugeColoring & gauge,
                                      const std::array<int, 3> & dd,
                                      const std::vector<int> & off)
    {
      auto abs_off = [&dd, &off](std::vector<int> rel) {
        std::vector<int> o = off;
        for (int r : rel) o = with(o, dd[static_cast<std::size_t>(r - 1)]);
        return o;
      };
      auto dir = [&dd](int i) { return dd[static_cast<std::size_t>(i - 1)]; };
      ChainData d;
      d.mod = base.mod.get();
      d.a = [&tilde, abs_off, dir](int i, std::vector<int> rel) {
        return tilde.f(dir(i), abs_off(std::move(rel)));
      };
      d.b = [&tilde, abs_off, dir](int i, int j, std::vector<int> rel) {
        return tilde.F(dir(i), dir(j), abs_off(std::move(rel)));
      };
      d.b0 = [&base, abs_off, dir](int i, int j, std::vector<int> rel) {
        return base.F(dir(i), dir(j), abs_off(std::move(rel)));
      };
      d.v = [&gauge, abs_off](std::vector<int> rel) {
        return gauge.g(abs_off(std::move(rel)));
      };
      d.eh = [&gauge, abs_off, dir](int i, std::vector<int> rel) {
        return gauge.h(dir(i), abs_off(std::move(rel)));
      };
      d.fk = [&gauge, abs_off, dir](int i, int j, std::vector<int> rel) {
        return gauge.k(dir(i), dir(j), abs_off(std::move(rel)));
      };
      d.cube0 = [&base, &dd, &off]() { return base.k(dd[0], dd[1], dd[2], off); };
      return d;
    }
  } // namespace detail

  /// Apply gauge data to a coloring: edges conjugate through vertex values
  /// and absorb alpha of the edge data, faces solve the square-transport
  /// law, and 3-cell values solve the naturality of the two boundary
  /// composites (evaluated as the explicit chain on each 3-cell).
  inline CubeColoring lattice_gauge_transform(const CubeColoring & c,
                                              const GaugeColoring & gauge,
                                              double consistency_tol = 1e-9)
  {
    if (gauge.dimension != c.dimension || gauge.mod != c.mod) {
      throw BadDimension("gauge data does not match the coloring");
    }
    const TwoCrossedModule & m = *c.mod;
    CubeColoring out(c.mod, c.dimension);

    for (const auto & [lab, fv] : c.edge_values) {
      int i = lab.dirs[0];
      GroupElement val = m.alpha(gauge.h(i, lab.offset)) * gauge.g(lab.offset) * fv
                         * inverse(gauge.g(detail::with(lab.offset, i)));
      out.edge_values.emplace(lab, val);
    }
    for (const auto & [lab, Fv] : c.face_values) {
      int i = lab.dirs[0], j = lab.dirs[1];
      GroupElement upper = m.act_h(out.f(i, lab.offset), gauge.h(j, detail::with(lab.offset, i)))
                           * gauge.h(i, lab.offset)
                           * m.act_h(gauge.g(lab.offset), Fv);
      GroupElement lower = m.act_h(out.f(j, lab.offset), gauge.h(i, detail::with(lab.offset, j)))
                           * gauge.h(j, lab.offset);
      out.face_values.emplace(lab,
                              inverse(m.delta(gauge.k(i, j, lab.offset))) * upper
                                * inverse(lower));
    }
    for (const auto & [lab, kv] : c.cube_values) {
      (void)kv;
      std::array<int, 3> dd{lab.dirs[0], lab.dirs[1], lab.dirs[2]};
      detail::ChainData d = detail::chain_data_gauge(c, out, gauge, dd, lab.offset);
      auto lowerk = detail::chain_minus(d);
      auto upperk = detail::chain_plus(d);
      GroupElement lhs = m.L->identity(), rhs = m.L->identity();
      for (const GroupElement & kf : lowerk) lhs = lhs * kf;
      for (const GroupElement & kf : upperk) rhs = rhs * kf;
      out.cube_values.emplace(lab, inverse(lhs) * rhs);
    }

    double before = std::max(c.face_residual(), c.cube_residual());
    if (before > consistency_tol) {
      throw InconsistentGauge("input coloring violates compatibility: "
                              + std::to_string(before));
    }
    double after = std::max(out.face_residual(), out.cube_residual());
    if (after > std::max(consistency_tol, 20.0 * before)) {
      throw InconsistentGauge("transformed coloring violates compatibility: "
                              + std::to_string(after));
    }
    return out;
  }

  //------------------------------------------------------------------------
  // Lax-transformation values on pastings
  //------------------------------------------------------------------------

  namespace detail
  {
    /// Evaluator for the L- and H-components of a lax transformation applied
    /// to pasting expressions, given the original coloring, the transformed
    /// one and the gauge data.
    struct PsiEvaluator
    {
      const GrayGroupoid & gray;
      const CubeColoring & base;
      const CubeColoring & tilde;
      const GaugeColoring & gauge;

      /// H-component on a lattice path (composite of edge squares).
      GroupElement path_h(const LatticePath & p, std::size_t from = 0) const
      {
        const TwoCrossedModule & m = *base.mod;
        if (from >= p.size()) return m.H->identity();
        GroupElement rest = path_h(p, from + 1);
        const auto & [dir, off] = p[from];
        return m.act_h(tilde.f(dir, off), rest) * gauge.h(dir, off);
      }

      /// Vertex offset at the end of a lattice path.
      std::vector<int> path_end(const LatticePath & p) const
      {
        std::vector<int> off;
        if (!p.empty()) off = with(p.back().second, p.back().first);
        return off;
      }

      /// L-component on a pasting of faces.
      GroupElement kappa(const Paste2Ptr & node) const
      {
        const TwoCrossedModule & m = *base.mod;
        switch (node->kind) {
          case Paste2::Kind::face: return gauge.k(node->i, node->j, node->offset);
          case Paste2::Kind::vcomp: {
            GroupElement e = eval_paste(gray, tilde, node->a).e;
            return kappa(node->a) * m.rhd_prime(e, kappa(node->b));
          }
          case Paste2::Kind::whisk_right: {
            Arrow2 at = eval_paste(gray, tilde, node->a);
            GroupElement w = m.act_h(at.X, path_h(node->path));
            return m.rhd_prime(w, kappa(node->a))
                   * m.rhd_prime(at.e, m.peiffer(inverse(at.e), w));
          }
          case Paste2::Kind::whisk_left:
          default: {
            const LatticePath & p = node->path;
            GroupElement fpath = m.G->identity();
            for (const auto & [dir, off] : p) fpath = fpath * tilde.f(dir, off);
            GroupElement hsrc = path_h(paste_source_path(node->a));
            GroupElement hp = path_h(p);
            GroupElement ebase = eval_paste(gray, base, node->a).e;
            GroupElement pf = m.peiffer(
              inverse(hp), m.act_h(fpath * gauge.g(path_end(p)), ebase));
            return m.rhd_prime(m.act_h(fpath, hsrc),
                               m.rhd_prime(hp, inverse(pf)))
                   * m.act_l(fpath, kappa(node->a));
          }
        }
      }
    };
  } // namespace detail

  //------------------------------------------------------------------------
  // Exact covariance of the holonomy
  //------------------------------------------------------------------------

  struct HolonomyCovarianceReport
  {
    GroupElement lhs;
    GroupElement rhs;
    double residual = 0.0;
  };

  /// Both sides of the holonomy covariance law, computed independently: the
  /// left side twists the original holonomy through the gauge data of the
  /// base path, the right side conjugates the holonomy of the transformed
  /// coloring by the transformation value on the common 2-source.  The match
  /// is exact group arithmetic, independent of how the coloring was made.
  inline HolonomyCovarianceReport verify_holonomy_covariance(const CubeColoring & c,
                                                             const GaugeColoring & gauge,
                                                             double integrity_tol = 1e-9)
  {
    if (c.dimension != 4) {
      throw BadDimension("holonomy covariance requires a 4-dimensional coloring");
    }
    const TwoCrossedModule & m = *c.mod;
    CubeColoring tilde = lattice_gauge_transform(c, gauge);
    GroupElement hol = holonomy3(c, integrity_tol);
    GroupElement hol_t = holonomy3(tilde, integrity_tol);

    GrayGroupoid gray(c.mod);
    detail::PsiEvaluator psi{gray, c, tilde, gauge};

    LatticePath base_path = {{1, {}}, {2, {1}}, {3, {1, 2}}, {4, {1, 2, 3}}};
    GroupElement hf = psi.path_h(base_path);
    GroupElement lhs = m.rhd_prime(hf, m.act_l(gauge.g({}), hol));

    GroupElement P = psi.kappa(chain_source_paste());
    GroupElement rhs = P * hol_t * inverse(P);

    double scale = 1.0 + std::max(lhs.m.lpNorm<Eigen::Infinity>(),
                                  rhs.m.lpNorm<Eigen::Infinity>());
    return HolonomyCovarianceReport{lhs, rhs, distance(lhs, rhs) / scale};
  }

} // namespace g3

#endif
