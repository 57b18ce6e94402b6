#ifndef G3_SERIALIZE_HPP
#define G3_SERIALIZE_HPP

#include "holonomy.hpp"

#include <json.hpp>

/// \file serialize.hpp
/// JSON schemas for the value types exchanged with the command-line tool:
/// module instance descriptors, polynomial form literals, and lattice
/// colorings.  The schemas are documented in the README; matrices are stored
/// as row-major nested arrays.

namespace g3
{

  using Json = nlohmann::json;

  struct SchemaError : Error
  {
    using Error::Error;
  };

  inline Json matrix_to_json(const Mat & m)
  {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      Json row = Json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
      rows.push_back(std::move(row));
    }
    return rows;
  }

  inline Mat matrix_from_json(const Json & j)
  {
    if (!j.is_array()) throw SchemaError("matrix: expected an array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Json & row = j.at(static_cast<std::size_t>(r));
      if (static_cast<Eigen::Index>(row.size()) != cols) {
        throw SchemaError("matrix: ragged rows");
      }
      for (Eigen::Index c = 0; c < cols; ++c) {
        m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
      }
    }
    return m;
  }

  /// Descriptor of a module instance: basis matrices of the three algebras,
  /// the two linear structure maps and the three structure tensors.
  inline Json instance_to_json(const TwoCrossedModule & m)
  {
    auto basis = [](const LieAlgebra & a) {
      Json out = Json::array();
      for (const Mat & b : a.basis()) out.push_back(matrix_to_json(b));
      return out;
    };
    auto tensor = [](const std::vector<Mat> & slices) {
      Json out = Json::array();
      for (const Mat & s : slices) out.push_back(matrix_to_json(s));
      return out;
    };
    Json j;
    j["name"] = m.name;
    j["nilpotent_exact"] = m.nilpotent_exact;
    j["g_basis"] = basis(m.g_alg());
    j["h_basis"] = basis(m.h_alg());
    j["l_basis"] = basis(m.l_alg());
    j["delta_lin"] = matrix_to_json(m.delta_lin);
    j["alpha_lin"] = matrix_to_json(m.alpha_lin);
    j["act_h"] = tensor(m.act_lin_h);
    j["act_l"] = tensor(m.act_lin_l);
    j["peiffer"] = tensor(m.peiffer_lin);
    return j;
  }

  /// Form literal: value space role ("g", "h" or "l"), degree, and a sparse
  /// list of terms (direction key, coordinate index, monomial, coefficient).
  inline Json form_to_json(const FormContext & ctx, const Form & f)
  {
    std::string role;
    if (f.space() == ctx.g_space()) role = "g";
    else if (f.space() == ctx.h_space()) role = "h";
    else if (f.space() == ctx.l_space()) role = "l";
    else throw SchemaError("form literal: unrecognized value space");

    Json terms = Json::array();
    for (const auto & [key, polys] : f.components()) {
      for (std::size_t a = 0; a < polys.size(); ++a) {
        for (const auto & [mono, coeff] : polys[a].terms()) {
          Json t;
          t["dirs"] = key;
          t["coord"] = a;
          t["monomial"] = mono;
          t["coeff"] = coeff;
          terms.push_back(std::move(t));
        }
      }
    }
    Json j;
    j["space"] = role;
    j["n_vars"] = f.n_vars();
    j["degree"] = f.degree();
    j["terms"] = std::move(terms);
    return j;
  }

  inline Form form_from_json(const FormContext & ctx, const Json & j)
  {
    std::string role = j.at("space").get<std::string>();
    std::shared_ptr<const ValueSpace> space;
    if (role == "g") space = ctx.g_space();
    else if (role == "h") space = ctx.h_space();
    else if (role == "l") space = ctx.l_space();
    else throw SchemaError("form literal: space must be one of g, h, l");

    Form f(space, j.at("n_vars").get<int>(), j.at("degree").get<int>());
    for (const Json & t : j.at("terms")) {
      auto dirs = t.at("dirs").get<std::vector<int>>();
      auto coord = t.at("coord").get<Eigen::Index>();
      auto mono = t.at("monomial").get<std::vector<int>>();
      if (coord < 0 || coord >= space->dim()) {
        throw SchemaError("form literal: coordinate index out of range");
      }
      if (static_cast<int>(mono.size()) != f.n_vars()) {
        throw SchemaError("form literal: monomial length must equal n_vars");
      }
      Polynomial p(f.n_vars());
      p.add_term(mono, t.at("coeff").get<double>());
      f.add_term(dirs, coord, p);
    }
    return f;
  }

  inline Json connection_to_json(const FormContext & ctx, const ThreeConnection & conn)
  {
    Json j;
    j["A"] = form_to_json(ctx, conn.A);
    j["B"] = form_to_json(ctx, conn.B);
    j["C"] = form_to_json(ctx, conn.C);
    return j;
  }

  inline ThreeConnection connection_from_json(const FormContext & ctx, const Json & j)
  {
    return {form_from_json(ctx, j.at("A")), form_from_json(ctx, j.at("B")),
            form_from_json(ctx, j.at("C"))};
  }

  namespace detail
  {
    inline Json cells_to_json(const std::map<CellLabel, GroupElement> & cells)
    {
      Json out = Json::array();
      for (const auto & [lab, v] : cells) {
        Json c;
        c["dirs"] = lab.dirs;
        c["offset"] = lab.offset;
        c["value"] = matrix_to_json(v.m);
        out.push_back(std::move(c));
      }
      return out;
    }

    inline void cells_from_json(const Json & j, const LieGroup & grp,
                                std::map<CellLabel, GroupElement> & out)
    {
      for (const Json & c : j) {
        CellLabel lab{c.at("dirs").get<std::vector<int>>(),
                      c.at("offset").get<std::vector<int>>()};
        Mat m = matrix_from_json(c.at("value"));
        if (m.rows() != grp.matrix_size() || m.cols() != grp.matrix_size()) {
          throw SchemaError("coloring cell: matrix size does not match the group");
        }
        out.emplace(std::move(lab), GroupElement{&grp, std::move(m)});
      }
    }
  } // namespace detail

  /// Cube coloring: instance name, dimension, and the three cell maps.
  inline Json coloring_to_json(const CubeColoring & c)
  {
    Json j;
    j["instance"] = c.mod->name;
    j["dimension"] = c.dimension;
    j["edges"] = detail::cells_to_json(c.edge_values);
    j["faces"] = detail::cells_to_json(c.face_values);
    j["cubes"] = detail::cells_to_json(c.cube_values);
    return j;
  }

  inline CubeColoring coloring_from_json(std::shared_ptr<const TwoCrossedModule> mod,
                                         const Json & j)
  {
    if (j.at("instance").get<std::string>() != mod->name) {
      throw SchemaError("coloring: instance name does not match the module");
    }
    CubeColoring c(mod, j.at("dimension").get<int>());
    detail::cells_from_json(j.at("edges"), *mod->G, c.edge_values);
    detail::cells_from_json(j.at("faces"), *mod->H, c.face_values);
    detail::cells_from_json(j.at("cubes"), *mod->L, c.cube_values);
    return c;
  }

  /// Gauge coloring: vertex, edge and face cell maps of a lax transformation.
  inline Json gauge_coloring_to_json(const GaugeColoring & gc)
  {
    Json j;
    j["instance"] = gc.mod->name;
    j["dimension"] = gc.dimension;
    j["vertices"] = detail::cells_to_json(gc.vertex_values);
    j["edges"] = detail::cells_to_json(gc.edge_values);
    j["faces"] = detail::cells_to_json(gc.face_values);
    return j;
  }

  inline GaugeColoring gauge_coloring_from_json(std::shared_ptr<const TwoCrossedModule> mod,
                                                const Json & j)
  {
    if (j.at("instance").get<std::string>() != mod->name) {
      throw SchemaError("gauge coloring: instance name does not match the module");
    }
    GaugeColoring gc(mod, j.at("dimension").get<int>());
    detail::cells_from_json(j.at("vertices"), *mod->G, gc.vertex_values);
    detail::cells_from_json(j.at("edges"), *mod->H, gc.edge_values);
    detail::cells_from_json(j.at("faces"), *mod->L, gc.face_values);
    return gc;
  }

} // namespace g3

#endif
