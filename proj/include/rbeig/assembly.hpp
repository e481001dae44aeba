// Copyright rbeig contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbeig/geometry.hpp"
#include "rbeig/material.hpp"
#include "rbeig/splines.hpp"

namespace rbeig {

using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Global indexing of the broken displacement space. Scalar control points
/// are concatenated patch by patch; the three displacement components of a
/// control point are interleaved. Clamped DoFs are eliminated to a
/// contiguous "free" numbering.
struct DofMap {
  std::vector<int> scalar_offset;  // per patch
  int n_scalar = 0;
  int n_full = 0;  // 3 * n_scalar
  std::vector<int> full_to_free;
  std::vector<int> free_to_full;
  int n_free = 0;

  int full_index(int patch, int scalar, int comp) const {
    return 3 * (scalar_offset[patch] + scalar) + comp;
  }
  int free_index(int patch, int scalar, int comp) const {
    return full_to_free[full_index(patch, scalar, comp)];
  }
};

inline DofMap build_dof_map(const MultiPatchModel& model) {
  DofMap dm;
  dm.scalar_offset.resize(model.patches.size());
  int off = 0;
  for (std::size_t p = 0; p < model.patches.size(); ++p) {
    dm.scalar_offset[p] = off;
    off += model.patches[p].displacement.dim();
  }
  dm.n_scalar = off;
  dm.n_full = 3 * off;
  dm.full_to_free.assign(dm.n_full, 0);
  for (const auto& df : model.dirichlet) {
    const auto& space = model.patches.at(df.patch).displacement;
    for (int s : space.face_layer(df.face))
      for (int c = 0; c < 3; ++c) dm.full_to_free[dm.full_index(df.patch, s, c)] = -1;
  }
  dm.free_to_full.clear();
  for (int i = 0; i < dm.n_full; ++i) {
    if (dm.full_to_free[i] == 0) {
      dm.full_to_free[i] = int(dm.free_to_full.size());
      dm.free_to_full.push_back(i);
    }
  }
  dm.n_free = int(dm.free_to_full.size());
  return dm;
}

/// Coefficient function of one affine component.
struct ThetaDef {
  enum class Kind { Stiffness, Mass };
  Kind kind = Kind::Stiffness;
  int row = 0, col = 0;     // Voigt entry (stiffness components)
  int thickness_power = 0;  // exponent of the thickness factor
  std::string label;

  double evaluate(const ParameterSample& mu, const StiffnessVoigt& C) const {
    const double tp = std::pow(mu.thickness, thickness_power);
    return kind == Kind::Stiffness ? C(row, col) * tp : mu.rho * tp;
  }
};

/// The canonical stiffness grouping: one component per independent entry of
/// the pulled-back tensor. The constant Jacobian factor of the thickness map
/// multiplies stiffness and mass alike and is dropped from both.
inline std::vector<ThetaDef> stiffness_theta_defs() {
  using K = ThetaDef::Kind;
  return {{K::Stiffness, 0, 0, 0, "A11"},  {K::Stiffness, 0, 1, 0, "A12"},
          {K::Stiffness, 0, 2, -2, "A13"}, {K::Stiffness, 1, 1, 0, "A22"},
          {K::Stiffness, 1, 2, -2, "A23"}, {K::Stiffness, 2, 2, -4, "A33"},
          {K::Stiffness, 3, 3, -2, "G_yz"}, {K::Stiffness, 4, 4, -2, "G_zx"},
          {K::Stiffness, 5, 5, 0, "G_xy"}};
}

inline std::vector<ThetaDef> mass_theta_defs() {
  using K = ThetaDef::Kind;
  return {{K::Mass, 0, 0, 0, "m_inplane"}, {K::Mass, 0, 0, -2, "m_axial"}};
}

/// Affine decomposition of stiffness and mass over the free DoFs of the
/// broken space, plus the mortar coupling operator (rows = multiplier DoFs).
struct AffineSystem {
  DofMap dofs;
  std::vector<SparseMat> a_comps;
  std::vector<ThetaDef> a_theta;
  std::vector<SparseMat> m_comps;
  std::vector<ThetaDef> m_theta;
  SparseMat mortar;  // n_mult x n_free
  int n_mult = 0;

  int q_a() const { return int(a_comps.size()); }
  int q_m() const { return int(m_comps.size()); }

  Eigen::VectorXd theta_a(const ParameterSample& mu) const {
    const StiffnessVoigt C = stiffness_from_engineering(mu);
    Eigen::VectorXd t(q_a());
    for (int q = 0; q < q_a(); ++q) t[q] = a_theta[q].evaluate(mu, C);
    return t;
  }
  Eigen::VectorXd theta_m(const ParameterSample& mu) const {
    Eigen::VectorXd t(q_m());
    static const StiffnessVoigt dummy = StiffnessVoigt::Zero();
    for (int q = 0; q < q_m(); ++q) t[q] = m_theta[q].evaluate(mu, dummy);
    return t;
  }

  SparseMat stiffness(const ParameterSample& mu) const {
    const Eigen::VectorXd t = theta_a(mu);
    SparseMat A = t[0] * a_comps[0];
    for (int q = 1; q < q_a(); ++q) A += t[q] * a_comps[q];
    return A;
  }
  SparseMat mass(const ParameterSample& mu) const {
    const Eigen::VectorXd t = theta_m(mu);
    SparseMat M = t[0] * m_comps[0];
    for (int q = 1; q < q_m(); ++q) M += t[q] * m_comps[q];
    return M;
  }
};

namespace detail {

struct PatchQuadrature {
  // Per direction: element boundaries merged from displacement and geometry
  // knots, plus the per-direction Gauss rule.
  std::array<std::vector<double>, 3> breaks;
  std::array<const GaussRule*, 3> rules{};
};

inline PatchQuadrature make_patch_quadrature(const Patch& patch) {
  PatchQuadrature q;
  for (int d = 0; d < 3; ++d) {
    const auto& kvd = patch.displacement.kv(d);
    const auto& kvg = patch.geometry.kv(d);
    if (std::abs(kvd.front() - kvg.front()) > 1e-14 ||
        std::abs(kvd.back() - kvg.back()) > 1e-14)
      throw std::invalid_argument("assembly: displacement and geometry parametric ranges differ");
    std::vector<double> b = kvd.breakpoints();
    for (double g : kvg.breakpoints()) b.push_back(g);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end(),
                        [](double x, double y) { return std::abs(x - y) < 1e-14; }),
            b.end());
    q.breaks[d] = std::move(b);
    q.rules[d] = &gauss_rule(kvd.degree() + 1);
  }
  return q;
}

/// Calls fn(u, weight) for every quadrature point of one parametric element.
template <typename F>
void for_each_quad_point(const PatchQuadrature& q, int e0, int e1, int e2, F&& fn) {
  const auto cell = [&](int d, int e) {
    return std::pair<double, double>(q.breaks[d][e], q.breaks[d][e + 1]);
  };
  const auto [a0, b0] = cell(0, e0);
  const auto [a1, b1] = cell(1, e1);
  const auto [a2, b2] = cell(2, e2);
  for (std::size_t k = 0; k < q.rules[2]->points.size(); ++k)
    for (std::size_t j = 0; j < q.rules[1]->points.size(); ++j)
      for (std::size_t i = 0; i < q.rules[0]->points.size(); ++i) {
        Eigen::Vector3d u;
        u[0] = 0.5 * (a0 + b0) + 0.5 * (b0 - a0) * q.rules[0]->points[i];
        u[1] = 0.5 * (a1 + b1) + 0.5 * (b1 - a1) * q.rules[1]->points[j];
        u[2] = 0.5 * (a2 + b2) + 0.5 * (b2 - a2) * q.rules[2]->points[k];
        const double w = 0.125 * (b0 - a0) * (b1 - a1) * (b2 - a2) *
                         q.rules[0]->weights[i] * q.rules[1]->weights[j] *
                         q.rules[2]->weights[k];
        fn(u, w);
      }
}

/// Scalar basis values and physical gradients of the active displacement
/// functions at one quadrature point.
struct ShapeData {
  std::vector<int> scalar;  // active scalar indices
  Eigen::VectorXd values;
  Eigen::MatrixXd grads;  // n_active x 3, physical
  double det = 0.0;
};

inline ShapeData evaluate_shapes(const Patch& patch, const Eigen::Vector3d& u) {
  const auto& sp = patch.displacement;
  std::array<BasisEval, 3> e;
  for (int d = 0; d < 3; ++d) e[d] = sp.kv(d).eval_basis(u[d]);
  const Eigen::Matrix3d J = patch.jacobian(u);
  const double det = J.determinant();
  if (!(det > 0.0))
    throw std::runtime_error("assembly: non-positive geometry Jacobian");
  const Eigen::Matrix3d JinvT = J.inverse().transpose();

  const int n0 = sp.kv(0).degree() + 1, n1 = sp.kv(1).degree() + 1,
            n2 = sp.kv(2).degree() + 1;
  ShapeData s;
  s.det = det;
  s.scalar.resize(n0 * n1 * n2);
  s.values.resize(n0 * n1 * n2);
  s.grads.resize(n0 * n1 * n2, 3);
  int a = 0;
  for (int k = 0; k < n2; ++k)
    for (int j = 0; j < n1; ++j)
      for (int i = 0; i < n0; ++i, ++a) {
        s.scalar[a] = sp.index(e[0].first + i, e[1].first + j, e[2].first + k);
        s.values[a] = e[0].values[i] * e[1].values[j] * e[2].values[k];
        Eigen::Vector3d gp(e[0].derivs[i] * e[1].values[j] * e[2].values[k],
                           e[0].values[i] * e[1].derivs[j] * e[2].values[k],
                           e[0].values[i] * e[1].values[j] * e[2].derivs[k]);
        s.grads.row(a) = (JinvT * gp).transpose();
      }
  return s;
}

// Component pairs touched by each canonical stiffness group, expressed as
// (c, c', i, j): the (c,c') block receives grad_i(a) * grad_j(b).
struct GroupCombo {
  int c, cp, i, j;
};

inline const std::array<std::vector<GroupCombo>, 9>& stiffness_group_combos() {
  static const std::array<std::vector<GroupCombo>, 9> combos = {{
      {{0, 0, 0, 0}},                                            // A11
      {{0, 1, 0, 1}, {1, 0, 1, 0}},                              // A12
      {{0, 2, 0, 2}, {2, 0, 2, 0}},                              // A13
      {{1, 1, 1, 1}},                                            // A22
      {{1, 2, 1, 2}, {2, 1, 2, 1}},                              // A23
      {{2, 2, 2, 2}},                                            // A33
      {{1, 1, 2, 2}, {1, 2, 2, 1}, {2, 1, 1, 2}, {2, 2, 1, 1}},  // G_yz
      {{0, 0, 2, 2}, {0, 2, 2, 0}, {2, 0, 0, 2}, {2, 2, 0, 0}},  // G_zx
      {{0, 0, 1, 1}, {0, 1, 1, 0}, {1, 0, 0, 1}, {1, 1, 0, 0}},  // G_xy
  }};
  return combos;
}

template <typename Scatter>
void assemble_patch(const Patch& patch, Scatter&& scatter) {
  const PatchQuadrature quad = make_patch_quadrature(patch);
  for (std::size_t e2 = 0; e2 + 1 < quad.breaks[2].size(); ++e2)
    for (std::size_t e1 = 0; e1 + 1 < quad.breaks[1].size(); ++e1)
      for (std::size_t e0 = 0; e0 + 1 < quad.breaks[0].size(); ++e0) {
        std::vector<ShapeData> pts;
        for_each_quad_point(quad, int(e0), int(e1), int(e2),
                            [&](const Eigen::Vector3d& u, double w) {
                              ShapeData s = evaluate_shapes(patch, u);
                              s.det *= w;  // fold quadrature weight into det
                              pts.push_back(std::move(s));
                            });
        scatter(pts);
      }
}

}  // namespace detail

/// Assembles the affine stiffness and mass components and the mortar
/// operator of a model. Stiffness components are grouped by the distinct
/// entries of the pulled-back tensor; mass splits into in-plane and axial
/// blocks.
SparseMat assemble_mortar(const MultiPatchModel& model, const DofMap& dofs);

inline AffineSystem assemble_affine(const MultiPatchModel& model) {
  AffineSystem sys;
  sys.dofs = build_dof_map(model);
  sys.a_theta = stiffness_theta_defs();
  sys.m_theta = mass_theta_defs();
  const auto& combos = detail::stiffness_group_combos();

  std::array<std::vector<Triplet>, 9> at;
  std::array<std::vector<Triplet>, 2> mt;

  for (std::size_t p = 0; p < model.patches.size(); ++p) {
    const Patch& patch = model.patches[p];
    detail::assemble_patch(patch, [&](const std::vector<detail::ShapeData>& pts) {
      const int na = int(pts.front().scalar.size());
      // Accumulated grad_i(a) * grad_j(b) products and value products.
      std::array<std::array<Eigen::MatrixXd, 3>, 3> acc;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) acc[i][j] = Eigen::MatrixXd::Zero(na, na);
      Eigen::MatrixXd accv = Eigen::MatrixXd::Zero(na, na);
      for (const auto& s : pts) {
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            acc[i][j].noalias() += s.det * (s.grads.col(i) * s.grads.col(j).transpose());
        accv.noalias() += s.det * (s.values * s.values.transpose());
      }
      const auto& scalars = pts.front().scalar;
      for (int q = 0; q < 9; ++q)
        for (const auto& cb : combos[q])
          for (int a = 0; a < na; ++a) {
            const int ra = sys.dofs.free_index(int(p), scalars[a], cb.c);
            if (ra < 0) continue;
            for (int b = 0; b < na; ++b) {
              const int rb = sys.dofs.free_index(int(p), scalars[b], cb.cp);
              if (rb < 0) continue;
              at[q].emplace_back(ra, rb, acc[cb.i][cb.j](a, b));
            }
          }
      for (int c = 0; c < 3; ++c) {
        const int g = c < 2 ? 0 : 1;
        for (int a = 0; a < na; ++a) {
          const int ra = sys.dofs.free_index(int(p), scalars[a], c);
          if (ra < 0) continue;
          for (int b = 0; b < na; ++b) {
            const int rb = sys.dofs.free_index(int(p), scalars[b], c);
            if (rb < 0) continue;
            mt[g].emplace_back(ra, rb, accv(a, b));
          }
        }
      }
    });
  }

  const int n = sys.dofs.n_free;
  sys.a_comps.resize(9);
  for (int q = 0; q < 9; ++q) {
    sys.a_comps[q].resize(n, n);
    sys.a_comps[q].setFromTriplets(at[q].begin(), at[q].end());
  }
  sys.m_comps.resize(2);
  for (int g = 0; g < 2; ++g) {
    sys.m_comps[g].resize(n, n);
    sys.m_comps[g].setFromTriplets(mt[g].begin(), mt[g].end());
  }

  sys.mortar = assemble_mortar(model, sys.dofs);
  sys.n_mult = int(sys.mortar.rows());
  return sys;
}

/// Direct one-pass assembly with an arbitrary symmetric 6x6 coefficient
/// tensor and componentwise mass weight; the oracle counterpart of the
/// affine decomposition, and the physical-domain assembly when called on a
/// thickness-scaled model with the untransformed tensor.
inline std::pair<SparseMat, SparseMat> assemble_monolithic(
    const MultiPatchModel& model, const DofMap& dofs, const StiffnessVoigt& C,
    const Eigen::Vector3d& mass_w) {
  std::vector<Triplet> at, mt;
  for (std::size_t p = 0; p < model.patches.size(); ++p) {
    const Patch& patch = model.patches[p];
    detail::assemble_patch(patch, [&](const std::vector<detail::ShapeData>& pts) {
      const int na = int(pts.front().scalar.size());
      Eigen::MatrixXd kloc = Eigen::MatrixXd::Zero(3 * na, 3 * na);
      Eigen::MatrixXd accv = Eigen::MatrixXd::Zero(na, na);
      Eigen::Matrix<double, 6, 3> Ba, Bb;
      for (const auto& s : pts) {
        for (int a = 0; a < na; ++a) {
          const double gx = s.grads(a, 0), gy = s.grads(a, 1), gz = s.grads(a, 2);
          Ba << gx, 0, 0, 0, gy, 0, 0, 0, gz, 0, gz, gy, gz, 0, gx, gy, gx, 0;
          for (int b = 0; b < na; ++b) {
            const double hx = s.grads(b, 0), hy = s.grads(b, 1), hz = s.grads(b, 2);
            Bb << hx, 0, 0, 0, hy, 0, 0, 0, hz, 0, hz, hy, hz, 0, hx, hy, hx, 0;
            kloc.block<3, 3>(3 * a, 3 * b).noalias() += s.det * (Ba.transpose() * (C * Bb));
          }
        }
        accv.noalias() += s.det * (s.values * s.values.transpose());
      }
      const auto& scalars = pts.front().scalar;
      for (int a = 0; a < na; ++a)
        for (int c = 0; c < 3; ++c) {
          const int ra = dofs.free_index(int(p), scalars[a], c);
          if (ra < 0) continue;
          for (int b = 0; b < na; ++b)
            for (int cp = 0; cp < 3; ++cp) {
              const int rb = dofs.free_index(int(p), scalars[b], cp);
              if (rb < 0) continue;
              const double kv = kloc(3 * a + c, 3 * b + cp);
              if (kv != 0.0) at.emplace_back(ra, rb, kv);
              if (c == cp) mt.emplace_back(ra, rb, mass_w[c] * accv(a, b));
            }
        }
    });
  }
  const int n = dofs.n_free;
  SparseMat A(n, n), M(n, n);
  A.setFromTriplets(at.begin(), at.end());
  M.setFromTriplets(mt.begin(), mt.end());
  return {A, M};
}

/// Reference-domain assembly at a parameter value: pulled-back tensor and
/// mass weight, density included.
inline std::pair<SparseMat, SparseMat> assemble_monolithic(const MultiPatchModel& model,
                                                           const DofMap& dofs,
                                                           const ParameterSample& mu) {
  const StiffnessVoigt C = transform_tensor(stiffness_from_engineering(mu), mu.thickness);
  return assemble_monolithic(model, dofs, C, mu.rho * mass_weight(mu.thickness));
}

}  // namespace rbeig

#include "rbeig/mortar.hpp"
