// Copyright rbeig contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbeig/splines.hpp"

namespace rbeig {

class UnsupportedGeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One spline volume: a B-spline geometry map from the parametric box into
/// physical space plus the (vector-valued, three components per control
/// point) displacement space living on the same parametric box.
struct Patch {
  TensorSplineSpace geometry;      // map space
  Eigen::MatrixXd control_points;  // geometry.dim() x 3, direction 0 fastest
  TensorSplineSpace displacement;  // scalar space shared by all 3 components

  Eigen::Vector3d point(const Eigen::Vector3d& u) const {
    Eigen::Vector3d x = Eigen::Vector3d::Zero();
    std::array<BasisEval, 3> e;
    for (int d = 0; d < 3; ++d) e[d] = geometry.kv(d).eval_basis(u[d]);
    const int p0 = geometry.kv(0).degree(), p1 = geometry.kv(1).degree(),
              p2 = geometry.kv(2).degree();
    for (int k = 0; k <= p2; ++k)
      for (int j = 0; j <= p1; ++j)
        for (int i = 0; i <= p0; ++i) {
          const double w = e[0].values[i] * e[1].values[j] * e[2].values[k];
          const int idx = geometry.index(e[0].first + i, e[1].first + j, e[2].first + k);
          x += w * control_points.row(idx).transpose();
        }
    return x;
  }

  /// Columns are d(point)/d(u_j).
  Eigen::Matrix3d jacobian(const Eigen::Vector3d& u) const {
    Eigen::Matrix3d J = Eigen::Matrix3d::Zero();
    std::array<BasisEval, 3> e;
    for (int d = 0; d < 3; ++d) e[d] = geometry.kv(d).eval_basis(u[d]);
    const int p0 = geometry.kv(0).degree(), p1 = geometry.kv(1).degree(),
              p2 = geometry.kv(2).degree();
    for (int k = 0; k <= p2; ++k)
      for (int j = 0; j <= p1; ++j)
        for (int i = 0; i <= p0; ++i) {
          const int idx = geometry.index(e[0].first + i, e[1].first + j, e[2].first + k);
          const Eigen::Vector3d cp = control_points.row(idx).transpose();
          J.col(0) += (e[0].derivs[i] * e[1].values[j] * e[2].values[k]) * cp;
          J.col(1) += (e[0].values[i] * e[1].derivs[j] * e[2].values[k]) * cp;
          J.col(2) += (e[0].values[i] * e[1].values[j] * e[2].derivs[k]) * cp;
        }
    return J;
  }

  /// Volume parameters of a point on face f given normalized face
  /// coordinates (a, b) in [0,1]^2 along the ascending face axes.
  Eigen::Vector3d face_param(int f, double a, double b) const {
    const int d = f / 2, side = f % 2;
    const auto ax = face_axes(f);
    Eigen::Vector3d u;
    u[d] = side ? geometry.kv(d).back() : geometry.kv(d).front();
    const auto& k0 = geometry.kv(ax[0]);
    const auto& k1 = geometry.kv(ax[1]);
    u[ax[0]] = k0.front() + a * (k0.back() - k0.front());
    u[ax[1]] = k1.front() + b * (k1.back() - k1.front());
    return u;
  }
};

struct PatchFace {
  int patch = -1;
  int face = -1;
  friend bool operator==(const PatchFace&, const PatchFace&) = default;
};

/// Axis-aligned identification of two matching faces in normalized face
/// coordinates: optional axis swap followed by per-axis orientation flips.
struct FaceCorrespondence {
  bool swap = false;
  bool flip0 = false;
  bool flip1 = false;

  std::array<double, 2> map(double a, double b) const {
    if (swap) std::swap(a, b);
    return {flip0 ? 1.0 - a : a, flip1 ? 1.0 - b : b};
  }
};

/// Weakly coupled pair of faces; the multiplier space lives on the slave side.
struct Interface {
  PatchFace slave;
  PatchFace master;
  FaceCorrespondence correspondence;
};

/// Patches plus interface and boundary topology. Immutable in use.
struct MultiPatchModel {
  std::vector<Patch> patches;
  std::vector<Interface> interfaces;
  std::vector<PatchFace> dirichlet;  // strongly clamped faces

  double diameter() const {
    Eigen::Vector3d lo = Eigen::Vector3d::Constant(1e300);
    Eigen::Vector3d hi = -lo;
    for (const auto& p : patches) {
      lo = lo.cwiseMin(p.control_points.colwise().minCoeff().transpose());
      hi = hi.cwiseMax(p.control_points.colwise().maxCoeff().transpose());
    }
    return (hi - lo).norm();
  }
};

/// Maximum surface-point mismatch of an interface over an (n+1)^2 sample grid.
inline double interface_mismatch(const MultiPatchModel& model, const Interface& itf,
                                 int n = 8) {
  const Patch& ps = model.patches.at(itf.slave.patch);
  const Patch& pm = model.patches.at(itf.master.patch);
  double worst = 0.0;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      const double a = double(i) / n, b = double(j) / n;
      const auto mab = itf.correspondence.map(a, b);
      const Eigen::Vector3d xs = ps.point(ps.face_param(itf.slave.face, a, b));
      const Eigen::Vector3d xm = pm.point(pm.face_param(itf.master.face, mab[0], mab[1]));
      worst = std::max(worst, (xs - xm).norm());
    }
  return worst;
}

/// Finds the axis-aligned identification under which the two faces coincide.
inline FaceCorrespondence detect_correspondence(const MultiPatchModel& model,
                                                const PatchFace& slave,
                                                const PatchFace& master,
                                                double tol = 1e-10) {
  const double scale = std::max(model.diameter(), 1.0);
  for (int s = 0; s < 2; ++s)
    for (int f0 = 0; f0 < 2; ++f0)
      for (int f1 = 0; f1 < 2; ++f1) {
        Interface cand{slave, master, {s != 0, f0 != 0, f1 != 0}};
        if (interface_mismatch(model, cand, 4) <= tol * scale)
          return cand.correspondence;
      }
  throw UnsupportedGeometryError(
      "detect_correspondence: faces do not coincide under any axis-aligned identification");
}

/// Physically scaled copy: third coordinate of every control point is
/// multiplied by the thickness factor. Serves as the oracle counterpart of
/// the reference-domain pullback.
inline MultiPatchModel apply_thickness(const MultiPatchModel& model, double thickness) {
  if (thickness <= 0.0)
    throw std::invalid_argument("apply_thickness: thickness must be positive");
  MultiPatchModel scaled = model;
  for (auto& p : scaled.patches) p.control_points.col(2) *= thickness;
  return scaled;
}

// --- shipped test geometries ---

/// Trilinear parallelepiped patch spanned by three edge vectors, with a
/// uniform open displacement space of the given degree and element counts.
inline Patch make_box_patch(const Eigen::Vector3d& corner, const Eigen::Vector3d& d0,
                            const Eigen::Vector3d& d1, const Eigen::Vector3d& d2,
                            const std::array<int, 3>& degrees,
                            const std::array<int, 3>& elements) {
  Patch p;
  KnotVector lin(1, {0.0, 0.0, 1.0, 1.0});
  p.geometry = TensorSplineSpace(lin, lin, lin);
  p.control_points.resize(8, 3);
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i)
        p.control_points.row(i + 2 * (j + 2 * k)) =
            (corner + i * d0 + j * d1 + k * d2).transpose();
  p.displacement =
      TensorSplineSpace(KnotVector::uniform_open(degrees[0], elements[0]),
                        KnotVector::uniform_open(degrees[1], elements[1]),
                        KnotVector::uniform_open(degrees[2], elements[2]));
  return p;
}

struct TestGeometryOptions {
  int degree = 2;
  int refine = 1;      // multiplies all element counts
  bool clamped = true; // keep the documented Dirichlet face
};

/// Shipped desk-scale geometries. All are thin plates with the thickness
/// direction along z and the mounting face x = 0 clamped, so the lowest
/// modes are bending-dominated.
///
///  unit_cube : single patch on [0,1]^3, no interfaces
///  slab2     : two-patch plate of thickness 0.2 with one interface at x = 1;
///              the slave mesh is finer than the master mesh
///  bracket3  : three-patch L-shaped plate, two interfaces on opposite faces
///              of the middle patch (crosspoint-free), sheared third arm
inline MultiPatchModel build_test_geometry(const std::string& name,
                                           const TestGeometryOptions& opt = {}) {
  const int p = opt.degree;
  const int r = opt.refine;
  if (p < 1 || r < 1)
    throw std::invalid_argument("build_test_geometry: degree and refine must be >= 1");
  const Eigen::Vector3d ex(1, 0, 0), ey(0, 1, 0), ez(0, 0, 1);
  MultiPatchModel m;
  auto el = [r](int a, int b, int c) {
    return std::array<int, 3>{a * r, b * r, c * r};
  };
  const std::array<int, 3> deg{p, p, p};

  if (name == "unit_cube") {
    m.patches.push_back(make_box_patch({0, 0, 0}, ex, ey, ez, deg, el(3, 3, 2)));
    if (opt.clamped) m.dirichlet.push_back({0, 0});
  } else if (name == "slab2") {
    const double h = 0.2;
    m.patches.push_back(make_box_patch({0, 0, 0}, ex, ey, h * ez, deg, el(2, 2, 1)));
    m.patches.push_back(make_box_patch({1, 0, 0}, ex, ey, h * ez, deg, el(3, 3, 2)));
    m.interfaces.push_back({{1, 0}, {0, 1}, {}});
    if (opt.clamped) m.dirichlet.push_back({0, 0});
  } else if (name == "slab2_matching") {
    const double h = 0.2;
    m.patches.push_back(make_box_patch({0, 0, 0}, ex, ey, h * ez, deg, el(3, 3, 1)));
    m.patches.push_back(make_box_patch({1, 0, 0}, ex, ey, h * ez, deg, el(3, 3, 1)));
    m.interfaces.push_back({{1, 0}, {0, 1}, {}});
    if (opt.clamped) m.dirichlet.push_back({0, 0});
  } else if (name == "bracket3") {
    const double h = 0.2;
    const Eigen::Vector3d arm(0.25, 1.0, 0.0);
    m.patches.push_back(make_box_patch({0, 0, 0}, ex, ey, h * ez, deg, el(3, 3, 1)));
    m.patches.push_back(make_box_patch({1, 0, 0}, ex, ey, h * ez, deg, el(4, 4, 1)));
    m.patches.push_back(make_box_patch({2, 0, 0}, arm, ey, h * ez, deg, el(3, 5, 1)));
    m.interfaces.push_back({{1, 0}, {0, 1}, {}});
    m.interfaces.push_back({{2, 0}, {1, 1}, {}});
    if (opt.clamped) m.dirichlet.push_back({0, 0});
  } else {
    throw std::invalid_argument("build_test_geometry: unknown geometry '" + name + "'");
  }

  for (auto& itf : m.interfaces)
    itf.correspondence = detect_correspondence(m, itf.slave, itf.master);
  return m;
}

// --- JSON persistence ---

inline nlohmann::json knots_to_json(const TensorSplineSpace& s) {
  nlohmann::json j = nlohmann::json::array();
  for (int d = 0; d < 3; ++d) j.push_back(s.kv(d).knots());
  return j;
}

inline TensorSplineSpace space_from_json(const nlohmann::json& degrees,
                                         const nlohmann::json& knots) {
  return TensorSplineSpace(
      KnotVector(degrees.at(0).get<int>(), knots.at(0).get<std::vector<double>>()),
      KnotVector(degrees.at(1).get<int>(), knots.at(1).get<std::vector<double>>()),
      KnotVector(degrees.at(2).get<int>(), knots.at(2).get<std::vector<double>>()));
}

inline nlohmann::json model_to_json(const MultiPatchModel& m) {
  nlohmann::json j;
  j["patches"] = nlohmann::json::array();
  for (const auto& p : m.patches) {
    nlohmann::json jp;
    jp["geometry"]["degrees"] = {p.geometry.kv(0).degree(), p.geometry.kv(1).degree(),
                                 p.geometry.kv(2).degree()};
    jp["geometry"]["knots"] = knots_to_json(p.geometry);
    std::vector<std::array<double, 3>> cps(p.control_points.rows());
    for (int i = 0; i < p.control_points.rows(); ++i)
      cps[i] = {p.control_points(i, 0), p.control_points(i, 1), p.control_points(i, 2)};
    jp["geometry"]["control_points"] = cps;
    jp["displacement"]["degrees"] = {p.displacement.kv(0).degree(),
                                     p.displacement.kv(1).degree(),
                                     p.displacement.kv(2).degree()};
    jp["displacement"]["knots"] = knots_to_json(p.displacement);
    j["patches"].push_back(jp);
  }
  j["interfaces"] = nlohmann::json::array();
  for (const auto& itf : m.interfaces)
    j["interfaces"].push_back({{"slave", {{"patch", itf.slave.patch}, {"face", itf.slave.face}}},
                               {"master", {{"patch", itf.master.patch}, {"face", itf.master.face}}}});
  j["dirichlet"] = nlohmann::json::array();
  for (const auto& df : m.dirichlet)
    j["dirichlet"].push_back({{"patch", df.patch}, {"face", df.face}});
  return j;
}

inline MultiPatchModel model_from_json(const nlohmann::json& j) {
  MultiPatchModel m;
  for (const auto& jp : j.at("patches")) {
    Patch p;
    p.geometry = space_from_json(jp.at("geometry").at("degrees"), jp.at("geometry").at("knots"));
    const auto& cps = jp.at("geometry").at("control_points");
    if (int(cps.size()) != p.geometry.dim())
      throw std::invalid_argument("model_from_json: control point count mismatch");
    p.control_points.resize(p.geometry.dim(), 3);
    for (int i = 0; i < p.geometry.dim(); ++i)
      for (int c = 0; c < 3; ++c) p.control_points(i, c) = cps.at(i).at(c).get<double>();
    p.displacement =
        space_from_json(jp.at("displacement").at("degrees"), jp.at("displacement").at("knots"));
    m.patches.push_back(std::move(p));
  }
  for (const auto& ji : j.at("interfaces")) {
    Interface itf;
    itf.slave = {ji.at("slave").at("patch").get<int>(), ji.at("slave").at("face").get<int>()};
    itf.master = {ji.at("master").at("patch").get<int>(), ji.at("master").at("face").get<int>()};
    m.interfaces.push_back(itf);
  }
  for (const auto& jd : j.value("dirichlet", nlohmann::json::array()))
    m.dirichlet.push_back({jd.at("patch").get<int>(), jd.at("face").get<int>()});
  for (auto& itf : m.interfaces)
    itf.correspondence = detect_correspondence(m, itf.slave, itf.master);
  return m;
}

inline void save_model(const MultiPatchModel& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open " + path);
  out << model_to_json(m).dump(2) << "\n";
}

inline MultiPatchModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return model_from_json(j);
}

}  // namespace rbeig
