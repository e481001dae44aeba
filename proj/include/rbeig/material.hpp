// Copyright rbeig contributors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace rbeig {

using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// 6x6 stiffness in Voigt ordering (xx, yy, zz, yz, zx, xy).
using StiffnessVoigt = Matrix6d;

class NonAdmissibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One point in parameter space: nine orthotropic engineering constants
/// [MPa / dimensionless], the thickness scaling factor, and the mass density.
struct ParameterSample {
  double E_x = 0, E_y = 0, E_z = 0;     // elastic moduli
  double G_yz = 0, G_zx = 0, G_xy = 0;  // shear moduli
  double nu_yz = 0, nu_zx = 0, nu_xy = 0;
  double thickness = 1.0;  // unidirectional scaling of the third coordinate
  double rho = 720.0;      // mass density [kg/m^3]

  static constexpr int kNumBoxParams = 10;
  static constexpr std::array<const char*, kNumBoxParams> names() {
    return {"E_x", "E_y", "E_z", "G_yz", "G_zx", "G_xy", "nu_yz", "nu_zx", "nu_xy", "thickness"};
  }

  double get(int i) const {
    switch (i) {
      case 0: return E_x;
      case 1: return E_y;
      case 2: return E_z;
      case 3: return G_yz;
      case 4: return G_zx;
      case 5: return G_xy;
      case 6: return nu_yz;
      case 7: return nu_zx;
      case 8: return nu_xy;
      case 9: return thickness;
    }
    throw std::out_of_range("ParameterSample::get");
  }
  void set(int i, double v) {
    switch (i) {
      case 0: E_x = v; return;
      case 1: E_y = v; return;
      case 2: E_z = v; return;
      case 3: G_yz = v; return;
      case 4: G_zx = v; return;
      case 5: G_xy = v; return;
      case 6: nu_yz = v; return;
      case 7: nu_zx = v; return;
      case 8: nu_xy = v; return;
      case 9: thickness = v; return;
    }
    throw std::out_of_range("ParameterSample::set");
  }
};

/// Beech reference data; thickness factor 1, density 720.
inline ParameterSample reference_sample() {
  ParameterSample mu;
  mu.E_x = 14000.0;
  mu.E_y = 2280.0;
  mu.E_z = 1160.0;
  mu.G_yz = 465.0;
  mu.G_zx = 1080.0;
  mu.G_xy = 1640.0;
  mu.nu_yz = 0.36;
  mu.nu_zx = 0.0429;
  mu.nu_xy = 0.448;
  mu.thickness = 1.0;
  mu.rho = 720.0;
  return mu;
}

/// Componentwise bounds for the ten box parameters plus the admissibility
/// margins c0 (tensor determinant condition) and c1 (E_x/E_y - nu_xy^2).
struct ParameterBox {
  std::array<double, 10> lo{};
  std::array<double, 10> hi{};
  double c0 = 0.0;
  double c1 = 0.0;

  void validate() const {
    for (int i = 0; i < 10; ++i)
      if (lo[i] > hi[i]) throw std::invalid_argument("ParameterBox: lo > hi");
    if (c0 < 0 || c1 < 0) throw std::invalid_argument("ParameterBox: negative margin");
  }
};

/// Narrow single-wood-type range around the reference parameter.
inline ParameterBox box_p1(double thickness_lo = 0.5, double thickness_hi = 2.0) {
  ParameterBox b;
  b.lo = {13000, 1500, 750, 100, 500, 1000, 0.3, 0.03, 0.4, thickness_lo};
  b.hi = {15000, 3000, 1500, 1000, 1500, 2000, 0.4, 0.06, 0.5, thickness_hi};
  b.c0 = 0.0;
  b.c1 = 0.0;
  return b;
}

/// Wide multi-wood-type range; contains non-admissible corners, so positive
/// margins keep the sampled tensors uniformly definite.
inline ParameterBox box_p2(double thickness_lo = 0.5, double thickness_hi = 2.0) {
  ParameterBox b;
  b.lo = {1000, 100, 100, 10, 100, 100, 0.1, 0.01, 0.3, thickness_lo};
  b.hi = {20000, 5000, 2000, 5000, 2500, 5000, 0.5, 0.1, 0.5, thickness_hi};
  b.c0 = 1e-3;
  b.c1 = 1e-3;
  return b;
}

/// Symmetric 3x3 compliance block built from the engineering constants with
/// the reciprocity nu_ij * E_j = nu_ji * E_i applied exactly.
inline Eigen::Matrix3d compliance_block(const ParameterSample& mu) {
  if (mu.E_x <= 0 || mu.E_y <= 0 || mu.E_z <= 0)
    throw NonAdmissibleError("compliance_block: moduli must be positive");
  Eigen::Matrix3d S;
  S << 1.0 / mu.E_x, -mu.nu_xy / mu.E_x, -mu.nu_zx / mu.E_z,
      -mu.nu_xy / mu.E_x, 1.0 / mu.E_y, -mu.nu_yz / mu.E_y,
      -mu.nu_zx / mu.E_z, -mu.nu_yz / mu.E_y, 1.0 / mu.E_z;
  return S;
}

/// Dimensionless determinant margin of the compliance block,
/// det(S) * E_x E_y E_z; positive iff the normal-stress block is definite
/// (given positive moduli and the minor condition below).
inline double tensor_determinant_margin(const ParameterSample& mu) {
  return 1.0 - mu.nu_yz * mu.nu_yz * mu.E_z / mu.E_y -
         mu.nu_xy * mu.nu_xy * mu.E_y / mu.E_x -
         2.0 * mu.nu_xy * mu.nu_yz * mu.nu_zx -
         mu.nu_zx * mu.nu_zx * mu.E_x / mu.E_z;
}

/// Second-minor margin E_x/E_y - nu_xy^2 of the compliance block.
inline double minor_margin(const ParameterSample& mu) {
  return mu.E_x / mu.E_y - mu.nu_xy * mu.nu_xy;
}

/// Orthotropic stiffness in Voigt ordering: the normal block is the inverse
/// of the compliance block, the shear diagonal is (G_yz, G_zx, G_xy).
inline StiffnessVoigt stiffness_from_engineering(const ParameterSample& mu) {
  if (mu.G_yz <= 0 || mu.G_zx <= 0 || mu.G_xy <= 0)
    throw NonAdmissibleError("stiffness_from_engineering: shear moduli must be positive");
  const Eigen::Matrix3d S = compliance_block(mu);
  const double delta = tensor_determinant_margin(mu);
  if (std::abs(delta) < 1e-14)
    throw NonAdmissibleError("stiffness_from_engineering: singular compliance block");
  const Eigen::Matrix3d A = S.inverse();
  StiffnessVoigt C = StiffnessVoigt::Zero();
  C.topLeftCorner<3, 3>() = 0.5 * (A + A.transpose());
  C(3, 3) = mu.G_yz;
  C(4, 4) = mu.G_zx;
  C(5, 5) = mu.G_xy;
  return C;
}

/// True iff mu satisfies the two closed-form definiteness constraints with
/// the box margins and the assembled 6x6 tensor is numerically positive
/// definite. Never throws; any failure yields false.
inline bool check_admissibility(const ParameterSample& mu, const ParameterBox& box) {
  if (mu.E_x <= 0 || mu.E_y <= 0 || mu.E_z <= 0) return false;
  if (mu.G_yz <= 0 || mu.G_zx <= 0 || mu.G_xy <= 0) return false;
  if (mu.thickness <= 0 || mu.rho <= 0) return false;
  if (tensor_determinant_margin(mu) < box.c0) return false;
  if (minor_margin(mu) < box.c1) return false;
  try {
    const StiffnessVoigt C = stiffness_from_engineering(mu);
    Eigen::SelfAdjointEigenSolver<StiffnessVoigt> es(C, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0) > 0.0;
  } catch (const NonAdmissibleError&) {
    return false;
  }
}

/// Pullback of the stiffness tensor under the thickness map: couplings to the
/// third normal direction and the out-of-plane shear entries pick up
/// thickness^-2, the (zz,zz) entry thickness^-4; the in-plane block and G_xy
/// are unchanged.
inline StiffnessVoigt transform_tensor(const StiffnessVoigt& C, double thickness) {
  if (thickness <= 0.0)
    throw std::invalid_argument("transform_tensor: thickness must be positive");
  const double s2 = 1.0 / (thickness * thickness);
  StiffnessVoigt T = C;
  T(0, 2) *= s2;
  T(2, 0) *= s2;
  T(1, 2) *= s2;
  T(2, 1) *= s2;
  T(2, 2) *= s2 * s2;
  T(3, 3) *= s2;  // G_yz
  T(4, 4) *= s2;  // G_zx
  return T;
}

/// Componentwise mass weight on the reference domain, up to the constant
/// Jacobian factor that cancels between stiffness and mass.
inline Eigen::Vector3d mass_weight(double thickness) {
  if (thickness <= 0.0)
    throw std::invalid_argument("mass_weight: thickness must be positive");
  return {1.0, 1.0, 1.0 / (thickness * thickness)};
}

// --- JSON serialization ---

inline void to_json(nlohmann::json& j, const ParameterSample& mu) {
  j = nlohmann::json{{"E_x", mu.E_x},     {"E_y", mu.E_y},     {"E_z", mu.E_z},
                     {"G_yz", mu.G_yz},   {"G_zx", mu.G_zx},   {"G_xy", mu.G_xy},
                     {"nu_yz", mu.nu_yz}, {"nu_zx", mu.nu_zx}, {"nu_xy", mu.nu_xy},
                     {"thickness", mu.thickness}, {"rho", mu.rho}};
}

inline void from_json(const nlohmann::json& j, ParameterSample& mu) {
  j.at("E_x").get_to(mu.E_x);
  j.at("E_y").get_to(mu.E_y);
  j.at("E_z").get_to(mu.E_z);
  j.at("G_yz").get_to(mu.G_yz);
  j.at("G_zx").get_to(mu.G_zx);
  j.at("G_xy").get_to(mu.G_xy);
  j.at("nu_yz").get_to(mu.nu_yz);
  j.at("nu_zx").get_to(mu.nu_zx);
  j.at("nu_xy").get_to(mu.nu_xy);
  mu.thickness = j.value("thickness", 1.0);
  mu.rho = j.value("rho", 720.0);
}

inline void to_json(nlohmann::json& j, const ParameterBox& b) {
  j = nlohmann::json{{"lo", b.lo}, {"hi", b.hi}, {"c0", b.c0}, {"c1", b.c1}};
}

inline void from_json(const nlohmann::json& j, ParameterBox& b) {
  j.at("lo").get_to(b.lo);
  j.at("hi").get_to(b.hi);
  b.c0 = j.value("c0", 0.0);
  b.c1 = j.value("c1", 0.0);
}

}  // namespace rbeig
