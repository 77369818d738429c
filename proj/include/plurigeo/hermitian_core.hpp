#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "plurigeo/types.hpp"

namespace plurigeo {

/// Metric coefficients with first and second derivatives at one point of a
/// complex surface.
///
///   g(i,j)         = g_{i j̄}
///   d1[k](i,j)     = ∂_k g_{i j̄}
///   d2m[k][l](i,j) = ∂_k ∂_{l̄} g_{i j̄}
///   d2h[k][l](i,j) = ∂_k ∂_l g_{i j̄}
///
/// Antiholomorphic first derivatives are derived: ∂_{k̄} g_{i j̄} = conj(∂_k g_{j ī}).
struct HermitianJet {
  Mat2 g = Mat2::Identity();
  std::array<Mat2, 2> d1{Mat2::Zero(), Mat2::Zero()};
  std::array<std::array<Mat2, 2>, 2> d2m{{{Mat2::Zero(), Mat2::Zero()},
                                          {Mat2::Zero(), Mat2::Zero()}}};
  std::array<std::array<Mat2, 2>, 2> d2h{{{Mat2::Zero(), Mat2::Zero()},
                                          {Mat2::Zero(), Mat2::Zero()}}};

  /// ∂_{k̄} g_{i j̄}
  cplx dbar(int k, int i, int j) const { return std::conj(d1[k](j, i)); }

  static HermitianJet flat() { return HermitianJet{}; }
};

/// Max deviation from the Hermitian / symmetry / reality constraints.
double jet_symmetry_deviation(const HermitianJet& jet);

/// Throws on non-Hermitian or non-positive g.
void validate(const HermitianJet& jet);

/// Real 2-form split by type. p20 = φ_{12}, p02 = ψ_{1̄2̄}, and
/// p11 is b with β^{(1,1)} = (i/2) b_{i j̄} dz^i ∧ dz̄^j.
struct TwoForm {
  cplx p20{0.0, 0.0};
  Mat2 p11 = Mat2::Zero();
  cplx p02{0.0, 0.0};

  bool is_real(double tol) const;
  static TwoForm from_metric(const Mat2& g) { return {cplx{}, g, cplx{}}; }
};

/// Inverse metric with gi(k,l) = g^{k l̄}.
Mat2 inverse_metric(const Mat2& g);

/// ⟨b,c⟩ = Σ gi(i,l) gi(m,j) b(i,j) conj(c(l,m)).
cplx pairing(const Mat2& gi, const Mat2& b, const Mat2& c);

/// β∧γ coefficient of dx¹dx²dx³dx⁴ for (1,1) blocks.
cplx wedge_pair(const Mat2& b, const Mat2& c);

/// Shared first-order quantities at a point.
struct Geometry {
  const HermitianJet* jet = nullptr;
  Mat2 gi;                ///< g^{k l̄}
  Tensor3 gamma;          ///< Γ(k,i,j) = Γ^k_{ij}
  Tensor3 T;              ///< T(i,j,k) = T_{i j k̄}
  std::array<cplx, 2> w;  ///< w_i

  explicit Geometry(const HermitianJet& jet);
};

Tensor3 chern_connection(const HermitianJet& jet);

struct Torsion {
  Tensor3 T;
  std::array<cplx, 2> w;
};
Torsion torsion(const HermitianJet& jet);

struct Curvature {
  Tensor4 omega;  ///< omega(i,j,k,l) = Ω_{i j̄ k l̄}
  Mat2 S;
  Mat2 P;
  double s = 0.0;
};
Curvature chern_curvature(const Geometry& geo);
Curvature chern_curvature(const HermitianJet& jet);

struct TorsionQuadratics {
  Mat2 Q1;
  Mat2 Q2;
  double T2 = 0.0;
};
TorsionQuadratics torsion_quadratics(const Geometry& geo);
TorsionQuadratics torsion_quadratics(const HermitianJet& jet);

/// Second-order outputs are (i/2)-coefficient blocks.
struct HodgeOperators {
  std::array<cplx, 2> dstar;      ///< (∂*ω)_{k̄}
  std::array<cplx, 2> dbarstar;   ///< (∂̄*ω)_j
  Mat2 ddstar;                    ///< ∂∂*ω
  Mat2 dbar_dbarstar;             ///< ∂̄∂̄*ω
  Mat2 log_det;                   ///< ∂∂̄ log det g, so ρ_C has block log_det
  Mat2 phi;                       ///< Φ(ω)
};
HodgeOperators hodge_operators(const Geometry& geo);
HodgeOperators hodge_operators(const HermitianJet& jet);

/// ∂_t g = −S + Q¹.
Mat2 gflow_rhs(const Geometry& geo);
Mat2 gflow_rhs(const HermitianJet& jet);

/// −∂∂̄ log det g via the determinant product rule.
Mat2 kahler_ricci(const HermitianJet& jet);

/// |B| with B = g_{11̄,22̄} + g_{22̄,11̄} − g_{12̄,21̄} − g_{21̄,12̄}.
double pluriclosed_residual(const HermitianJet& jet);

struct CovariantTorsion {
  Tensor4 nabla_bar_T;  ///< (s,r,q,k) = ∇_{s̄} T_{r q k̄}
  Tensor4 nabla_T;      ///< (a,i,j,k) = ∇_a T_{i j k̄}
  Mat2 div_nabla_T;     ///< g^{p q̄} ∇_{q̄} T_{p i j̄}
  Mat2 div_nabla_T_bar; ///< (i,j) = g^{k l̄} ∇_k T_{l̄ j̄ i}
  Mat2 nabla_w;         ///< (i,j) = ∇_{j̄} w_i
};
CovariantTorsion covariant_torsion_ops(const Geometry& geo);
CovariantTorsion covariant_torsion_ops(const HermitianJet& jet);

/// ‖∇^{(1,0)}T‖²_g and ‖∇^{(0,1)}T‖²_g.
std::pair<double, double> torsion_gradient_norms(const Geometry& geo,
                                                 const CovariantTorsion& ct);

/// ∂_a |T|².
std::array<cplx, 2> grad_torsion_norm(const Geometry& geo);

/// Named residuals, in a fixed order.
struct IdentityReport {
  std::vector<std::pair<std::string, double>> residuals;
  double curvature_q2_half_scalar_gap = 0.0;  ///< audit only, not gating
  double pluriclosed_B = 0.0;
};

/// Throws precondition error when the flag is set but |B| > tol.
IdentityReport identity_suite(const HermitianJet& jet, bool pluriclosed,
                              double pluriclosed_tol = 1e-10);

HermitianJet random_jet(std::uint64_t seed, bool pluriclosed);

}  // namespace plurigeo
