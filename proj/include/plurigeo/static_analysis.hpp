#pragma once

#include <json.hpp>

#include "plurigeo/torus_grid.hpp"

namespace plurigeo {

struct LambdaEstimate {
  double value = 0.0;
  double imag_residue = 0.0;
};

/// λ* = ∫⟨Φ, ω⟩ dV / ∫⟨ω, ω⟩ dV.
LambdaEstimate lambda_estimate(const MetricField& field);

struct StaticReport {
  double lambda = 0.0;
  double lambda_imag_residue = 0.0;
  double residual_l2 = 0.0;   ///< of Φ − λ*ω, g-norm
  double residual_max = 0.0;
  double degree = 0.0;
  double vol = 0.0;
  double E_w = 0.0;
  double trace_phi_integral = 0.0;  ///< ∫ tr_g Φ dV
  double gap_volume = 0.0;          ///< (d − 2λ*Vol) − 2E_w
  double gap_volume_check = 0.0;    ///< d − ∫ tr_g Φ dV − 2E_w
  double c1M_c1L = 0.0;
  double deg_L = 0.0;
  double gap_line_bundle = 0.0;     ///< c₁(M)·c₁(L) − λ*·deg L
  double c1_squared = 0.0;
  double bound_lower = 0.0;         ///< c₁² − 2λ*d + ½d²
  double bound_upper = 0.0;         ///< −c₁² + ½d²
};

StaticReport static_report(const MetricField& field, const Mat2& c1L);
nlohmann::json to_json(const StaticReport& r);

struct BuchdahlResult {
  double gap = 0.0;
  double scale = 1.0;
  double omega_psi = 0.0;  ///< ∫ ω∧ψ
  double omega_sq = 0.0;   ///< ∫ ω∧ω
  double psi_sq = 0.0;     ///< ∫ ψ∧ψ
  double max_pluriclosed_resid = 0.0;
};

/// ψ given by (i/2)-coefficient blocks on the grid of ω.
BuchdahlResult buchdahl_check(const MetricField& omega, const std::vector<Mat2>& psi,
                              double pluriclosed_tol = 1e-6);

struct HermitianSymplectic {
  FormField omega_tilde;
  FormNorms closedness;  ///< dω̃
  FormNorms identity;    ///< dω̃ + (1/λ) d(Φ − λω)
  double self_intersection = 0.0;
  double volume = 0.0;
};

HermitianSymplectic hermitian_symplectic(const MetricField& field, double lambda);

}  // namespace plurigeo
