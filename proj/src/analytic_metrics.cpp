#include "plurigeo/analytic_metrics.hpp"

#include <cmath>

namespace plurigeo {

void MetricFamily::check() const {
  if (!std::isfinite(epsilon) || epsilon < 0.0)
    throw Error(ErrorKind::config, "family parameter must be finite and nonnegative");
  if (kind == FamilyKind::kahler_potential && !(epsilon < 4.0))
    throw Error(ErrorKind::config, "kahler_potential requires 0 <= epsilon < 4");
  if (kind == FamilyKind::torus_pluriclosed && !(epsilon < 1.0))
    throw Error(ErrorKind::config, "torus_pluriclosed requires 0 <= epsilon < 1");
}

std::string MetricFamily::name() const {
  switch (kind) {
    case FamilyKind::flat: return "flat";
    case FamilyKind::kahler_potential: return "kahler_potential";
    case FamilyKind::torus_pluriclosed: return "torus_pluriclosed";
    case FamilyKind::hopf: return "hopf";
  }
  return "unknown";
}

FamilyKind parse_family_kind(const std::string& s) {
  if (s == "flat") return FamilyKind::flat;
  if (s == "kahler_potential") return FamilyKind::kahler_potential;
  if (s == "torus_pluriclosed") return FamilyKind::torus_pluriclosed;
  if (s == "hopf") return FamilyKind::hopf;
  throw Error(ErrorKind::config, "unknown family kind '" + s + "'");
}

namespace {

HermitianJet hopf_jet(const std::array<cplx, 2>& z) {
  const double rho2 = std::norm(z[0]) + std::norm(z[1]);
  if (!(rho2 > 0.0)) throw Error(ErrorKind::domain, "hopf metric undefined at the origin");
  const double r4 = rho2 * rho2;
  const double r6 = r4 * rho2;
  HermitianJet jet;
  jet.g = Mat2::Identity() / rho2;
  for (int k = 0; k < 2; ++k) {
    jet.d1[k] = Mat2::Identity() * (-std::conj(z[k]) / r4);
    for (int l = 0; l < 2; ++l) {
      const double kron = k == l ? 1.0 : 0.0;
      jet.d2m[k][l] = Mat2::Identity() * (-kron / r4 + 2.0 * std::conj(z[k]) * z[l] / r6);
      jet.d2h[k][l] = Mat2::Identity() * (2.0 * std::conj(z[k]) * std::conj(z[l]) / r6);
    }
  }
  return jet;
}

}  // namespace

Mat2 metric_at(const MetricFamily& fam, const RealPoint& x) {
  Mat2 g = Mat2::Identity();
  const double e = fam.epsilon;
  switch (fam.kind) {
    case FamilyKind::flat: break;
    case FamilyKind::kahler_potential:
      g(0, 0) = 1.0 - 0.25 * e * std::cos(x[0]);
      g(1, 1) = 1.0 - 0.25 * e * std::cos(x[2]);
      break;
    case FamilyKind::torus_pluriclosed:
      g(0, 1) = e * std::exp(I_unit * x[2]);
      g(1, 0) = std::conj(g(0, 1));
      break;
    case FamilyKind::hopf:
      return hopf_jet({cplx{x[0], x[1]}, cplx{x[2], x[3]}}).g;
  }
  return g;
}

HermitianJet jet_at(const MetricFamily& fam, const RealPoint& x) {
  fam.check();
  HermitianJet jet;
  jet.g = metric_at(fam, x);
  const double e = fam.epsilon;
  switch (fam.kind) {
    case FamilyKind::flat: break;
    case FamilyKind::kahler_potential: {
      // ∂_z = ½ ∂_x on x-only profiles, ∂_z ∂_z̄ = ∂_z ∂_z = ¼ ∂²_x
      const std::array<double, 2> th{x[0], x[2]};
      for (int k = 0; k < 2; ++k) {
        jet.d1[k](k, k) = 0.125 * e * std::sin(th[k]);
        jet.d2m[k][k](k, k) = 0.0625 * e * std::cos(th[k]);
        jet.d2h[k][k](k, k) = 0.0625 * e * std::cos(th[k]);
      }
      break;
    }
    case FamilyKind::torus_pluriclosed: {
      const cplx ph = std::exp(I_unit * x[2]);
      jet.d1[1](0, 1) = 0.5 * I_unit * e * ph;
      jet.d1[1](1, 0) = -0.5 * I_unit * e * std::conj(ph);
      jet.d2m[1][1](0, 1) = -0.25 * e * ph;
      jet.d2m[1][1](1, 0) = -0.25 * e * std::conj(ph);
      jet.d2h[1][1](0, 1) = -0.25 * e * ph;
      jet.d2h[1][1](1, 0) = -0.25 * e * std::conj(ph);
      break;
    }
    case FamilyKind::hopf:
      return hopf_jet({cplx{x[0], x[1]}, cplx{x[2], x[3]}});
  }
  return jet;
}

HermitianJet jet_at(const MetricFamily& fam, const std::array<cplx, 2>& z) {
  return jet_at(fam, RealPoint{z[0].real(), z[0].imag(), z[1].real(), z[1].imag()});
}

std::vector<Prediction> family_predictions(const MetricFamily& fam) {
  std::vector<Prediction> out;
  auto rel = [](const Mat2& a, const Mat2& b) {
    return max_abs(a - b) / std::max(1.0, std::max(max_abs(a), max_abs(b)));
  };
  auto b_zero = Prediction{"pluriclosed", 1e-14, [](const HermitianJet& j, const RealPoint&) {
                             return pluriclosed_residual(j);
                           }};
  switch (fam.kind) {
    case FamilyKind::flat:
      out.push_back(b_zero);
      out.push_back({"rhs_zero", 1e-14, [](const HermitianJet& j, const RealPoint&) {
                       return max_abs(gflow_rhs(j));
                     }});
      break;
    case FamilyKind::hopf:
      out.push_back({"s_equals_g", 1e-10, [rel](const HermitianJet& j, const RealPoint&) {
                       return rel(chern_curvature(j).S, j.g);
                     }});
      out.push_back({"q1_equals_g", 1e-10, [rel](const HermitianJet& j, const RealPoint&) {
                       return rel(torsion_quadratics(j).Q1, j.g);
                     }});
      out.push_back({"rhs_zero", 1e-10, [](const HermitianJet& j, const RealPoint&) {
                       return max_abs(gflow_rhs(j)) / std::max(1.0, max_abs(j.g));
                     }});
      out.push_back(b_zero);
      out.back().tolerance = 1e-10;
      break;
    case FamilyKind::kahler_potential:
      out.push_back({"torsion_zero", 1e-14, [](const HermitianJet& j, const RealPoint&) {
                       return torsion(j).T.max_abs();
                     }});
      out.push_back(b_zero);
      out.push_back({"rhs_kahler_ricci", 1e-10, [rel](const HermitianJet& j, const RealPoint&) {
                       return rel(gflow_rhs(j), -kahler_ricci(j));
                     }});
      break;
    case FamilyKind::torus_pluriclosed: {
      const double e = fam.epsilon;
      out.push_back(b_zero);
      out.push_back({"torsion_value", 1e-14, [e](const HermitianJet& j, const RealPoint& x) {
                       const Tensor3 T = torsion(j).T;
                       const cplx expect = -0.5 * I_unit * e * std::exp(I_unit * x[2]);
                       return std::max(std::abs(T(0, 1, 1) - expect), std::abs(T(0, 1, 0)));
                     }});
      out.push_back({"det_constant", 1e-14, [e](const HermitianJet& j, const RealPoint&) {
                       const cplx det = j.g(0, 0) * j.g(1, 1) - j.g(0, 1) * j.g(1, 0);
                       return std::abs(det - (1.0 - e * e));
                     }});
      break;
    }
  }
  return out;
}

}  // namespace plurigeo
