#pragma once

#include <functional>
#include <string>
#include <vector>

#include "plurigeo/hermitian_core.hpp"

namespace plurigeo {

enum class FamilyKind { flat, kahler_potential, torus_pluriclosed, hopf };

struct MetricFamily {
  FamilyKind kind = FamilyKind::flat;
  double epsilon = 0.0;

  /// Throws config error when ε is outside the positivity range.
  void check() const;
  std::string name() const;
};

FamilyKind parse_family_kind(const std::string& s);

/// Real coordinates (x¹, x², x³, x⁴) with z¹ = x¹ + i x², z² = x³ + i x⁴.
using RealPoint = std::array<double, 4>;

Mat2 metric_at(const MetricFamily& fam, const RealPoint& x);
HermitianJet jet_at(const MetricFamily& fam, const RealPoint& x);
HermitianJet jet_at(const MetricFamily& fam, const std::array<cplx, 2>& z);

/// Residual of one expected invariant at a point; zero when it holds.
struct Prediction {
  std::string name;
  double tolerance;
  std::function<double(const HermitianJet&, const RealPoint&)> residual;
};

std::vector<Prediction> family_predictions(const MetricFamily& fam);

}  // namespace plurigeo
