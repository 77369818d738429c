#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "plurigeo/analytic_metrics.hpp"
#include "plurigeo/hermitian_core.hpp"

namespace plurigeo {

using Dims = std::array<int, 4>;

/// Periodic grid on [0, 2π)⁴, row-major with the last axis fastest.
struct Grid {
  Dims dims{8, 8, 8, 8};

  std::size_t size() const;
  double spacing(int axis) const { return 2.0 * pi / dims[axis]; }
  double cell() const;
  double h_min() const;
  std::size_t index(int i0, int i1, int i2, int i3) const;
  std::array<int, 4> coords(std::size_t idx) const;
  RealPoint point(std::size_t idx) const;
  /// Index of the node displaced by `shift` along `axis`, wrapping.
  std::size_t neighbor(std::size_t idx, int axis, int shift) const;
  bool operator==(const Grid& o) const { return dims == o.dims; }
  void check() const;
};

struct ComplexField {
  Grid grid;
  std::vector<cplx> v;
};

struct MetricField {
  Grid grid;
  std::vector<Mat2> values;

  /// Throws degenerate error on non-Hermitian or non-positive nodes.
  void validate() const;
};

struct FormField {
  Grid grid;
  std::vector<TwoForm> values;
};

/// Real-coordinate components of a 1-form: c[a] multiplies dx^a.
struct OneFormField {
  Grid grid;
  std::vector<std::array<cplx, 4>> c;
};

/// Components over pairs (01, 02, 03, 12, 13, 23).
struct RealTwoFormField {
  Grid grid;
  std::vector<std::array<cplx, 6>> c;
};

/// Components over triples (012, 013, 023, 123).
struct ThreeFormField {
  Grid grid;
  std::vector<std::array<cplx, 4>> c;
};

struct FormNorms {
  double max = 0.0;
  double l2 = 0.0;
};

MetricField sample(const MetricFamily& fam, const Dims& dims);
MetricField sample(const std::function<Mat2(const RealPoint&)>& metric, const Dims& dims);

/// 4th-order periodic central difference along axis 1..4, order 1 or 2.
ComplexField differentiate(const ComplexField& f, int axis, int order);

/// ∂_{z^k} (k = 0,1) and ∂_{z̄^k} of a scalar field.
ComplexField d_holo(const ComplexField& f, int k);
ComplexField d_antiholo(const ComplexField& f, int k);

struct JetField {
  std::vector<HermitianJet> jets;
  double symmetry_deviation = 0.0;  ///< before averaging
};

JetField jets(const MetricField& field);
/// Jets of an arbitrary Hermitian (1,1) coefficient field; no positivity check.
JetField coefficient_jets(const Grid& grid, const std::vector<Mat2>& values);

/// Periodic Riemann sum × Πh with pairwise reduction.
double integrate(const Grid& grid, const std::vector<double>& values);
double volume(const MetricField& field);

std::vector<cplx> wedge_pair(const std::vector<Mat2>& b, const std::vector<Mat2>& c);
double degree(const MetricField& field);
double degree(const MetricField& field, const JetField& jf);

/// ∫ g_{11̄} dx¹dx² on the slice {x³ = x⁴ = 0}.
double divisor_slice_integral(const MetricField& field);

std::array<cplx, 6> real_components(const TwoForm& form);
RealTwoFormField real_components(const FormField& form);
/// Coefficient of dx¹dx²dx³dx⁴ in β∧γ.
cplx wedge_real(const std::array<cplx, 6>& b, const std::array<cplx, 6>& c);

RealTwoFormField exterior_derivative(const OneFormField& a);
ThreeFormField exterior_derivative(const RealTwoFormField& b);
ThreeFormField exterior_derivative(const FormField& b);
FormNorms norms(const ThreeFormField& f);

/// Binary layout: "PLURIGEO" magic, u32 version 1, i32 dims[4], then per node
/// g11, g12, g21, g22 as (re, im) doubles, little-endian, row-major.
void write_binary(const MetricField& field, std::ostream& out);
MetricField read_binary(std::istream& in);
void save_binary(const MetricField& field, const std::string& path);
MetricField load_binary(const std::string& path);

/// CSV with header i1,i2,i3,i4,g11_re,...; refused above 65536 nodes.
void write_csv(const MetricField& field, std::ostream& out);

}  // namespace plurigeo
