#include "plurigeo/static_analysis.hpp"

#include <cmath>

#include "plurigeo/parallel.hpp"

namespace plurigeo {

namespace {

double det_real(const Mat2& g) { return (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)).real(); }

struct NodeStatic {
  cplx phi_omega;  ///< ⟨Φ, ω⟩ det g
  double omega_omega;
  double trace_phi;
  double w2;
  double degree;
  Mat2 phi;
};

std::vector<NodeStatic> node_static(const MetricField& field, const JetField& jf) {
  std::vector<NodeStatic> out(field.values.size());
  parallel_for(out.size(), [&](std::size_t i) {
    const Geometry geo(jf.jets[i]);
    const Mat2& g = field.values[i];
    const HodgeOperators h = hodge_operators(geo);
    const double det = det_real(g);
    NodeStatic& n = out[i];
    n.phi = h.phi;
    n.phi_omega = pairing(geo.gi, h.phi, g) * det;
    n.omega_omega = pairing(geo.gi, g, g).real() * det;
    cplx tr{}, w2{};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        tr += geo.gi(a, b) * h.phi(a, b);
        w2 += geo.gi(a, b) * geo.w[a] * std::conj(geo.w[b]);
      }
    n.trace_phi = tr.real() * det;
    n.w2 = w2.real() * det;
    n.degree = wedge_pair(-h.log_det, g).real();
  });
  return out;
}

template <typename F>
double integrate_by(const Grid& grid, std::size_t n, F f) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = f(i);
  return integrate(grid, v);
}

LambdaEstimate lambda_from(const Grid& grid, const std::vector<NodeStatic>& ns) {
  const std::size_t n = ns.size();
  const double re = integrate_by(grid, n, [&](std::size_t i) { return ns[i].phi_omega.real(); });
  const double im = integrate_by(grid, n, [&](std::size_t i) { return ns[i].phi_omega.imag(); });
  const double den = integrate_by(grid, n, [&](std::size_t i) { return ns[i].omega_omega; });
  return {re / den, std::abs(im / den)};
}

}  // namespace

LambdaEstimate lambda_estimate(const MetricField& field) {
  const JetField jf = jets(field);
  return lambda_from(field.grid, node_static(field, jf));
}

StaticReport static_report(const MetricField& field, const Mat2& c1L) {
  if (max_abs(c1L - c1L.adjoint()) > 1e-14)
    throw Error(ErrorKind::precondition, "c1(L) block must be Hermitian");
  const JetField jf = jets(field);
  const std::vector<NodeStatic> ns = node_static(field, jf);
  const Grid& grid = field.grid;
  const std::size_t n = ns.size();

  StaticReport r;
  const LambdaEstimate le = lambda_from(grid, ns);
  r.lambda = le.value;
  r.lambda_imag_residue = le.imag_residue;
  r.vol = volume(field);
  r.degree = integrate_by(grid, n, [&](std::size_t i) { return ns[i].degree; });
  r.E_w = integrate_by(grid, n, [&](std::size_t i) { return ns[i].w2; });
  r.trace_phi_integral = integrate_by(grid, n, [&](std::size_t i) { return ns[i].trace_phi; });

  std::vector<double> res2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Mat2 diff = ns[i].phi - r.lambda * field.values[i];
    const double v = std::max(0.0, pairing(inverse_metric(field.values[i]), diff, diff).real());
    r.residual_max = std::max(r.residual_max, std::sqrt(v));
    res2[i] = v * det_real(field.values[i]);
  }
  r.residual_l2 = std::sqrt(integrate(grid, res2));

  r.gap_volume = (r.degree - 2.0 * r.lambda * r.vol) - 2.0 * r.E_w;
  r.gap_volume_check = r.degree - r.trace_phi_integral - 2.0 * r.E_w;

  std::vector<Mat2> neg_ric(n);
  for (std::size_t i = 0; i < n; ++i) neg_ric[i] = -hodge_operators(jf.jets[i]).log_det;
  r.c1M_c1L = integrate_by(grid, n, [&](std::size_t i) { return wedge_pair(neg_ric[i], c1L).real(); });
  r.deg_L = integrate_by(grid, n, [&](std::size_t i) { return wedge_pair(c1L, field.values[i]).real(); });
  r.gap_line_bundle = r.c1M_c1L - r.lambda * r.deg_L;
  r.c1_squared = integrate_by(grid, n, [&](std::size_t i) { return wedge_pair(neg_ric[i], neg_ric[i]).real(); });
  r.bound_lower = r.c1_squared - 2.0 * r.lambda * r.degree + 0.5 * r.degree * r.degree;
  r.bound_upper = -r.c1_squared + 0.5 * r.degree * r.degree;
  return r;
}

nlohmann::json to_json(const StaticReport& r) {
  nlohmann::json j;
  j["lambda"] = r.lambda;
  j["lambda_imag_residue"] = r.lambda_imag_residue;
  j["residual_l2"] = r.residual_l2;
  j["residual_max"] = r.residual_max;
  j["degree"] = r.degree;
  j["vol"] = r.vol;
  j["E_w"] = r.E_w;
  j["trace_phi_integral"] = r.trace_phi_integral;
  j["gap_volume"] = r.gap_volume;
  j["gap_volume_check"] = r.gap_volume_check;
  j["c1M_c1L"] = r.c1M_c1L;
  j["deg_L"] = r.deg_L;
  j["gap_line_bundle"] = r.gap_line_bundle;
  j["c1_squared"] = r.c1_squared;
  j["bound_lower"] = r.bound_lower;
  j["bound_upper"] = r.bound_upper;
  return j;
}

BuchdahlResult buchdahl_check(const MetricField& omega, const std::vector<Mat2>& psi,
                              double pluriclosed_tol) {
  omega.validate();
  if (psi.size() != omega.values.size())
    throw Error(ErrorKind::precondition, "psi grid does not match omega");
  for (const Mat2& b : psi)
    if (max_abs(b - b.adjoint()) > 1e-12 * std::max(1.0, max_abs(b)))
      throw Error(ErrorKind::precondition, "psi is not a real (1,1) form");
  BuchdahlResult r;
  const JetField jf = coefficient_jets(omega.grid, psi);
  for (const auto& j : jf.jets) r.max_pluriclosed_resid = std::max(r.max_pluriclosed_resid, pluriclosed_residual(j));
  if (r.max_pluriclosed_resid > pluriclosed_tol) throw Error(ErrorKind::precondition, "psi not pluriclosed");

  const Grid& grid = omega.grid;
  const std::size_t n = psi.size();
  r.omega_psi = integrate_by(grid, n, [&](std::size_t i) { return wedge_pair(omega.values[i], psi[i]).real(); });
  r.omega_sq = integrate_by(grid, n, [&](std::size_t i) { return wedge_pair(omega.values[i], omega.values[i]).real(); });
  r.psi_sq = integrate_by(grid, n, [&](std::size_t i) { return wedge_pair(psi[i], psi[i]).real(); });
  r.gap = r.omega_psi * r.omega_psi - r.omega_sq * r.psi_sq;
  r.scale = std::max({1.0, r.omega_psi * r.omega_psi, std::abs(r.omega_sq * r.psi_sq)});
  return r;
}

HermitianSymplectic hermitian_symplectic(const MetricField& field, double lambda) {
  if (lambda == 0.0 || !std::isfinite(lambda))
    throw Error(ErrorKind::precondition, "construction undefined at lambda = 0");
  const JetField jf = jets(field);
  const Grid& grid = field.grid;
  const std::size_t n = field.values.size();

  std::array<ComplexField, 2> alpha{ComplexField{grid, std::vector<cplx>(n)},
                                    ComplexField{grid, std::vector<cplx>(n)}};
  std::array<ComplexField, 2> beta = alpha;
  std::vector<Mat2> phi(n);
  parallel_for(n, [&](std::size_t i) {
    const HodgeOperators h = hodge_operators(jf.jets[i]);
    for (int k = 0; k < 2; ++k) {
      alpha[k].v[i] = h.dstar[k];
      beta[k].v[i] = h.dbarstar[k];
    }
    phi[i] = h.phi;
  });
  // ∂β coefficient of dz¹∧dz², ∂̄α coefficient of dz̄¹∧dz̄²
  const ComplexField d1b2 = d_holo(beta[1], 0), d2b1 = d_holo(beta[0], 1);
  const ComplexField d1a2 = d_antiholo(alpha[1], 0), d2a1 = d_antiholo(alpha[0], 1);

  HermitianSymplectic out;
  out.omega_tilde.grid = grid;
  out.omega_tilde.values.resize(n);
  FormField defect{grid, std::vector<TwoForm>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    TwoForm& t = out.omega_tilde.values[i];
    t.p11 = field.values[i];
    t.p20 = -(d1b2.v[i] - d2b1.v[i]) / lambda;
    t.p02 = -(d1a2.v[i] - d2a1.v[i]) / lambda;
    defect.values[i].p11 = (phi[i] - lambda * field.values[i]) / lambda;
  }
  RealTwoFormField tilde = real_components(out.omega_tilde);
  const RealTwoFormField extra = real_components(defect);
  out.closedness = norms(exterior_derivative(tilde));

  std::vector<double> self(n);
  for (std::size_t i = 0; i < n; ++i) self[i] = wedge_real(tilde.c[i], tilde.c[i]).real();
  out.self_intersection = integrate(grid, self);
  out.volume = volume(field);

  for (std::size_t i = 0; i < n; ++i)
    for (int p = 0; p < 6; ++p) tilde.c[i][p] += extra.c[i][p];
  out.identity = norms(exterior_derivative(tilde));
  return out;
}

}  // namespace plurigeo
