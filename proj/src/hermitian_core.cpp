#include "plurigeo/hermitian_core.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace plurigeo {

namespace {

constexpr std::array<Slot, 3> torsion_sig{Slot::holo, Slot::holo, Slot::anti};
constexpr std::array<Slot, 4> curvature_sig{Slot::holo, Slot::anti, Slot::holo,
                                            Slot::anti};

double scale_of(std::initializer_list<double> terms) {
  double m = 1.0;
  for (double t : terms) m = std::max(m, t);
  return m;
}

double max_abs4(const Tensor4& t) { return t.max_abs(); }

/// ∂_{q̄} T_{i j k̄}
cplx dT_bar(const HermitianJet& jet, int i, int j, int k, int q) {
  return jet.d2m[i][q](j, k) - jet.d2m[j][q](i, k);
}

/// ∂_a T_{i j k̄}
cplx dT_hol(const HermitianJet& jet, int a, int i, int j, int k) {
  return jet.d2h[a][i](j, k) - jet.d2h[a][j](i, k);
}

/// ∂_a g^{p q̄}
cplx dgi_hol(const Geometry& geo, int a, int p, int q) {
  cplx acc{};
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n)
      acc -= geo.gi(p, m) * geo.jet->d1[a](n, m) * geo.gi(n, q);
  return acc;
}

/// ∂_{ā} g^{p q̄}
cplx dgi_bar(const Geometry& geo, int a, int p, int q) {
  cplx acc{};
  for (int m = 0; m < 2; ++m)
    for (int n = 0; n < 2; ++n)
      acc -= geo.gi(p, m) * geo.jet->dbar(a, n, m) * geo.gi(n, q);
  return acc;
}

}  // namespace

double jet_symmetry_deviation(const HermitianJet& jet) {
  double dev = max_abs(jet.g - jet.g.adjoint());
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      dev = std::max(dev, max_abs(jet.d2h[k][l] - jet.d2h[l][k]));
      dev = std::max(dev, max_abs(jet.d2m[k][l].conjugate() -
                                  jet.d2m[l][k].transpose()));
    }
  return dev;
}

void validate(const HermitianJet& jet) {
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      if (!std::isfinite(jet.g(i, j).real()) || !std::isfinite(jet.g(i, j).imag()))
        throw Error(ErrorKind::singular_metric, "metric not finite");
  const double herm = max_abs(jet.g - jet.g.adjoint());
  if (herm > 1e-12 * std::max(1.0, max_abs(jet.g)))
    throw Error(ErrorKind::precondition, "metric not Hermitian");
  const double a = jet.g(0, 0).real();
  const double det = (jet.g(0, 0) * jet.g(1, 1) - jet.g(0, 1) * jet.g(1, 0)).real();
  if (!(a > 0.0) || !(det > 0.0))
    throw Error(ErrorKind::singular_metric, "metric not positive definite");
}

bool TwoForm::is_real(double tol) const {
  return max_abs(p11 - p11.adjoint()) <= tol && std::abs(p02 - std::conj(p20)) <= tol;
}

Mat2 inverse_metric(const Mat2& g) {
  const cplx det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  if (!(std::abs(det) > 1e-300) || !std::isfinite(std::abs(det)))
    throw Error(ErrorKind::singular_metric, "metric not invertible");
  Mat2 inv;
  inv << g(1, 1) / det, -g(0, 1) / det, -g(1, 0) / det, g(0, 0) / det;
  return inv.transpose();
}

cplx pairing(const Mat2& gi, const Mat2& b, const Mat2& c) {
  cplx acc{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int l = 0; l < 2; ++l)
        for (int m = 0; m < 2; ++m)
          acc += gi(i, l) * gi(m, j) * b(i, j) * std::conj(c(l, m));
  return acc;
}

cplx wedge_pair(const Mat2& b, const Mat2& c) {
  return b(0, 0) * c(1, 1) + b(1, 1) * c(0, 0) - b(0, 1) * c(1, 0) - b(1, 0) * c(0, 1);
}

Geometry::Geometry(const HermitianJet& j)
    : jet(&j),
      gi(inverse_metric(j.g)),
      gamma({Slot::holo, Slot::holo, Slot::holo}),
      T(torsion_sig) {
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int jj = 0; jj < 2; ++jj) {
        cplx acc{};
        for (int l = 0; l < 2; ++l) acc += gi(k, l) * j.d1[i](jj, l);
        gamma(k, i, jj) = acc;
      }
  for (int i = 0; i < 2; ++i)
    for (int jj = 0; jj < 2; ++jj)
      for (int k = 0; k < 2; ++k) T(i, jj, k) = j.d1[i](jj, k) - j.d1[jj](i, k);
  for (int i = 0; i < 2; ++i) {
    cplx acc{};
    for (int jj = 0; jj < 2; ++jj)
      for (int k = 0; k < 2; ++k) acc += gi(jj, k) * T(i, jj, k);
    w[i] = acc;
  }
}

Tensor3 chern_connection(const HermitianJet& jet) { return Geometry(jet).gamma; }

Torsion torsion(const HermitianJet& jet) {
  Geometry geo(jet);
  return {geo.T, geo.w};
}

Curvature chern_curvature(const Geometry& geo) {
  const HermitianJet& jet = *geo.jet;
  Curvature out;
  out.omega = Tensor4(curvature_sig);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          cplx acc = -jet.d2m[i][j](k, l);
          for (int m = 0; m < 2; ++m)
            for (int n = 0; n < 2; ++n)
              acc += geo.gi(m, n) * jet.d1[i](k, n) * std::conj(jet.d1[j](l, m));
          out.omega(i, j, k, l) = acc;
        }
  out.S = Mat2::Zero();
  out.P = Mat2::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          out.S(k, l) += geo.gi(i, j) * out.omega(i, j, k, l);
          out.P(i, j) += geo.gi(k, l) * out.omega(i, j, k, l);
        }
  cplx s{};
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) s += geo.gi(k, l) * out.S(k, l);
  out.s = s.real();
  return out;
}

Curvature chern_curvature(const HermitianJet& jet) {
  return chern_curvature(Geometry(jet));
}

TorsionQuadratics torsion_quadratics(const Geometry& geo) {
  TorsionQuadratics out;
  out.Q1 = Mat2::Zero();
  out.Q2 = Mat2::Zero();
  const auto& T = geo.T;
  const auto& gi = geo.gi;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          for (int m = 0; m < 2; ++m)
            for (int n = 0; n < 2; ++n) {
              const cplx gg = gi(k, l) * gi(m, n);
              out.Q1(i, j) += gg * T(i, k, n) * std::conj(T(j, l, m));
              out.Q2(i, j) += gg * std::conj(T(l, n, i)) * T(k, m, j);
            }
  cplx t2{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t2 += gi(i, j) * out.Q1(i, j);
  out.T2 = t2.real();
  return out;
}

TorsionQuadratics torsion_quadratics(const HermitianJet& jet) {
  return torsion_quadratics(Geometry(jet));
}

HodgeOperators hodge_operators(const Geometry& geo) {
  const HermitianJet& jet = *geo.jet;
  const auto& gi = geo.gi;
  const cplx half_i{0.0, 0.5};
  HodgeOperators out;

  for (int k = 0; k < 2; ++k) {
    cplx acc{};
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        acc += gi(p, q) * (jet.dbar(q, p, k) - jet.dbar(k, p, q));
    out.dstar[k] = half_i * acc;
  }
  for (int j = 0; j < 2; ++j) {
    cplx acc{};
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q) acc += gi(p, q) * (jet.d1[j](p, q) - jet.d1[p](j, q));
    out.dbarstar[j] = half_i * acc;
  }

  out.ddstar = Mat2::Zero();
  out.dbar_dbarstar = Mat2::Zero();
  out.log_det = Mat2::Zero();
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      cplx a{}, b{}, l{};
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
          a += gi(p, q) * (jet.d2m[j][q](p, k) - jet.d2m[j][k](p, q));
          b += gi(p, q) * (jet.d2m[p][k](j, q) - jet.d2m[j][k](p, q));
          l += gi(p, q) * jet.d2m[j][k](p, q);
          for (int m = 0; m < 2; ++m)
            for (int n = 0; n < 2; ++n) {
              const cplx gg = gi(p, m) * gi(n, q);
              a -= gg * jet.d1[j](n, m) * (jet.dbar(q, p, k) - jet.dbar(k, p, q));
              b -= gg * jet.dbar(k, n, m) * (jet.d1[p](j, q) - jet.d1[j](p, q));
              l -= gg * jet.d1[j](n, m) * jet.dbar(k, p, q);
            }
        }
      out.ddstar(j, k) = a;
      out.dbar_dbarstar(j, k) = b;
      out.log_det(j, k) = l;
    }
  out.phi = -out.ddstar - out.dbar_dbarstar - out.log_det;
  return out;
}

HodgeOperators hodge_operators(const HermitianJet& jet) {
  return hodge_operators(Geometry(jet));
}

Mat2 gflow_rhs(const Geometry& geo) {
  const Curvature cur = chern_curvature(geo);
  const TorsionQuadratics q = torsion_quadratics(geo);
  Mat2 rhs = -cur.S + q.Q1;
  return 0.5 * (rhs + rhs.adjoint().eval());
}

Mat2 gflow_rhs(const HermitianJet& jet) { return gflow_rhs(Geometry(jet)); }

Mat2 kahler_ricci(const HermitianJet& jet) {
  validate(jet);
  const Mat2& g = jet.g;
  const cplx det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  std::array<cplx, 2> d{}, db{};
  for (int j = 0; j < 2; ++j) {
    const Mat2& a = jet.d1[j];
    d[j] = a(0, 0) * g(1, 1) + g(0, 0) * a(1, 1) - a(0, 1) * g(1, 0) - g(0, 1) * a(1, 0);
    db[j] = jet.dbar(j, 0, 0) * g(1, 1) + g(0, 0) * jet.dbar(j, 1, 1) -
            jet.dbar(j, 0, 1) * g(1, 0) - g(0, 1) * jet.dbar(j, 1, 0);
  }
  Mat2 ric;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) {
      const Mat2& m = jet.d2m[j][k];
      const cplx ddet =
          m(0, 0) * g(1, 1) + jet.d1[j](0, 0) * jet.dbar(k, 1, 1) +
          jet.dbar(k, 0, 0) * jet.d1[j](1, 1) + g(0, 0) * m(1, 1) -
          (m(0, 1) * g(1, 0) + jet.d1[j](0, 1) * jet.dbar(k, 1, 0) +
           jet.dbar(k, 0, 1) * jet.d1[j](1, 0) + g(0, 1) * m(1, 0));
      ric(j, k) = -(ddet / det - d[j] * db[k] / (det * det));
    }
  return ric;
}

double pluriclosed_residual(const HermitianJet& jet) {
  const cplx b = jet.d2m[1][1](0, 0) + jet.d2m[0][0](1, 1) - jet.d2m[1][0](0, 1) -
                 jet.d2m[0][1](1, 0);
  return std::abs(b);
}

CovariantTorsion covariant_torsion_ops(const Geometry& geo) {
  const HermitianJet& jet = *geo.jet;
  const auto& gi = geo.gi;
  const auto& T = geo.T;
  const auto& G = geo.gamma;
  CovariantTorsion out;
  out.nabla_bar_T = Tensor4({Slot::anti, Slot::holo, Slot::holo, Slot::anti});
  out.nabla_T = Tensor4({Slot::holo, Slot::holo, Slot::holo, Slot::anti});

  for (int s = 0; s < 2; ++s)
    for (int r = 0; r < 2; ++r)
      for (int q = 0; q < 2; ++q)
        for (int k = 0; k < 2; ++k) {
          cplx acc = dT_bar(jet, r, q, k, s);
          for (int p = 0; p < 2; ++p) acc -= std::conj(G(p, s, k)) * T(r, q, p);
          out.nabla_bar_T(s, r, q, k) = acc;
        }
  for (int a = 0; a < 2; ++a)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          cplx acc = dT_hol(jet, a, i, j, k);
          for (int p = 0; p < 2; ++p)
            acc -= G(p, a, i) * T(p, j, k) + G(p, a, j) * T(i, p, k);
          out.nabla_T(a, i, j, k) = acc;
        }

  out.div_nabla_T = Mat2::Zero();
  out.div_nabla_T_bar = Mat2::Zero();
  out.nabla_w = Mat2::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
          out.div_nabla_T(i, j) += gi(p, q) * out.nabla_bar_T(q, p, i, j);
          // ∇_k T_{l̄ j̄ i} = conj(∂_{k̄} T_{l j ī}) − Γ^r_{k i} conj(T_{l j r̄})
          cplx nt = std::conj(dT_bar(jet, q, j, i, p));
          for (int r = 0; r < 2; ++r) nt -= G(r, p, i) * std::conj(T(q, j, r));
          out.div_nabla_T_bar(i, j) += gi(p, q) * nt;
          out.nabla_w(i, j) += dgi_bar(geo, j, p, q) * T(i, p, q) +
                               gi(p, q) * dT_bar(jet, i, p, q, j);
        }
  return out;
}

CovariantTorsion covariant_torsion_ops(const HermitianJet& jet) {
  return covariant_torsion_ops(Geometry(jet));
}

std::pair<double, double> torsion_gradient_norms(const Geometry& geo,
                                                 const CovariantTorsion& ct) {
  const auto& gi = geo.gi;
  cplx n10{}, n01{};
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int i = 0; i < 2; ++i)
        for (int m = 0; m < 2; ++m)
          for (int j = 0; j < 2; ++j)
            for (int n = 0; n < 2; ++n)
              for (int k = 0; k < 2; ++k)
                for (int p = 0; p < 2; ++p) {
                  const cplx inner = gi(i, m) * gi(j, n) * gi(p, k);
                  n10 += gi(a, b) * inner * ct.nabla_T(a, i, j, k) *
                         std::conj(ct.nabla_T(b, m, n, p));
                  n01 += gi(b, a) * inner * ct.nabla_bar_T(a, i, j, k) *
                         std::conj(ct.nabla_bar_T(b, m, n, p));
                }
  return {n10.real(), n01.real()};
}

std::array<cplx, 2> grad_torsion_norm(const Geometry& geo) {
  const HermitianJet& jet = *geo.jet;
  const auto& gi = geo.gi;
  const auto& T = geo.T;
  std::array<cplx, 2> out{};
  // |T|² = g^{i j̄} g^{k l̄} g^{m n̄} T_{i k n̄} conj(T_{j l m̄})
  for (int a = 0; a < 2; ++a) {
    cplx acc{};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l)
            for (int m = 0; m < 2; ++m)
              for (int n = 0; n < 2; ++n) {
                const cplx t = T(i, k, n);
                const cplx tc = std::conj(T(j, l, m));
                const cplx g3 = gi(i, j) * gi(k, l) * gi(m, n);
                const cplx dg3 = dgi_hol(geo, a, i, j) * gi(k, l) * gi(m, n) +
                                 gi(i, j) * dgi_hol(geo, a, k, l) * gi(m, n) +
                                 gi(i, j) * gi(k, l) * dgi_hol(geo, a, m, n);
                acc += dg3 * t * tc + g3 * dT_hol(jet, a, i, k, n) * tc +
                       g3 * t * std::conj(dT_bar(jet, j, l, m, a));
              }
    out[a] = acc;
  }
  return out;
}

IdentityReport identity_suite(const HermitianJet& jet, bool pluriclosed,
                              double pluriclosed_tol) {
  validate(jet);
  IdentityReport rep;
  rep.pluriclosed_B = pluriclosed_residual(jet);
  if (pluriclosed && rep.pluriclosed_B > pluriclosed_tol)
    throw Error(ErrorKind::precondition,
                "pluriclosed flag set but residual B exceeds tolerance");

  const Geometry geo(jet);
  const auto& gi = geo.gi;
  const auto& T = geo.T;
  const auto& G = geo.gamma;
  const Curvature cur = chern_curvature(geo);
  const TorsionQuadratics q = torsion_quadratics(geo);
  const HodgeOperators h = hodge_operators(geo);
  const CovariantTorsion ct = covariant_torsion_ops(geo);
  const auto& Om = cur.omega;
  auto add = [&](const char* name, double r) { rep.residuals.emplace_back(name, r); };

  {
    double r = 0.0, sc = 1.0;
    for (int k = 0; k < 2; ++k)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          cplx tt{};
          for (int l = 0; l < 2; ++l) tt += gi(k, l) * T(i, j, l);
          r = std::max(r, std::abs(G(k, i, j) - G(k, j, i) - tt));
          sc = std::max({sc, std::abs(G(k, i, j)), std::abs(tt)});
        }
    add("connection_torsion", r / sc);
  }

  const double t2 = q.T2;
  const double t4 = t2 * t2;
  add("q1_trace", max_abs(q.Q1 - 0.5 * t2 * jet.g) /
                      scale_of({max_abs(q.Q1), 0.5 * t2 * max_abs(jet.g)}));
  {
    const cplx v = pairing(gi, q.Q2, q.Q1);
    add("q2_q1_pairing", std::abs(v - 0.5 * t4) / scale_of({std::abs(v), 0.5 * t4}));
    const cplx n = pairing(gi, q.Q1, q.Q1);
    add("q1_norm", std::abs(n - 0.5 * t4) / scale_of({std::abs(n), 0.5 * t4}));
  }

  {
    double r = 0.0;
    for (int s = 0; s < 2; ++s)
      for (int rr = 0; rr < 2; ++rr)
        for (int qq = 0; qq < 2; ++qq)
          for (int k = 0; k < 2; ++k)
            r = std::max(r, std::abs(ct.nabla_bar_T(s, rr, qq, k) - Om(qq, s, rr, k) +
                                     Om(rr, s, qq, k)));
    add("bianchi", r / scale_of({ct.nabla_bar_T.max_abs(), max_abs4(Om)}));
  }

  {
    double r = 0.0, sc = 1.0;
    for (int k = 0; k < 2; ++k) {
      const cplx rel = -cplx{0.0, 0.5} * std::conj(geo.w[k]);
      r = std::max(r, std::abs(h.dstar[k] - rel));
      sc = std::max({sc, std::abs(h.dstar[k]), std::abs(rel)});
    }
    add("codifferential_trace", r / sc);
  }

  // Contracted forms.
  {
    const std::array<cplx, 2> dT2 = grad_torsion_norm(geo);
    // ∇_a Q¹_{j k̄} by the product rule on the Q¹ contraction
    Tensor3 nQ({Slot::holo, Slot::holo, Slot::anti});
    for (int a = 0; a < 2; ++a)
      for (int j = 0; j < 2; ++j)
        for (int kk = 0; kk < 2; ++kk) {
          cplx acc{};
          for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l)
              for (int m = 0; m < 2; ++m)
                for (int n = 0; n < 2; ++n) {
                  const cplx t = T(j, k, n);
                  const cplx tc = std::conj(T(kk, l, m));
                  acc += (dgi_hol(geo, a, k, l) * gi(m, n) + gi(k, l) * dgi_hol(geo, a, m, n)) *
                             t * tc +
                         gi(k, l) * gi(m, n) *
                             (dT_hol(jet, a, j, k, n) * tc +
                              t * std::conj(dT_bar(jet, kk, l, m, a)));
                }
          for (int p = 0; p < 2; ++p) acc -= G(p, a, j) * q.Q1(p, kk);
          nQ(a, j, kk) = acc;
        }
    cplx lhs{};
    for (int i = 0; i < 2; ++i)
      for (int m = 0; m < 2; ++m)
        for (int j = 0; j < 2; ++j)
          for (int n = 0; n < 2; ++n)
            for (int p = 0; p < 2; ++p)
              for (int k = 0; k < 2; ++k)
                lhs += gi(i, m) * gi(j, n) * gi(p, k) * (nQ(i, j, k) - nQ(j, i, k)) *
                       std::conj(T(m, n, p));
    cplx rhs{};
    for (int i = 0; i < 2; ++i)
      for (int m = 0; m < 2; ++m) rhs += gi(i, m) * dT2[i] * std::conj(geo.w[m]);
    add("grad_q1_contraction",
        std::abs(lhs - rhs) / scale_of({std::abs(lhs), std::abs(rhs)}));
  }

  {
    Tensor3 Tup;  // (j,i,q) = T_{j i}^q
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) {
          cplx acc{};
          for (int l = 0; l < 2; ++l) acc += gi(c, l) * T(a, b, l);
          Tup(a, b, c) = acc;
        }
    cplx c47{}, t1{}, t2c{}, u1{}, u2{};
    for (int i = 0; i < 2; ++i)
      for (int m = 0; m < 2; ++m)
        for (int j = 0; j < 2; ++j)
          for (int n = 0; n < 2; ++n)
            for (int p = 0; p < 2; ++p)
              for (int k = 0; k < 2; ++k)
                for (int r = 0; r < 2; ++r)
                  for (int s = 0; s < 2; ++s) {
                    const cplx w4 = gi(i, m) * gi(j, n) * gi(p, k) * gi(r, s) *
                                    std::conj(T(m, n, p));
                    for (int qq = 0; qq < 2; ++qq) {
                      c47 += w4 * Tup(j, i, qq) *
                             (ct.nabla_bar_T(s, r, qq, k) - Om(qq, s, r, k));
                      u1 += w4 * Tup(i, r, qq) * (ct.nabla_bar_T(s, j, qq, k) + Om(j, s, qq, k));
                      u2 += w4 * Tup(j, r, qq) * (ct.nabla_bar_T(s, i, qq, k) + Om(i, s, qq, k));
                      cplx y1{}, y2{};
                      for (int l = 0; l < 2; ++l) {
                        y1 += gi(qq, l) * (ct.nabla_bar_T(s, r, j, l) - Om(j, s, r, l));
                        y2 += gi(qq, l) * (ct.nabla_bar_T(s, r, i, l) - Om(i, s, r, l));
                      }
                      t1 += w4 * y1 * T(i, qq, k);
                      t2c += w4 * y2 * T(j, qq, k);
                    }
                  }
    const cplx sq2 = pairing(gi, cur.S, q.Q2);
    add("curvature_q2_contraction",
        std::abs(c47 - sq2) / scale_of({std::abs(c47), std::abs(sq2)}));
    rep.curvature_q2_half_scalar_gap = std::abs(c47 - 0.5 * cur.s * t2);

    const cplx c48 = t1 - t2c;
    const double st = -cur.s * t2;
    add("scalar_torsion_contraction",
        std::abs(c48 - st) / scale_of({std::abs(c48), std::abs(st)}));

    const cplx c49 = u1 - u2;
    const cplx qd = pairing(gi, q.Q2, cur.S + ct.div_nabla_T_bar);
    add("divergence_q2_contraction",
        std::abs(c49 - qd) / scale_of({std::abs(c49), std::abs(qd)}));
  }

  if (pluriclosed) {
    const Mat2 r32 = ct.nabla_w + ct.div_nabla_T + q.Q1;
    add("torsion_trace_divergence",
        max_abs(r32) / scale_of({max_abs(ct.nabla_w), max_abs(ct.div_nabla_T), max_abs(q.Q1)}));
    const Mat2 rp = cur.P - cur.S + ct.nabla_w + ct.nabla_w.adjoint() + q.Q1;
    add("ricci_balance", max_abs(rp) / scale_of({max_abs(cur.P), max_abs(cur.S),
                                                 2.0 * max_abs(ct.nabla_w), max_abs(q.Q1)}));
    const Mat2 flow = -cur.S + q.Q1;
    add("flow_equivalence", max_abs(-h.phi - flow) /
                                scale_of({max_abs(h.phi), max_abs(cur.S), max_abs(q.Q1)}));
  }
  return rep;
}

HermitianJet random_jet(std::uint64_t seed, bool pluriclosed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto draw = [&] {
    const double re = u(rng);
    const double im = u(rng);
    return cplx{re, im};
  };
  HermitianJet jet;
  Mat2 A;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) A(i, j) = draw() / std::sqrt(2.0);
  jet.g = A * A.adjoint() + Mat2::Identity();
  jet.g = 0.5 * (jet.g + jet.g.adjoint()).eval();
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) jet.d1[k](i, j) = draw();
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) jet.d2h[k][l](i, j) = draw();
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) jet.d2m[k][l](i, j) = draw();
  std::array<std::array<Mat2, 2>, 2> h = jet.d2h, m = jet.d2m;
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) {
      jet.d2h[k][l] = 0.5 * (h[k][l] + h[l][k]);
      jet.d2m[k][l] = 0.5 * (m[k][l] + m[l][k].adjoint());
    }
  if (pluriclosed) {
    const cplx rest = jet.d2m[0][0](1, 1) - jet.d2m[1][0](0, 1) - jet.d2m[0][1](1, 0);
    jet.d2m[1][1](0, 0) = cplx{-rest.real(), 0.0};
  }
  return jet;
}

}  // namespace plurigeo
