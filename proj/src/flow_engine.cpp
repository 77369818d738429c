#include "plurigeo/flow_engine.hpp"

#include <chrono>
#include <cmath>

#include "plurigeo/parallel.hpp"

namespace plurigeo {

Variant parse_variant(const std::string& s) {
  if (s == "gflow") return Variant::gflow;
  if (s == "normalized") return Variant::normalized;
  if (s == "omega_form") return Variant::omega_form;
  throw Error(ErrorKind::config, "unknown variant '" + s + "'");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::gflow: return "gflow";
    case Variant::normalized: return "normalized";
    case Variant::omega_form: return "omega_form";
  }
  return "unknown";
}

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::blowup_suspected: return "blowup_suspected";
    case RunStatus::degenerate: return "degenerate";
  }
  return "unknown";
}

namespace {

std::pair<double, double> eigen_range(const Mat2& g) {
  const double a = g(0, 0).real(), d = g(1, 1).real();
  const double r = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(g(0, 1)));
  return {0.5 * (a + d) - r, 0.5 * (a + d) + r};
}

double det_real(const Mat2& g) { return (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)).real(); }

double trace_g(const Mat2& gi, const Mat2& b) {
  cplx t{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) t += gi(i, j) * b(i, j);
  return t.real();
}

double curvature_norm(const Mat2& gi, const Tensor4& om) {
  cplx acc{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
              for (int c = 0; c < 2; ++c)
                for (int d = 0; d < 2; ++d)
                  acc += gi(i, a) * gi(b, j) * gi(k, c) * gi(d, l) * om(i, j, k, l) *
                         std::conj(om(a, b, c, d));
  return std::sqrt(std::max(0.0, acc.real()));
}

Mat2 hermitian_part(const Mat2& m) { return 0.5 * (m + m.adjoint()); }

/// ∫ (s − |T|²) dV / Vol
double normalization_average(const MetricField& field, const JetField& jf) {
  std::vector<double> num(field.values.size()), den(field.values.size());
  parallel_for(num.size(), [&](std::size_t i) {
    const Geometry geo(jf.jets[i]);
    const double det = det_real(field.values[i]);
    num[i] = (chern_curvature(geo).s - torsion_quadratics(geo).T2) * det;
    den[i] = det;
  });
  return pairwise_sum(num) / pairwise_sum(den);
}

}  // namespace

double cfl_dt(const MetricField& field, double safety) {
  if (!(safety > 0.0) || !std::isfinite(safety))
    throw Error(ErrorKind::precondition, "safety factor must be positive");
  double lo = INFINITY, hi = 0.0;
  for (const Mat2& g : field.values) {
    const auto [a, b] = eigen_range(g);
    lo = std::min(lo, a);
    hi = std::max(hi, b);
  }
  if (!(lo > 0.0)) throw Error(ErrorKind::degenerate, "positivity violation");
  const double h = field.grid.h_min();
  return safety * h * h * lo / hi;
}

std::vector<Mat2> flow_rhs(const MetricField& field, const JetField& jf, Variant variant) {
  std::vector<Mat2> rhs(field.values.size());
  parallel_for(rhs.size(), [&](std::size_t i) {
    const Geometry geo(jf.jets[i]);
    if (variant == Variant::omega_form)
      rhs[i] = hermitian_part(-hodge_operators(geo).phi);
    else
      rhs[i] = gflow_rhs(geo);
  });
  if (variant == Variant::normalized) {
    const double avg = normalization_average(field, jf);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += 0.5 * avg * field.values[i];
  }
  return rhs;
}

FlowState step(const FlowState& state, double dt, Variant variant, double pluriclosed_tol) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::precondition, "dt must be positive");
  const MetricField& g0 = state.field;
  const std::size_t n = g0.values.size();
  double herm_dev = state.hermitian_deviation;

  auto eval = [&](const MetricField& f, bool first) {
    const JetField jf = jets(f);
    if (first && variant == Variant::omega_form) {
      double b = 0.0;
      for (const auto& j : jf.jets) b = std::max(b, pluriclosed_residual(j));
      if (b > pluriclosed_tol)
        throw Error(ErrorKind::precondition, "omega_form requires pluriclosed data");
    }
    return flow_rhs(f, jf, variant);
  };
  auto stage = [&](const std::vector<Mat2>& k, double c) {
    MetricField f{g0.grid, std::vector<Mat2>(n)};
    for (std::size_t i = 0; i < n; ++i) {
      const Mat2 raw = g0.values[i] + (c * dt) * k[i];
      herm_dev = std::max(herm_dev, max_abs(raw - raw.adjoint()));
      f.values[i] = hermitian_part(raw);
    }
    f.validate();
    return f;
  };

  const auto k1 = eval(g0, true);
  const auto k2 = eval(stage(k1, 0.5), false);
  const auto k3 = eval(stage(k2, 0.5), false);
  const auto k4 = eval(stage(k3, 1.0), false);

  FlowState out;
  out.t = state.t + dt;
  out.step = state.step + 1;
  out.field.grid = g0.grid;
  out.field.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Mat2 raw = g0.values[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    herm_dev = std::max(herm_dev, max_abs(raw - raw.adjoint()));
    out.field.values[i] = hermitian_part(raw);
  }
  out.field.validate();
  out.hermitian_deviation = herm_dev;
  out.last_diag = state.last_diag;
  return out;
}

DiagnosticsRecord diagnostics(const FlowState& state, Variant variant) {
  const MetricField& f = state.field;
  const JetField jf = jets(f);
  const std::size_t n = f.values.size();
  const std::vector<Mat2> rhs = flow_rhs(f, jf, variant);

  std::vector<double> det(n), ew(n), deg(n), meas(n), norm_int(n), t2(n), om(n), b(n);
  parallel_for(n, [&](std::size_t i) {
    const Geometry geo(jf.jets[i]);
    const Mat2& g = f.values[i];
    const Curvature cur = chern_curvature(geo);
    const TorsionQuadratics q = torsion_quadratics(geo);
    const HodgeOperators h = hodge_operators(geo);
    det[i] = det_real(g);
    cplx w2{};
    for (int a = 0; a < 2; ++a)
      for (int c = 0; c < 2; ++c) w2 += geo.gi(a, c) * geo.w[a] * std::conj(geo.w[c]);
    ew[i] = w2.real() * det[i];
    deg[i] = wedge_pair(-h.log_det, g).real();
    meas[i] = trace_g(geo.gi, rhs[i]) * det[i];
    norm_int[i] = (cur.s - q.T2) * det[i];
    t2[i] = q.T2;
    om[i] = curvature_norm(geo.gi, cur.omega);
    b[i] = pluriclosed_residual(jf.jets[i]);
  });

  DiagnosticsRecord d;
  d.step = state.step;
  d.t = state.t;
  d.vol = integrate(f.grid, det);
  d.degree = integrate(f.grid, deg);
  d.E_w = integrate(f.grid, ew);
  for (std::size_t i = 0; i < n; ++i) {
    d.maxT2 = std::max(d.maxT2, t2[i]);
    d.maxOmega = std::max(d.maxOmega, om[i]);
    d.pluriclosed_resid = std::max(d.pluriclosed_resid, b[i]);
  }
  d.kahler_resid = std::sqrt(std::max(0.0, d.maxT2));
  d.dvol_dt_measured = integrate(f.grid, meas);
  d.dvol_dt_predicted = 2.0 * d.E_w - d.degree;
  if (variant == Variant::normalized) d.dvol_dt_predicted += integrate(f.grid, norm_int);
  d.slice_integral = divisor_slice_integral(f);
  d.jet_symmetry_deviation = jf.symmetry_deviation;
  return d;
}

RunResult run(const RunConfig& cfg) {
  if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end))
    throw Error(ErrorKind::config, "t_end must be positive");
  if (cfg.cadence < 1) throw Error(ErrorKind::config, "cadence must be at least 1");
  if (!(cfg.blowup_factor > 1.0)) throw Error(ErrorKind::config, "blowup_factor must exceed 1");
  cfg.initial.validate();

  RunResult res;
  res.dt = cfg.fixed_dt ? *cfg.fixed_dt : cfl_dt(cfg.initial, cfg.dt_safety);
  if (!(res.dt > 0.0) || !std::isfinite(res.dt)) throw Error(ErrorKind::config, "dt must be positive");

  FlowState state;
  state.field = cfg.initial;
  if (cfg.variant == Variant::omega_form) {
    const JetField jf = jets(state.field);
    double b = 0.0;
    for (const auto& j : jf.jets) b = std::max(b, pluriclosed_residual(j));
    if (b > cfg.pluriclosed_tol)
      throw Error(ErrorKind::precondition, "omega_form requires pluriclosed data");
  }
  state.last_diag = diagnostics(state, cfg.variant);
  res.series.push_back(state.last_diag);
  const double omega0 = state.last_diag.maxOmega;

  const double t_tol = 1e-12 * cfg.t_end;
  while (state.t < cfg.t_end - t_tol) {
    const double h = std::min(res.dt, cfg.t_end - state.t);
    try {
      state = step(state, h, cfg.variant, cfg.pluriclosed_tol);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::degenerate) {
        res.status = RunStatus::degenerate;
      } else if (e.kind() == ErrorKind::blowup) {
        res.status = RunStatus::blowup_suspected;
      } else {
        throw;
      }
      res.message = e.what();
      break;
    }
    if (cfg.t_end - state.t <= t_tol) state.t = cfg.t_end;
    state.last_diag = diagnostics(state, cfg.variant);
    const bool last = state.t >= cfg.t_end;
    const bool blown = omega0 > 0.0 && state.last_diag.maxOmega > cfg.blowup_factor * omega0;
    if (state.step % cfg.cadence == 0 || last || blown) res.series.push_back(state.last_diag);
    if (blown) {
      res.status = RunStatus::blowup_suspected;
      res.message = "curvature exceeded blowup threshold";
      break;
    }
  }
  res.max_hermitian_deviation = state.hermitian_deviation;
  res.final_state = std::move(state);
  return res;
}

TnormCheck tnorm_evolution_check(const FlowState& state, double dt) {
  const FlowState s1 = step(state, dt, Variant::gflow);
  const FlowState s2 = step(s1, dt, Variant::gflow);
  const Grid& grid = state.field.grid;
  const std::size_t n = state.field.values.size();

  auto t2_field = [&](const MetricField& f) {
    const JetField jf = jets(f);
    std::vector<double> v(n);
    parallel_for(n, [&](std::size_t i) { v[i] = torsion_quadratics(jf.jets[i]).T2; });
    return v;
  };
  const std::vector<double> a0 = t2_field(state.field);
  const std::vector<double> a2 = t2_field(s2.field);

  const JetField jf = jets(s1.field);
  ComplexField t2{grid, std::vector<cplx>(n)};
  std::vector<Geometry> geos;
  geos.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    geos.emplace_back(jf.jets[i]);
    t2.v[i] = torsion_quadratics(geos.back()).T2;
  }
  std::array<ComplexField, 2> dt2{d_holo(t2, 0), d_holo(t2, 1)};
  std::array<std::array<ComplexField, 2>, 2> ddt2;
  for (int q = 0; q < 2; ++q) {
    const ComplexField bar = d_antiholo(t2, q);
    for (int p = 0; p < 2; ++p) ddt2[p][q] = d_holo(bar, p);
  }

  TnormCheck out;
  out.measured.resize(n);
  out.assembled.resize(n);
  out.residual.resize(n);
  out.grad10_term.resize(n);
  out.grad01_term.resize(n);
  out.laplacian_term.resize(n);
  parallel_for(n, [&](std::size_t i) {
    const Geometry& geo = geos[i];
    const Mat2& gi = geo.gi;
    const Curvature cur = chern_curvature(geo);
    const TorsionQuadratics q = torsion_quadratics(geo);
    const CovariantTorsion ct = covariant_torsion_ops(geo);
    const auto [n10, n01] = torsion_gradient_norms(geo, ct);
    cplx lap{}, gw{};
    for (int p = 0; p < 2; ++p)
      for (int qq = 0; qq < 2; ++qq) {
        lap += gi(p, qq) * ddt2[p][qq].v[i];
        gw += gi(p, qq) * dt2[p].v[i] * std::conj(geo.w[qq]);
      }
    const double q2term = pairing(gi, q.Q2, cur.S + 2.0 * ct.div_nabla_T_bar).real();
    const double assembled =
        lap.real() - 2.0 * (n10 + n01) + 2.0 * gw.real() + q2term - 0.5 * q.T2 * q.T2;
    out.measured[i] = (a2[i] - a0[i]) / (2.0 * dt);
    out.assembled[i] = assembled;
    out.residual[i] = out.measured[i] - assembled;
    out.grad10_term[i] = 2.0 * n10;
    out.grad01_term[i] = 2.0 * n01;
    out.laplacian_term[i] = lap.real();
  });
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.max_abs = std::max(out.max_abs, std::abs(out.residual[i]));
    sq[i] = out.residual[i] * out.residual[i];
  }
  out.l2 = std::sqrt(integrate(grid, sq));
  return out;
}

TnormStudy tnorm_refinement_study(double epsilon, int n_coarse, int n_fine) {
  const auto start = std::chrono::steady_clock::now();
  TnormStudy st;
  st.n_coarse = n_coarse;
  st.n_fine = n_fine;
  const MetricFamily fam{FamilyKind::torus_pluriclosed, epsilon};

  auto level = [&](int nn, double& raw, double& term, double& corrected) {
    FlowState s;
    s.field = sample(fam, {4, 4, nn, 4});
    const TnormCheck c = tnorm_evolution_check(s, cfl_dt(s.field));
    const std::size_t n = c.residual.size();
    std::vector<double> r(c.residual), t(c.grad10_term);
    raw = pairwise_sum(r) / static_cast<double>(n);
    term = pairwise_sum(t) / static_cast<double>(n);
    corrected = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      corrected = std::max(corrected, std::abs(c.residual[i] - c.grad10_term[i]));
  };
  double term_c = 0.0;
  level(n_coarse, st.raw_coarse, term_c, st.corrected_coarse);
  level(n_fine, st.raw_fine, st.term_fine, st.corrected_fine);
  const double ratio = static_cast<double>(n_fine) / n_coarse;
  st.raw_limit = st.raw_fine + (st.raw_fine - st.raw_coarse) / (std::pow(ratio, 4) - 1.0);
  st.attribution_ratio = st.term_fine != 0.0 ? st.raw_fine / st.term_fine : 0.0;
  st.corrected_order = (st.corrected_fine > 0.0 && st.corrected_coarse > 0.0)
                           ? std::log(st.corrected_coarse / st.corrected_fine) / std::log(ratio)
                           : 0.0;
  st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return st;
}

}  // namespace plurigeo
