#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "plurigeo/torus_grid.hpp"

using namespace plurigeo;

namespace {

const double vol4 = std::pow(2.0 * pi, 4);

ComplexField scalar(const Dims& dims, const std::function<cplx(const RealPoint&)>& f) {
  ComplexField out;
  out.grid.dims = dims;
  out.v.resize(out.grid.size());
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = f(out.grid.point(i));
  return out;
}

double max_err(const ComplexField& a, const std::function<cplx(const RealPoint&)>& f) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) e = std::max(e, std::abs(a.v[i] - f(a.grid.point(i))));
  return e;
}

/// Smooth periodic metric with every real coordinate active.
Mat2 generic_metric(const RealPoint& x) {
  Mat2 g;
  g(0, 0) = 1.6 + 0.3 * std::cos(x[0] + x[1]) + 0.2 * std::sin(x[3]);
  g(1, 1) = 1.5 + 0.25 * std::sin(x[2] - x[0]) + 0.1 * std::cos(x[1]);
  g(0, 1) = 0.3 * std::exp(I_unit * x[2]) + 0.2 * std::exp(-I_unit * (x[1] + x[3]));
  g(1, 0) = std::conj(g(0, 1));
  return g;
}

void set_env_threads(const char* n) { ::setenv("PLURIGEO_THREADS", n, 1); }

}  // namespace

TEST_CASE("grid indexing wraps periodically") {
  Grid g{{4, 5, 6, 7}};
  CHECK(g.size() == 840);
  for (std::size_t i = 0; i < g.size(); i += 37) {
    const auto c = g.coords(i);
    CHECK(g.index(c[0], c[1], c[2], c[3]) == i);
  }
  const std::size_t i = g.index(3, 0, 5, 6);
  CHECK(g.neighbor(i, 0, 1) == g.index(0, 0, 5, 6));
  CHECK(g.neighbor(i, 1, -1) == g.index(3, 4, 5, 6));
  CHECK(g.neighbor(i, 3, 2) == g.index(3, 0, 5, 1));
  CHECK(std::abs(g.point(i)[2] - 5 * 2.0 * pi / 6) < 1e-15);
}

TEST_CASE("first and second derivatives of sin converge at fourth order") {
  auto f = [](const RealPoint& x) { return cplx{std::sin(x[2]), 0.0}; };
  auto df = [](const RealPoint& x) { return cplx{std::cos(x[2]), 0.0}; };
  auto d2f = [](const RealPoint& x) { return cplx{-std::sin(x[2]), 0.0}; };
  const double e16 = max_err(differentiate(scalar({1, 1, 16, 1}, f), 3, 1), df);
  const double e32 = max_err(differentiate(scalar({1, 1, 32, 1}, f), 3, 1), df);
  CHECK(e16 <= 2e-3);
  CHECK(e16 / e32 >= 14.0);
  const double s16 = max_err(differentiate(scalar({1, 1, 16, 1}, f), 3, 2), d2f);
  const double s32 = max_err(differentiate(scalar({1, 1, 32, 1}, f), 3, 2), d2f);
  CHECK(s16 <= 5e-3);
  CHECK(s16 / s32 >= 14.0);
  CHECK_THROWS_AS(differentiate(scalar({1, 1, 16, 1}, f), 0, 1), Error);
  CHECK_THROWS_AS(differentiate(scalar({1, 1, 16, 1}, f), 1, 3), Error);
}

TEST_CASE("complex derivatives of a holomorphic and an antiholomorphic mode") {
  // ∂_{z¹} e^{i x¹} = (i/2) e^{i x¹}; ∂_{z̄²} e^{i x⁴} = (−1/2) e^{i x⁴}
  auto e1 = [](const RealPoint& x) { return std::exp(I_unit * x[0]); };
  auto e4 = [](const RealPoint& x) { return std::exp(I_unit * x[3]); };
  const ComplexField f1 = scalar({32, 8, 8, 8}, e1);
  const ComplexField f4 = scalar({8, 8, 8, 32}, e4);
  CHECK(max_err(d_holo(f1, 0), [&](const RealPoint& x) { return 0.5 * I_unit * e1(x); }) < 1e-4);
  CHECK(max_err(d_antiholo(f4, 1), [&](const RealPoint& x) { return -0.5 * e4(x); }) < 1e-4);
  CHECK(max_err(d_holo(f1, 1), [](const RealPoint&) { return cplx{}; }) < 1e-14);
}

TEST_CASE("volume and integrals of trigonometric fields are exact") {
  CHECK(std::abs(volume(sample({FamilyKind::flat, 0.0}, {8, 8, 8, 8})) - vol4) < 1e-10);
  CHECK(std::abs(volume(sample({FamilyKind::torus_pluriclosed, 0.5}, {4, 4, 16, 4})) - 0.75 * vol4) < 1e-10);
  CHECK(std::abs(volume(sample({FamilyKind::kahler_potential, 0.4}, {16, 4, 16, 4})) - vol4) < 1e-10);
  Grid g{{16, 2, 2, 2}};
  std::vector<double> c2(g.size());
  for (std::size_t i = 0; i < c2.size(); ++i) c2[i] = std::pow(std::cos(g.point(i)[0]), 2);
  CHECK(std::abs(integrate(g, c2) - 0.5 * vol4) < 1e-10);
}

TEST_CASE("sampling rules") {
  CHECK_THROWS_AS(sample({FamilyKind::hopf, 0.0}, {16, 16, 16, 16}), Error);
  CHECK_THROWS_AS(sample({FamilyKind::torus_pluriclosed, 0.5}, {4, 4, 6, 4}), Error);
  CHECK_NOTHROW(sample({FamilyKind::torus_pluriclosed, 0.5}, {4, 4, 8, 4}));
  CHECK_THROWS_AS(sample({FamilyKind::kahler_potential, 0.4}, {16, 4, 4, 4}), Error);
}

TEST_CASE("metric validation") {
  MetricField f = sample({FamilyKind::flat, 0.0}, {4, 4, 4, 4});
  f.values[3](0, 0) = -1.0;
  try {
    f.validate();
    FAIL("expected degenerate");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::degenerate);
  }
  f.values[3](0, 0) = std::nan("");
  try {
    f.validate();
    FAIL("expected blowup");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::blowup);
  }
}

TEST_CASE("grid jets converge to the analytic jets") {
  auto err = [](int n) {
    const MetricField f = sample(generic_metric, {n, n, n, n});
    const JetField jf = jets(f);
    double e = 0.0;
    for (std::size_t i = 0; i < f.values.size(); i += 97) {
      const HermitianJet num = oracle::numerical_jet(generic_metric, f.grid.point(i));
      const HermitianJet& a = jf.jets[i];
      for (int k = 0; k < 2; ++k) {
        e = std::max(e, max_abs(a.d1[k] - num.d1[k]));
        for (int l = 0; l < 2; ++l) {
          e = std::max(e, max_abs(a.d2m[k][l] - num.d2m[k][l]));
          e = std::max(e, max_abs(a.d2h[k][l] - num.d2h[k][l]));
        }
      }
    }
    return e;
  };
  const double e8 = err(12), e16 = err(24);
  CHECK(e16 < 2e-3);
  CHECK(std::log2(e8 / e16) >= 3.5);
}

TEST_CASE("torus family grid jets: exact torsion structure and zero pluriclosed residual") {
  const MetricField f = sample({FamilyKind::torus_pluriclosed, 0.5}, {4, 4, 16, 4});
  const JetField jf = jets(f);
  for (const HermitianJet& j : jf.jets) {
    CHECK(pluriclosed_residual(j) < 1e-14);
    CHECK(std::abs(torsion(j).T(0, 1, 0)) < 1e-14);
  }
  CHECK(jf.symmetry_deviation < 1e-15);
}

TEST_CASE("real components and wedges agree with the coefficient pairing") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    Mat2 b, c;
    for (Mat2* m : {&b, &c}) {
      m->setZero();
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) (*m)(i, j) = cplx{u(rng), u(rng)};
      *m = 0.5 * (*m + m->adjoint()).eval();
    }
    TwoForm fb, fc;
    fb.p11 = b;
    fc.p11 = c;
    const cplx w = wedge_real(real_components(fb), real_components(fc));
    CHECK(std::abs(w - wedge_pair(b, c)) < 1e-14);
    for (const cplx& comp : real_components(fb)) CHECK(std::abs(comp.imag()) < 1e-15);
  }
  // ω∧ω = 2 det g for the flat metric
  TwoForm id;
  id.p11 = Mat2::Identity();
  CHECK(std::abs(wedge_real(real_components(id), real_components(id)) - 2.0) < 1e-15);
}

TEST_CASE("d of d vanishes") {
  Grid g{{8, 8, 8, 8}};
  OneFormField a{g, std::vector<std::array<cplx, 4>>(g.size())};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const RealPoint x = g.point(i);
    a.c[i] = {std::sin(x[0] + 2 * x[1]), std::cos(x[2]) * std::sin(x[3]), cplx{std::cos(x[0] - x[3]), 0.5},
              std::exp(I_unit * (x[1] + x[2]))};
  }
  const FormNorms n = norms(exterior_derivative(exterior_derivative(a)));
  CHECK(n.max <= 1e-10);
  CHECK(norms(exterior_derivative(exterior_derivative(a))).l2 <= 1e-10);
}

TEST_CASE("exterior derivative of the torus Hermitian form matches the symbolic derivative") {
  const MetricFamily fam{FamilyKind::torus_pluriclosed, 0.5};
  const MetricField f = sample(fam, {4, 4, 16, 4});
  FormField omega{f.grid, {}};
  for (const Mat2& g : f.values) omega.values.push_back(TwoForm::from_metric(g));
  const ThreeFormField d = exterior_derivative(omega);
  // (dβ)_{abc} = ∂_a β_{bc} − ∂_b β_{ac} + ∂_c β_{ab}, derivatives by 8th-order FD of the closed form
  constexpr int tri[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  auto slot = [](int a, int b) {
    constexpr int s[4][4] = {{-1, 0, 1, 2}, {0, -1, 3, 4}, {1, 3, -1, 5}, {2, 4, 5, -1}};
    return s[a][b];
  };
  double err = 0.0, mag = 0.0;
  for (std::size_t i = 0; i < f.values.size(); i += 5) {
    const RealPoint x = f.grid.point(i);
    for (int t = 0; t < 4; ++t) {
      const int a = tri[t][0], b = tri[t][1], c = tri[t][2];
      auto comp = [&](int p, int q, int axis) {
        const std::function<cplx(const RealPoint&)> fn = [&](const RealPoint& y) {
          return real_components(TwoForm::from_metric(metric_at(fam, y)))[static_cast<std::size_t>(slot(p, q))];
        };
        return oracle::fd8<cplx>(fn, x, axis, 0.02);
      };
      const cplx expect = comp(b, c, a) - comp(a, c, b) + comp(a, b, c);
      err = std::max(err, std::abs(d.c[i][t] - expect));
      mag = std::max(mag, std::abs(expect));
    }
  }
  CHECK(err <= 1e-3);
  CHECK(mag > 0.1);
  const MetricField k = sample({FamilyKind::kahler_potential, 0.4}, {16, 4, 16, 4});
  FormField kw{k.grid, {}};
  for (const Mat2& g : k.values) kw.values.push_back(TwoForm::from_metric(g));
  CHECK(norms(exterior_derivative(kw)).max < 1e-12);
}

TEST_CASE("degree and divisor slice on torus fields") {
  CHECK(std::abs(degree(sample({FamilyKind::flat, 0.0}, {8, 8, 8, 8}))) < 1e-12);
  CHECK(std::abs(degree(sample({FamilyKind::torus_pluriclosed, 0.5}, {4, 4, 16, 4}))) < 1e-10);
  CHECK(std::abs(degree(sample({FamilyKind::kahler_potential, 0.4}, {16, 4, 16, 4}))) < 1e-10);
  CHECK(std::abs(divisor_slice_integral(sample({FamilyKind::flat, 0.0}, {8, 8, 8, 8})) -
                 4 * pi * pi) < 1e-12);
}

TEST_CASE("binary round trip is bit exact") {
  const MetricField f = sample(generic_metric, {8, 4, 6, 4});
  std::stringstream ss;
  write_binary(f, ss);
  const MetricField g = read_binary(ss);
  CHECK(g.grid == f.grid);
  REQUIRE(g.values.size() == f.values.size());
  CHECK(std::memcmp(g.values.data(), f.values.data(), sizeof(Mat2) * f.values.size()) == 0);
}

TEST_CASE("corrupt binary files are parse errors") {
  const MetricField f = sample({FamilyKind::flat, 0.0}, {4, 4, 4, 4});
  std::stringstream ss;
  write_binary(f, ss);
  const std::string good = ss.str();
  auto expect_parse = [](const std::string& bytes) {
    std::stringstream in(bytes);
    try {
      read_binary(in);
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::parse);
    }
  };
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  expect_parse(bad_magic);
  expect_parse(good.substr(0, good.size() - 3));
  expect_parse(good + "x");
  expect_parse(good.substr(0, 10));
  std::string bad_version = good;
  bad_version[8] = 9;
  expect_parse(bad_version);
  std::string neg_dims = good;
  const std::int32_t neg = -2;
  std::memcpy(&neg_dims[12], &neg, 4);
  expect_parse(neg_dims);
  std::string nan_value = good;
  const double nan = std::nan("");
  std::memcpy(&nan_value[28], &nan, 8);
  expect_parse(nan_value);
  CHECK_THROWS_AS(load_binary("/nonexistent/field.bin"), Error);
}

TEST_CASE("csv export") {
  const MetricField f = sample({FamilyKind::flat, 0.0}, {4, 4, 4, 4});
  std::stringstream ss;
  write_csv(f, ss);
  std::string header;
  std::getline(ss, header);
  CHECK(header.rfind("i1,i2,i3,i4,g11_re", 0) == 0);
  int lines = 0;
  for (std::string l; std::getline(ss, l);) ++lines;
  CHECK(lines == 256);
  const MetricField big = sample({FamilyKind::flat, 0.0}, {32, 32, 8, 10});
  std::stringstream out;
  CHECK_THROWS_AS(write_csv(big, out), Error);
}

TEST_CASE("jets and integrals are independent of the worker count") {
  const MetricField f = sample(generic_metric, {12, 8, 12, 8});
  set_env_threads("1");
  const JetField a = jets(f);
  const double da = degree(f, a);
  set_env_threads("4");
  const JetField b = jets(f);
  const double db = degree(f, b);
  ::unsetenv("PLURIGEO_THREADS");
  CHECK(std::memcmp(&da, &db, sizeof da) == 0);
  bool same = true;
  for (std::size_t i = 0; i < a.jets.size(); ++i) {
    same = same && std::memcmp(&a.jets[i].d1, &b.jets[i].d1, sizeof a.jets[i].d1) == 0 &&
           std::memcmp(&a.jets[i].d2m, &b.jets[i].d2m, sizeof a.jets[i].d2m) == 0;
  }
  CHECK(same);
}
