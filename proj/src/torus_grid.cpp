#include "plurigeo/torus_grid.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "plurigeo/parallel.hpp"

namespace plurigeo {

namespace {

inline cplx fd(const cplx& fm2, const cplx& fm1, const cplx& fp1, const cplx& fp2, double h) {
  return (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h);
}

constexpr std::array<std::array<int, 2>, 6> pair_ix{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
constexpr std::array<std::array<int, 3>, 4> triple_ix{{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};

int pair_slot(int a, int b) {
  for (int p = 0; p < 6; ++p)
    if (pair_ix[p][0] == a && pair_ix[p][1] == b) return p;
  return -1;
}

}  // namespace

// ---------------------------------------------------------------- grid

std::size_t Grid::size() const {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  return n;
}

double Grid::cell() const {
  double c = 1.0;
  for (int a = 0; a < 4; ++a) c *= spacing(a);
  return c;
}

double Grid::h_min() const {
  double h = spacing(0);
  for (int a = 1; a < 4; ++a) h = std::min(h, spacing(a));
  return h;
}

std::size_t Grid::index(int i0, int i1, int i2, int i3) const {
  return ((static_cast<std::size_t>(i0) * dims[1] + i1) * dims[2] + i2) * dims[3] + i3;
}

std::array<int, 4> Grid::coords(std::size_t idx) const {
  std::array<int, 4> c{};
  for (int a = 3; a >= 0; --a) {
    c[a] = static_cast<int>(idx % dims[a]);
    idx /= dims[a];
  }
  return c;
}

RealPoint Grid::point(std::size_t idx) const {
  const auto c = coords(idx);
  RealPoint x{};
  for (int a = 0; a < 4; ++a) x[a] = spacing(a) * c[a];
  return x;
}

std::size_t Grid::neighbor(std::size_t idx, int axis, int shift) const {
  std::size_t stride = 1;
  for (int a = 3; a > axis; --a) stride *= dims[a];
  const int n = dims[axis];
  const int c = static_cast<int>((idx / stride) % n);
  const int m = ((c + shift) % n + n) % n;
  return idx + (static_cast<std::ptrdiff_t>(m) - c) * static_cast<std::ptrdiff_t>(stride);
}

void Grid::check() const {
  for (int d : dims)
    if (d < 4 || d % 2 != 0)
      throw Error(ErrorKind::config, "grid sizes must be even and at least 4");
}

void MetricField::validate() const {
  if (values.size() != grid.size())
    throw Error(ErrorKind::precondition, "field size does not match grid");
  for (const Mat2& g : values) {
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        if (!std::isfinite(g(i, j).real()) || !std::isfinite(g(i, j).imag()))
          throw Error(ErrorKind::blowup, "numerical blowup");
    if (max_abs(g - g.adjoint()) > 1e-10 * std::max(1.0, max_abs(g)))
      throw Error(ErrorKind::degenerate, "field not Hermitian");
    const double det = (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)).real();
    if (!(g(0, 0).real() > 0.0) || !(det > 0.0))
      throw Error(ErrorKind::degenerate, "positivity violation");
  }
}

// -------------------------------------------------------------- sample

namespace {

bool axis_active(const MetricFamily& fam, int axis) {
  switch (fam.kind) {
    case FamilyKind::flat: return false;
    case FamilyKind::kahler_potential: return axis == 0 || axis == 2;
    case FamilyKind::torus_pluriclosed: return axis == 2;
    case FamilyKind::hopf: return true;
  }
  return true;
}

MetricField sample_impl(const std::function<Mat2(const RealPoint&)>& metric, const Dims& dims) {
  MetricField f;
  f.grid.dims = dims;
  f.grid.check();
  f.values.resize(f.grid.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    Mat2 g = metric(f.grid.point(i));
    g = 0.5 * (g + g.adjoint()).eval();
    f.values[i] = g;
  }
  try {
    f.validate();
  } catch (const Error&) {
    throw Error(ErrorKind::degenerate, "positivity violation");
  }
  return f;
}

}  // namespace

MetricField sample(const MetricFamily& fam, const Dims& dims) {
  fam.check();
  if (fam.kind == FamilyKind::hopf)
    throw Error(ErrorKind::domain, "hopf metric is not periodic on the torus grid");
  for (int a = 0; a < 4; ++a)
    if (axis_active(fam, a) && dims[a] < 8)
      throw Error(ErrorKind::config, "active axes need at least 8 nodes");
  return sample_impl([&](const RealPoint& x) { return metric_at(fam, x); }, dims);
}

MetricField sample(const std::function<Mat2(const RealPoint&)>& metric, const Dims& dims) {
  return sample_impl(metric, dims);
}

// ------------------------------------------------------ differentiation

ComplexField differentiate(const ComplexField& f, int axis, int order) {
  if (axis < 1 || axis > 4) throw Error(ErrorKind::precondition, "axis must be in 1..4");
  if (order != 1 && order != 2) throw Error(ErrorKind::precondition, "order must be 1 or 2");
  const int a = axis - 1;
  const Grid& g = f.grid;
  const double h = g.spacing(a);
  ComplexField out{g, std::vector<cplx>(f.v.size())};
  parallel_for(f.v.size(), [&](std::size_t i) {
    out.v[i] = fd(f.v[g.neighbor(i, a, -2)], f.v[g.neighbor(i, a, -1)],
                  f.v[g.neighbor(i, a, 1)], f.v[g.neighbor(i, a, 2)], h);
  });
  if (order == 2) return differentiate(out, axis, 1);
  return out;
}

ComplexField d_holo(const ComplexField& f, int k) {
  ComplexField dx = differentiate(f, 2 * k + 1, 1);
  const ComplexField dy = differentiate(f, 2 * k + 2, 1);
  for (std::size_t i = 0; i < dx.v.size(); ++i) dx.v[i] = 0.5 * (dx.v[i] - I_unit * dy.v[i]);
  return dx;
}

ComplexField d_antiholo(const ComplexField& f, int k) {
  ComplexField dx = differentiate(f, 2 * k + 1, 1);
  const ComplexField dy = differentiate(f, 2 * k + 2, 1);
  for (std::size_t i = 0; i < dx.v.size(); ++i) dx.v[i] = 0.5 * (dx.v[i] + I_unit * dy.v[i]);
  return dx;
}

// ---------------------------------------------------------------- jets

JetField coefficient_jets(const Grid& grid, const std::vector<Mat2>& values) {
  JetField out;
  out.jets.resize(values.size());
  std::vector<double> dev(values.size(), 0.0);
  std::array<double, 4> h{};
  for (int a = 0; a < 4; ++a) h[a] = grid.spacing(a);

  parallel_for(values.size(), [&](std::size_t idx) {
    // entries 00, 01, 11; entry 10 follows by conjugation
    constexpr std::array<std::array<int, 2>, 3> ent{{{0, 0}, {0, 1}, {1, 1}}};
    std::array<std::array<cplx, 4>, 3> d{};
    std::array<std::array<std::array<cplx, 4>, 4>, 3> dd{};
    auto val = [&](std::size_t n, int e) { return values[n](ent[e][0], ent[e][1]); };
    auto first = [&](std::size_t n, int e, int a) {
      return fd(val(grid.neighbor(n, a, -2), e), val(grid.neighbor(n, a, -1), e),
                val(grid.neighbor(n, a, 1), e), val(grid.neighbor(n, a, 2), e), h[a]);
    };
    for (int e = 0; e < 3; ++e) {
      for (int a = 0; a < 4; ++a) d[e][a] = first(idx, e, a);
      for (int a = 0; a < 4; ++a)
        for (int b = a; b < 4; ++b) {
          // D_a (D_b f)
          const cplx v = fd(first(grid.neighbor(idx, a, -2), e, b),
                            first(grid.neighbor(idx, a, -1), e, b),
                            first(grid.neighbor(idx, a, 1), e, b),
                            first(grid.neighbor(idx, a, 2), e, b), h[a]);
          dd[e][a][b] = v;
          dd[e][b][a] = v;
        }
    }
    auto D = [&](int i, int j, int a) {
      if (i == 1 && j == 0) return std::conj(d[1][a]);
      return d[i == 0 ? (j == 0 ? 0 : 1) : 2][a];
    };
    auto DD = [&](int i, int j, int a, int b) {
      if (i == 1 && j == 0) return std::conj(dd[1][a][b]);
      return dd[i == 0 ? (j == 0 ? 0 : 1) : 2][a][b];
    };

    HermitianJet& jet = out.jets[idx];
    jet.g = values[idx];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          const int xk = 2 * k, yk = 2 * k + 1;
          jet.d1[k](i, j) = 0.5 * (D(i, j, xk) - I_unit * D(i, j, yk));
          for (int l = 0; l < 2; ++l) {
            const int xl = 2 * l, yl = 2 * l + 1;
            jet.d2m[k][l](i, j) = 0.25 * (DD(i, j, xk, xl) + I_unit * DD(i, j, xk, yl) -
                                          I_unit * DD(i, j, yk, xl) + DD(i, j, yk, yl));
            jet.d2h[k][l](i, j) = 0.25 * (DD(i, j, xk, xl) - I_unit * DD(i, j, xk, yl) -
                                          I_unit * DD(i, j, yk, xl) - DD(i, j, yk, yl));
          }
        }
    dev[idx] = jet_symmetry_deviation(jet);
    const auto m = jet.d2m;
    const auto hh = jet.d2h;
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) {
        jet.d2m[k][l] = 0.5 * (m[k][l] + m[l][k].adjoint());
        jet.d2h[k][l] = 0.5 * (hh[k][l] + hh[l][k]);
      }
  });
  for (double v : dev) out.symmetry_deviation = std::max(out.symmetry_deviation, v);
  return out;
}

JetField jets(const MetricField& field) {
  field.validate();
  return coefficient_jets(field.grid, field.values);
}

// ---------------------------------------------------------- integration

double integrate(const Grid& grid, const std::vector<double>& values) {
  return pairwise_sum(values) * grid.cell();
}

double volume(const MetricField& field) {
  std::vector<double> det(field.values.size());
  for (std::size_t i = 0; i < det.size(); ++i) {
    const Mat2& g = field.values[i];
    det[i] = (g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0)).real();
  }
  return integrate(field.grid, det);
}

std::vector<cplx> wedge_pair(const std::vector<Mat2>& b, const std::vector<Mat2>& c) {
  std::vector<cplx> out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = wedge_pair(b[i], c[i]);
  return out;
}

double degree(const MetricField& field, const JetField& jf) {
  std::vector<double> v(field.values.size());
  parallel_for(v.size(), [&](std::size_t i) {
    const Geometry geo(jf.jets[i]);
    const HodgeOperators h = hodge_operators(geo);
    v[i] = wedge_pair(-h.log_det, field.values[i]).real();
  });
  return integrate(field.grid, v);
}

double degree(const MetricField& field) { return degree(field, jets(field)); }

double divisor_slice_integral(const MetricField& field) {
  const Grid& g = field.grid;
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(g.dims[0]) * g.dims[1]);
  for (int i0 = 0; i0 < g.dims[0]; ++i0)
    for (int i1 = 0; i1 < g.dims[1]; ++i1) v.push_back(field.values[g.index(i0, i1, 0, 0)](0, 0).real());
  return pairwise_sum(v) * g.spacing(0) * g.spacing(1);
}

// ---------------------------------------------------------------- forms

std::array<cplx, 6> real_components(const TwoForm& form) {
  using V = std::array<cplx, 4>;
  const V dz1{1.0, I_unit, 0.0, 0.0};
  const V dz2{0.0, 0.0, 1.0, I_unit};
  const V dzb1{1.0, -I_unit, 0.0, 0.0};
  const V dzb2{0.0, 0.0, 1.0, -I_unit};
  const std::array<V, 2> dz{dz1, dz2};
  const std::array<V, 2> dzb{dzb1, dzb2};
  std::array<cplx, 6> out{};
  auto add = [&](const cplx& coef, const V& u, const V& v) {
    for (int p = 0; p < 6; ++p) {
      const int a = pair_ix[p][0], b = pair_ix[p][1];
      out[p] += coef * (u[a] * v[b] - u[b] * v[a]);
    }
  };
  add(form.p20, dz1, dz2);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) add(0.5 * I_unit * form.p11(j, k), dz[j], dzb[k]);
  add(form.p02, dzb1, dzb2);
  return out;
}

RealTwoFormField real_components(const FormField& form) {
  RealTwoFormField out{form.grid, std::vector<std::array<cplx, 6>>(form.values.size())};
  for (std::size_t i = 0; i < form.values.size(); ++i) out.c[i] = real_components(form.values[i]);
  return out;
}

cplx wedge_real(const std::array<cplx, 6>& b, const std::array<cplx, 6>& c) {
  // pairs: 0:01 1:02 2:03 3:12 4:13 5:23
  return b[0] * c[5] - b[1] * c[4] + b[2] * c[3] + b[3] * c[2] - b[4] * c[1] + b[5] * c[0];
}

namespace {

std::vector<ComplexField> split(const Grid& g, std::size_t n, std::size_t comps,
                                const std::function<cplx(std::size_t, std::size_t)>& get) {
  std::vector<ComplexField> out(comps, ComplexField{g, std::vector<cplx>(n)});
  for (std::size_t c = 0; c < comps; ++c)
    for (std::size_t i = 0; i < n; ++i) out[c].v[i] = get(i, c);
  return out;
}

}  // namespace

RealTwoFormField exterior_derivative(const OneFormField& a) {
  const std::size_t n = a.c.size();
  const auto comp = split(a.grid, n, 4, [&](std::size_t i, std::size_t c) { return a.c[i][c]; });
  // D[b][c] = ∂_b α_c
  std::array<std::array<ComplexField, 4>, 4> D;
  for (int b = 0; b < 4; ++b)
    for (int c = 0; c < 4; ++c) D[b][c] = differentiate(comp[c], b + 1, 1);
  RealTwoFormField out{a.grid, std::vector<std::array<cplx, 6>>(n)};
  for (std::size_t i = 0; i < n; ++i)
    for (int p = 0; p < 6; ++p) {
      const int x = pair_ix[p][0], y = pair_ix[p][1];
      out.c[i][p] = D[x][y].v[i] - D[y][x].v[i];
    }
  return out;
}

ThreeFormField exterior_derivative(const RealTwoFormField& b) {
  const std::size_t n = b.c.size();
  const auto comp = split(b.grid, n, 6, [&](std::size_t i, std::size_t c) { return b.c[i][c]; });
  std::array<std::array<ComplexField, 6>, 4> D;
  for (int a = 0; a < 4; ++a)
    for (int p = 0; p < 6; ++p) D[a][p] = differentiate(comp[p], a + 1, 1);
  auto dval = [&](std::size_t i, int a, int x, int y) {
    if (x < y) return D[a][pair_slot(x, y)].v[i];
    return -D[a][pair_slot(y, x)].v[i];
  };
  ThreeFormField out{b.grid, std::vector<std::array<cplx, 4>>(n)};
  for (std::size_t i = 0; i < n; ++i)
    for (int t = 0; t < 4; ++t) {
      const int x = triple_ix[t][0], y = triple_ix[t][1], z = triple_ix[t][2];
      out.c[i][t] = dval(i, x, y, z) - dval(i, y, x, z) + dval(i, z, x, y);
    }
  return out;
}

ThreeFormField exterior_derivative(const FormField& b) {
  return exterior_derivative(real_components(b));
}

FormNorms norms(const ThreeFormField& f) {
  FormNorms out;
  std::vector<double> sq(f.c.size());
  for (std::size_t i = 0; i < f.c.size(); ++i) {
    double s = 0.0;
    for (const cplx& v : f.c[i]) {
      out.max = std::max(out.max, std::abs(v));
      s += std::norm(v);
    }
    sq[i] = s;
  }
  out.l2 = std::sqrt(integrate(f.grid, sq));
  return out;
}

// -------------------------------------------------------- serialization

namespace {

constexpr char magic[8] = {'P', 'L', 'U', 'R', 'I', 'G', 'E', 'O'};
constexpr std::uint32_t format_version = 1;

template <typename T>
void put(std::ostream& out, T v) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.write(reinterpret_cast<const char*>(b), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  unsigned char b[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(b), sizeof(T)))
    throw Error(ErrorKind::parse, "field file truncated");
  T v;
  std::memcpy(&v, b, sizeof(T));
  return v;
}

}  // namespace

void write_binary(const MetricField& field, std::ostream& out) {
  out.write(magic, sizeof(magic));
  put<std::uint32_t>(out, format_version);
  for (int d : field.grid.dims) put<std::int32_t>(out, d);
  for (const Mat2& g : field.values)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        put<double>(out, g(i, j).real());
        put<double>(out, g(i, j).imag());
      }
}

MetricField read_binary(std::istream& in) {
  char m[8];
  if (!in.read(m, sizeof(m)) || std::memcmp(m, magic, sizeof(m)) != 0)
    throw Error(ErrorKind::parse, "field file has no valid header");
  if (get<std::uint32_t>(in) != format_version)
    throw Error(ErrorKind::parse, "unsupported field file version");
  MetricField f;
  for (int a = 0; a < 4; ++a) {
    const std::int32_t d = get<std::int32_t>(in);
    if (d < 4 || d > 4096 || d % 2 != 0) throw Error(ErrorKind::parse, "invalid grid size in field file");
    f.grid.dims[a] = d;
  }
  f.values.resize(f.grid.size());
  for (Mat2& g : f.values)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const double re = get<double>(in);
        const double im = get<double>(in);
        g(i, j) = cplx{re, im};
      }
  if (in.peek() != std::char_traits<char>::eof())
    throw Error(ErrorKind::parse, "trailing bytes in field file");
  try {
    f.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::parse, std::string("field file invalid: ") + e.what());
  }
  return f;
}

void save_binary(const MetricField& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot open " + path);
  write_binary(field, out);
  if (!out) throw Error(ErrorKind::io, "write failed for " + path);
}

MetricField load_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path);
  return read_binary(in);
}

void write_csv(const MetricField& field, std::ostream& out) {
  if (field.grid.size() > 65536) throw Error(ErrorKind::precondition, "grid too large for CSV");
  out << "i1,i2,i3,i4,g11_re,g11_im,g12_re,g12_im,g21_re,g21_im,g22_re,g22_im\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (std::size_t n = 0; n < field.values.size(); ++n) {
    const auto c = field.grid.coords(n);
    line.str("");
    line << c[0] << ',' << c[1] << ',' << c[2] << ',' << c[3];
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        line << ',' << field.values[n](i, j).real() << ',' << field.values[n](i, j).imag();
    out << line.str() << '\n';
  }
}

}  // namespace plurigeo
