#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace plurigeo {

using cplx = std::complex<double>;

/// 2x2 complex block indexed (i, j̄).
using Mat2 = Eigen::Matrix2cd;

constexpr double pi = 3.14159265358979323846;
constexpr cplx I_unit{0.0, 1.0};

enum class ErrorKind {
  singular_metric,
  domain,
  precondition,
  degenerate,
  blowup,
  parse,
  config,
  io
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Index type of a tensor slot.
enum class Slot : unsigned char { holo, anti };

/// Dense rank-R complex block over n = 2 with a declared index signature.
template <std::size_t Rank>
struct TensorBlock {
  static constexpr std::size_t size = std::size_t{1} << Rank;

  std::array<Slot, Rank> signature{};
  std::array<cplx, size> c{};

  TensorBlock() = default;
  explicit TensorBlock(const std::array<Slot, Rank>& sig) : signature(sig) {}

  template <typename... Ix>
  cplx& operator()(Ix... ix) {
    static_assert(sizeof...(Ix) == Rank);
    return c[flat(ix...)];
  }
  template <typename... Ix>
  const cplx& operator()(Ix... ix) const {
    static_assert(sizeof...(Ix) == Rank);
    return c[flat(ix...)];
  }

  double max_abs() const {
    double m = 0.0;
    for (const auto& v : c) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  template <typename... Ix>
  static std::size_t flat(Ix... ix) {
    std::size_t k = 0;
    ((k = (k << 1) | static_cast<std::size_t>(ix)), ...);
    return k;
  }
};

using Tensor3 = TensorBlock<3>;
using Tensor4 = TensorBlock<4>;

inline double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace plurigeo
