#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <ostream>

namespace hommb {

/// Integer multi-index in D dimensions. Value type, aggregate-initializable:
/// IndexVec<2>{i, j}.
template <int D>
struct IndexVec {
  static_assert(D >= 1 && D <= 6, "supported dimension range is 1..6");

  std::array<int, D> v{};

  int& operator[](int d) { return v[static_cast<size_t>(d)]; }
  int operator[](int d) const { return v[static_cast<size_t>(d)]; }

  static constexpr IndexVec zero() { return IndexVec{}; }

  static constexpr IndexVec uniform(int a) {
    IndexVec r;
    for (int d = 0; d < D; ++d) r.v[static_cast<size_t>(d)] = a;
    return r;
  }

  /// Unit vector along axis d.
  static constexpr IndexVec unit(int d) {
    IndexVec r;
    r.v[static_cast<size_t>(d)] = 1;
    return r;
  }

  friend bool operator==(const IndexVec& a, const IndexVec& b) { return a.v == b.v; }
  friend bool operator!=(const IndexVec& a, const IndexVec& b) { return a.v != b.v; }

  friend IndexVec operator+(IndexVec a, const IndexVec& b) {
    for (int d = 0; d < D; ++d) a[d] += b[d];
    return a;
  }
  friend IndexVec operator-(IndexVec a, const IndexVec& b) {
    for (int d = 0; d < D; ++d) a[d] -= b[d];
    return a;
  }
  friend IndexVec operator*(int s, IndexVec a) {
    for (int d = 0; d < D; ++d) a[d] *= s;
    return a;
  }
  IndexVec operator-() const { return -1 * (*this); }

  IndexVec& operator+=(const IndexVec& b) { return *this = *this + b; }
  IndexVec& operator-=(const IndexVec& b) { return *this = *this - b; }

  /// Lexicographic comparison, axis 0 most significant. Used for ordered maps
  /// and deterministic iteration over index sets, not for geometry.
  friend bool operator<(const IndexVec& a, const IndexVec& b) { return a.v < b.v; }
};

template <int D>
std::ostream& operator<<(std::ostream& os, const IndexVec<D>& iv) {
  os << '(';
  for (int d = 0; d < D; ++d) os << iv[d] << (d + 1 < D ? "," : "");
  return os << ')';
}

/// Real-valued point/vector in D dimensions.
template <int D>
struct RealVec {
  std::array<double, D> v{};

  double& operator[](int d) { return v[static_cast<size_t>(d)]; }
  double operator[](int d) const { return v[static_cast<size_t>(d)]; }

  static constexpr RealVec zero() { return RealVec{}; }

  static constexpr RealVec uniform(double a) {
    RealVec r;
    for (int d = 0; d < D; ++d) r.v[static_cast<size_t>(d)] = a;
    return r;
  }

  friend bool operator==(const RealVec& a, const RealVec& b) { return a.v == b.v; }

  friend RealVec operator+(RealVec a, const RealVec& b) {
    for (int d = 0; d < D; ++d) a[d] += b[d];
    return a;
  }
  friend RealVec operator-(RealVec a, const RealVec& b) {
    for (int d = 0; d < D; ++d) a[d] -= b[d];
    return a;
  }
  friend RealVec operator*(double s, RealVec a) {
    for (int d = 0; d < D; ++d) a[d] *= s;
    return a;
  }
};

template <int D>
inline double dot(const RealVec<D>& a, const RealVec<D>& b) {
  double s = 0.0;
  for (int d = 0; d < D; ++d) s += a[d] * b[d];
  return s;
}

template <int D>
inline double max_norm(const RealVec<D>& a) {
  double s = 0.0;
  for (int d = 0; d < D; ++d) s = std::max(s, std::abs(a[d]));
  return s;
}

template <int D>
std::ostream& operator<<(std::ostream& os, const RealVec<D>& x) {
  os << '(';
  for (int d = 0; d < D; ++d) os << x[d] << (d + 1 < D ? "," : "");
  return os << ')';
}

} // namespace hommb
