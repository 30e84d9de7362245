#pragma once

#include <vector>

#include "hommb/grid_array.hpp"
#include "hommb/smalldense.hpp"

namespace hommb {

/// Offsets-and-weights stencil with the polynomial degree it reproduces.
/// Kernels used in hot loops are hand-rolled; this type exists for the
/// boundary variants, for composing one-off operators, and so the advertised
/// degree of every stencil in the project is a testable object.
template <int D>
struct StencilKernel {
  std::vector<IndexVec<D>> m_offsets;
  std::vector<double> m_weights;
  int m_degree = 0; // reproduces all polynomials of total degree <= m_degree

  int size() const { return static_cast<int>(m_offsets.size()); }

  /// Apply at cell iv of a (cell- or face-indexed) array.
  double apply(const GridArray<D>& a, const IndexVec<D>& iv, int comp = 0) const {
    double s = 0.0;
    for (int k = 0; k < size(); ++k)
      s += m_weights[static_cast<size_t>(k)] * a(iv + m_offsets[static_cast<size_t>(k)], comp);
    return s;
  }
};

namespace stencil {

/// Average of x^k over the unit-width cell centered at integer offset i:
/// ((i+1/2)^(k+1) - (i-1/2)^(k+1)) / (k+1).
inline double cell_average_moment(int k, double i) {
  double hip = 1.0, him = 1.0;
  for (int p = 0; p <= k; ++p) { hip *= (i + 0.5); him *= (i - 0.5); }
  return (hip - him) / (k + 1);
}

/// Weights w_j such that sum_j w_j <u>_{c_j} equals u(x) exactly for every
/// polynomial u of degree < n, where <u>_c is the average of u over the unit
/// cell centered at c and n is the number of source cells. Positions are in
/// grid units relative to any convenient origin.
inline std::vector<double> point_from_cell_weights(const std::vector<double>& cellCenters,
                                                   double x) {
  const int n = static_cast<int>(cellCenters.size());
  detail::DenseMat A(n, n);
  std::vector<double> b(static_cast<size_t>(n));
  double xk = 1.0;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j)
      A(k, j) = cell_average_moment(k, cellCenters[static_cast<size_t>(j)]);
    b[static_cast<size_t>(k)] = xk;
    xk *= x;
  }
  return detail::solve_square(std::move(A), std::move(b));
}

/// Weights reconstructing the average over the unit cell centered at `target`
/// from averages over the cells centered at `cellCenters` (degree n-1 exact).
inline std::vector<double> cell_from_cell_weights(const std::vector<double>& cellCenters,
                                                  double target) {
  const int n = static_cast<int>(cellCenters.size());
  detail::DenseMat A(n, n);
  std::vector<double> b(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j)
      A(k, j) = cell_average_moment(k, cellCenters[static_cast<size_t>(j)]);
    b[static_cast<size_t>(k)] = cell_average_moment(k, target);
  }
  return detail::solve_square(std::move(A), std::move(b));
}

/// Fourth-order face value from four cell averages. `shift` selects the
/// stencil: 0 is the centered one (cells -2..1 relative to the face's
/// adjacent-high cell), positive shifts slide the stencil toward the high
/// side for use near a low boundary, negative toward the low side.
///
/// Face index convention: face f sits at cell-center coordinate f - 1/2 when
/// the source cells are numbered so cell i is centered at i.
template <int D>
inline StencilKernel<D> face_from_cell_kernel(int axis, int shift) {
  std::vector<double> centers(4);
  for (int j = 0; j < 4; ++j) centers[static_cast<size_t>(j)] = -2.0 + shift + j;
  const std::vector<double> w = point_from_cell_weights(centers, -0.5);
  StencilKernel<D> k;
  k.m_degree = 3;
  for (int j = 0; j < 4; ++j) {
    k.m_offsets.push_back((-2 + shift + j) * IndexVec<D>::unit(axis));
    k.m_weights.push_back(w[static_cast<size_t>(j)]);
  }
  return k;
}

/// Cubic extrapolation of cell averages to the ghost cell `dist` cells
/// outside the boundary (dist >= 1), from the four nearest interior cells.
/// side = 0 extrapolates past the low end, 1 past the high end.
template <int D>
inline StencilKernel<D> extrapolation_kernel(int axis, int side, int dist) {
  std::vector<double> centers(4);
  for (int j = 0; j < 4; ++j)
    centers[static_cast<size_t>(j)] = static_cast<double>(j);
  // interior cells sit at 0..3 away from the edge; ghost at -dist
  const std::vector<double> w = cell_from_cell_weights(centers, -static_cast<double>(dist));
  StencilKernel<D> k;
  k.m_degree = 3;
  const int sgn = (side == 0) ? 1 : -1; // direction from boundary into the interior
  for (int j = 0; j < 4; ++j) {
    k.m_offsets.push_back((sgn * (dist + j)) * IndexVec<D>::unit(axis));
    k.m_weights.push_back(w[static_cast<size_t>(j)]);
  }
  return k;
}

/// The 1/24 Laplacian correction kernel: deconvolve (sign=-1) maps
/// fourth-order cell averages to cell-center point values, convolve (sign=+1)
/// the other way.
template <int D>
inline StencilKernel<D> laplacian_correction_kernel(int sign) {
  StencilKernel<D> k;
  k.m_degree = 3;
  k.m_offsets.push_back(IndexVec<D>::zero());
  k.m_weights.push_back(1.0 - sign * (2.0 * D) / 24.0);
  for (int d = 0; d < D; ++d) {
    k.m_offsets.push_back(IndexVec<D>::unit(d));
    k.m_weights.push_back(sign / 24.0);
    k.m_offsets.push_back(-IndexVec<D>::unit(d));
    k.m_weights.push_back(sign / 24.0);
  }
  return k;
}

} // namespace stencil
} // namespace hommb
