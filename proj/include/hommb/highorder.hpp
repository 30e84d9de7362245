#pragma once

#include "hommb/stencil.hpp"

namespace hommb {

namespace detail {

/// Visit each axis-0 row of `b`: fn(rowStart, rowLength).
template <int D, typename Fn>
inline void for_each_row(const Box<D>& b, Fn&& fn) {
  if (b.empty()) return;
  Box<D> outer = b;
  outer.m_hi[0] = outer.m_lo[0];
  const int n = b.extent(0);
  for (BoxIter<D> it(outer); it.ok(); ++it) fn(*it, n);
}

} // namespace detail

/// Point values at cell centers from fourth-order cell averages:
///   u(x_i) = <u>_i - (1/24) sum_d (<u>_{i+e_d} - 2<u>_i + <u>_{i-e_d}).
/// Requires src filled on grow(target, 1). Exact for polynomials of total
/// degree <= 3, O(h^4) otherwise.
template <int D>
inline void deconvolve_cell(const GridArray<D>& src, GridArray<D>& dst,
                            const Box<D>& target) {
  HOMMB_REQUIRE(src.centering().is_cell() && dst.centering().is_cell(),
                "deconvolve_cell is a cell-centered operator");
  HOMMB_REQUIRE(src.ncomp() == dst.ncomp(), "component mismatch");
  HOMMB_REQUIRE(src.storage_box().contains(grow(target, 1)),
                "deconvolve_cell needs one ghost layer");
  HOMMB_REQUIRE(dst.storage_box().contains(target), "dst does not cover target");
  for (int c = 0; c < src.ncomp(); ++c) {
    detail::for_each_row<D>(target, [&](const IndexVec<D>& row, int n) {
      const double* s = src.data() + src.offset(row, c);
      double* d = dst.data() + dst.offset(row, c);
      std::int64_t str[D];
      for (int ax = 0; ax < D; ++ax) str[ax] = src.stride(ax);
      for (int i = 0; i < n; ++i) {
        double lap = 0.0;
        for (int ax = 0; ax < D; ++ax)
          lap += s[i + str[ax]] + s[i - str[ax]];
        lap -= 2.0 * D * s[i];
        d[i] = s[i] - lap / 24.0;
      }
    });
  }
}

/// Fourth-order cell averages from point values at cell centers (inverse
/// correction of deconvolve_cell). Requires src on grow(target, 1).
template <int D>
inline void convolve_cell(const GridArray<D>& src, GridArray<D>& dst,
                          const Box<D>& target) {
  HOMMB_REQUIRE(src.centering().is_cell() && dst.centering().is_cell(),
                "convolve_cell is a cell-centered operator");
  HOMMB_REQUIRE(src.ncomp() == dst.ncomp(), "component mismatch");
  HOMMB_REQUIRE(src.storage_box().contains(grow(target, 1)),
                "convolve_cell needs one ghost layer");
  HOMMB_REQUIRE(dst.storage_box().contains(target), "dst does not cover target");
  for (int c = 0; c < src.ncomp(); ++c) {
    detail::for_each_row<D>(target, [&](const IndexVec<D>& row, int n) {
      const double* s = src.data() + src.offset(row, c);
      double* d = dst.data() + dst.offset(row, c);
      std::int64_t str[D];
      for (int ax = 0; ax < D; ++ax) str[ax] = src.stride(ax);
      for (int i = 0; i < n; ++i) {
        double lap = 0.0;
        for (int ax = 0; ax < D; ++ax)
          lap += s[i + str[ax]] + s[i - str[ax]];
        lap -= 2.0 * D * s[i];
        d[i] = s[i] + lap / 24.0;
      }
    });
  }
}

namespace detail {

// Undivided second difference along one axis, falling back to the one-sided
// stencil (2, -5, 4, -1) where the centered one would leave `avail`. Both
// variants have zero weight sum and are exact through cubics, so the bounded
// convolution pair below preserves constants identically and stays fourth
// order up to the edge.
template <int D>
inline double second_diff_bounded(const double* s, std::int64_t i,
                                  std::int64_t str, int pos, int n) {
  if (pos >= 1 && pos <= n - 2)
    return s[i - str] - 2.0 * s[i] + s[i + str];
  const std::int64_t e = (pos == 0) ? str : -str;
  return 2.0 * s[i] - 5.0 * s[i + e] + 4.0 * s[i + 2 * e] - s[i + 3 * e];
}

template <int D>
inline void convolution_correction_bounded(const GridArray<D>& src,
                                           GridArray<D>& dst,
                                           const Box<D>& target,
                                           const Box<D>& avail, double sign) {
  HOMMB_REQUIRE(src.centering().is_cell() && dst.centering().is_cell(),
                "bounded convolution is a cell-centered operator");
  HOMMB_REQUIRE(src.ncomp() == dst.ncomp(), "component mismatch");
  HOMMB_REQUIRE(avail.contains(target) && src.storage_box().contains(avail),
                "target exceeds available data");
  HOMMB_REQUIRE(dst.storage_box().contains(target), "dst does not cover target");
  for (int d = 0; d < D; ++d)
    HOMMB_REQUIRE(avail.extent(d) >= 4, "bounded convolution needs 4 cells per axis");
  for (int c = 0; c < src.ncomp(); ++c) {
    for (BoxIter<D> it(target); it.ok(); ++it) {
      const IndexVec<D> iv = *it;
      const std::int64_t i = src.offset(iv, c);
      double lap = 0.0;
      for (int ax = 0; ax < D; ++ax)
        lap += second_diff_bounded<D>(src.data(), i, src.stride(ax),
                                      iv[ax] - avail.lo()[ax], avail.extent(ax));
      dst.data()[dst.offset(iv, c)] = src.data()[i] + sign * lap / 24.0;
    }
  }
}

} // namespace detail

/// deconvolve_cell without the ghost-layer requirement: cells inside `avail`
/// next to its edges use one-sided second differences instead.
template <int D>
inline void deconvolve_cell_bounded(const GridArray<D>& src, GridArray<D>& dst,
                                    const Box<D>& target, const Box<D>& avail) {
  detail::convolution_correction_bounded(src, dst, target, avail, -1.0);
}

/// convolve_cell restricted to `avail`, one-sided at its edges.
template <int D>
inline void convolve_cell_bounded(const GridArray<D>& src, GridArray<D>& dst,
                                  const Box<D>& target, const Box<D>& avail) {
  detail::convolution_correction_bounded(src, dst, target, avail, 1.0);
}

/// Fourth-order face averages from cell averages along `axis`:
///   <u>_{face i} = 7/12 (<u>_{i-1} + <u>_i) - 1/12 (<u>_{i-2} + <u>_{i+1}),
/// face i being the low face of cell i. Computes every face in faceBox;
/// src must hold cells i-2 .. i+1 for each.
template <int D>
inline void interp_cell_to_face(const GridArray<D>& src, int axis,
                                const Box<D>& faceBox, GridArray<D>& dst) {
  HOMMB_REQUIRE(src.centering().is_cell(), "source must be cell-centered");
  HOMMB_REQUIRE(dst.centering() == Centering::face(axis), "dst centering mismatch");
  HOMMB_REQUIRE(src.ncomp() == dst.ncomp(), "component mismatch");
  Box<D> need = faceBox;
  need.m_lo[axis] -= 2;
  need.m_hi[axis] += 1;
  HOMMB_REQUIRE(src.storage_box().contains(need),
                "interp_cell_to_face needs cells i-2..i+1 per face");
  HOMMB_REQUIRE(dst.storage_box().contains(faceBox), "dst does not cover faceBox");
  const std::int64_t a = src.stride(axis);
  for (int c = 0; c < src.ncomp(); ++c) {
    detail::for_each_row<D>(faceBox, [&](const IndexVec<D>& row, int n) {
      // face i is the low face of cell i, so src is indexed at cell i
      const double* s = src.data() + src.offset(row, c);
      double* d = dst.data() + dst.offset(row, c);
      for (int i = 0; i < n; ++i)
        d[i] = (7.0 / 12.0) * (s[i - a] + s[i]) - (1.0 / 12.0) * (s[i - 2 * a] + s[i + a]);
    });
  }
}

/// One-sided variant for faces near a boundary of available data: for each
/// face the 4-cell stencil is slid (preserving degree 3) so that it stays
/// inside `avail`. Faces deeper than one cell outside avail are an error.
template <int D>
inline void interp_cell_to_face_bounded(const GridArray<D>& src, int axis,
                                        const Box<D>& faceBox, const Box<D>& avail,
                                        GridArray<D>& dst) {
  HOMMB_REQUIRE(src.centering().is_cell(), "source must be cell-centered");
  HOMMB_REQUIRE(dst.centering() == Centering::face(axis), "dst centering mismatch");
  // Precompute the five possible shifts: -? not needed; shifts 0..3 move the
  // stencil high-ward (low boundary), negative low-ward (high boundary).
  StencilKernel<D> kern[7];
  for (int sh = -3; sh <= 3; ++sh)
    kern[sh + 3] = stencil::face_from_cell_kernel<D>(axis, sh);
  for (int c = 0; c < src.ncomp(); ++c) {
    for (BoxIter<D> it(faceBox); it.ok(); ++it) {
      const IndexVec<D> f = *it;
      // centered stencil covers cells f-2 .. f+1 along axis
      int sh = 0;
      if (f[axis] - 2 < avail.lo()[axis]) sh = avail.lo()[axis] - (f[axis] - 2);
      if (f[axis] + 1 > avail.hi()[axis]) sh = avail.hi()[axis] - (f[axis] + 1);
      HOMMB_REQUIRE(sh >= -3 && sh <= 3, "face too far outside available data");
      dst(f, c) = kern[sh + 3].apply(src, f, c);
    }
  }
}

/// Fourth-order face average of a product from face averages of the factors:
///   <fg> = <f><g> + (1/12) sum_{d transverse} (d_d <f>) (d_d <g>) h^2
/// with the derivatives approximated by centered differences; in undivided
/// form the correction is (1/48) * Delta_d f * Delta_d g summed over the
/// D-1 transverse axes. Requires f, g filled one face beyond faceBox in each
/// transverse direction.
template <int D>
inline void face_product_average(const GridArray<D>& f, const GridArray<D>& g,
                                 int axis, const Box<D>& faceBox, GridArray<D>& dst,
                                 int fcomp = 0, int gcomp = 0, int dcomp = 0) {
  HOMMB_REQUIRE(f.centering() == Centering::face(axis) &&
                g.centering() == Centering::face(axis) &&
                dst.centering() == Centering::face(axis),
                "face_product_average centering mismatch");
  const double* fp = f.data();
  const double* gp = g.data();
  detail::for_each_row<D>(faceBox, [&](const IndexVec<D>& row, int n) {
    const std::int64_t fo = f.offset(row, fcomp);
    const std::int64_t go = g.offset(row, gcomp);
    double* d = dst.data() + dst.offset(row, dcomp);
    for (int i = 0; i < n; ++i) {
      double corr = 0.0;
      for (int t = 0; t < D; ++t) {
        if (t == axis) continue;
        const std::int64_t ft = f.stride(t), gt = g.stride(t);
        corr += (fp[fo + i + ft] - fp[fo + i - ft]) * (gp[go + i + gt] - gp[go + i - gt]);
      }
      d[i] = fp[fo + i] * gp[go + i] + corr / 48.0;
    }
  });
}

/// Discrete flux divergence of face-averaged fluxes:
///   (div F)_i = sum_d (F_d(i + e_d) - F_d(i)) / h_d.
/// fluxes[d] must be Face(d)-centered and cover the faces of `target`.
/// Summing (div F)_i * prod(h) over any region telescopes to the net flux
/// through its boundary, which is the conservation property tests rely on.
template <int D>
inline void divergence(const std::array<GridArray<D>, static_cast<size_t>(D)>& fluxes,
                       const RealVec<D>& h, const Box<D>& target, GridArray<D>& dst,
                       int comp = 0, int dcomp = 0) {
  HOMMB_REQUIRE(dst.centering().is_cell(), "divergence writes cell data");
  for (int d = 0; d < D; ++d)
    HOMMB_REQUIRE(fluxes[static_cast<size_t>(d)].centering() == Centering::face(d),
                  "flux centering mismatch");
  detail::for_each_row<D>(target, [&](const IndexVec<D>& row, int n) {
    double* out = dst.data() + dst.offset(row, dcomp);
    for (int i = 0; i < n; ++i) out[i] = 0.0;
    for (int d = 0; d < D; ++d) {
      const GridArray<D>& F = fluxes[static_cast<size_t>(d)];
      const double* fp = F.data() + F.offset(row, comp);
      const std::int64_t fd = F.stride(d);
      const double inv = 1.0 / h[d];
      for (int i = 0; i < n; ++i) out[i] += (fp[i + fd] - fp[i]) * inv;
    }
  });
}

/// Fill `width` layers of ghost cells outside the given face of `valid` by
/// cubic extrapolation of cell averages from the four interior cells behind
/// the face. Transverse extent of the filled slab follows `cover`.
template <int D>
inline void extrapolate_face_ghosts(GridArray<D>& a, const Box<D>& valid,
                                    int axis, int side, int width,
                                    const Box<D>& cover) {
  StencilKernel<D> kern[8];
  for (int dist = 1; dist <= width; ++dist)
    kern[dist] = stencil::extrapolation_kernel<D>(axis, side, dist);
  for (int dist = 1; dist <= width; ++dist) {
    Box<D> slab = cover;
    const int edge = (side == 0) ? valid.lo()[axis] : valid.hi()[axis];
    const int gi = (side == 0) ? edge - dist : edge + dist;
    slab.m_lo[axis] = gi;
    slab.m_hi[axis] = gi;
    for (int c = 0; c < a.ncomp(); ++c)
      for (BoxIter<D> it(slab); it.ok(); ++it)
        a(*it, c) = kern[dist].apply(a, *it, c);
  }
}

} // namespace hommb
