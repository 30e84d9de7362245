#ifndef HOMMB_MIXEDDIM_HPP
#define HOMMB_MIXEDDIM_HPP

#include <array>
#include <vector>

#include "hommb/errors.hpp"
#include "hommb/layout.hpp"

namespace hommb {

/// Which axes of a D-dimensional space to remove, and the index each removed
/// axis is pinned at. Removed axes are listed in increasing order; the
/// surviving axes keep their relative order in the lower-dimensional space.
template <int D, int K>
struct SliceSpec {
  static_assert(K >= 1 && K < D, "must remove between 1 and D-1 axes");
  std::array<int, K> m_axes{};
  std::array<int, K> m_fixed{};

  void check() const {
    for (int k = 0; k < K; ++k) {
      if (m_axes[k] < 0 || m_axes[k] >= D)
        throw ValidationError("slice axis out of range");
      if (k > 0 && m_axes[k] <= m_axes[k - 1])
        throw ValidationError("slice axes must be strictly increasing");
    }
  }

  bool removes(int axis) const {
    for (int k = 0; k < K; ++k)
      if (m_axes[k] == axis) return true;
    return false;
  }

  std::array<int, D - K> retained() const {
    std::array<int, D - K> r{};
    int j = 0;
    for (int d = 0; d < D; ++d)
      if (!removes(d)) r[j++] = d;
    return r;
  }

  /// Rebuild a full-dimensional index from a sliced one.
  IndexVec<D> embed(const IndexVec<D - K>& j) const {
    IndexVec<D> i;
    int k = 0, r = 0;
    for (int d = 0; d < D; ++d) {
      if (k < K && m_axes[k] == d)
        i[d] = m_fixed[k++];
      else
        i[d] = j[r++];
    }
    return i;
  }

  /// Drop the removed coordinates of a full-dimensional index.
  IndexVec<D - K> project(const IndexVec<D>& i) const {
    IndexVec<D - K> j;
    int k = 0, r = 0;
    for (int d = 0; d < D; ++d) {
      if (k < K && m_axes[k] == d)
        ++k;
      else
        j[r++] = i[d];
    }
    return j;
  }

  Box<D - K> project_box(const Box<D>& b) const {
    return Box<D - K>(project(b.lo()), project(b.hi()));
  }
};

namespace detail {

// centering of the sliced data: a retained face axis keeps its face role
// under the new axis numbering; a removed face axis leaves cell-centered data
template <int D, int K>
inline Centering slice_centering(Centering in, const SliceSpec<D, K>& spec) {
  if (in.is_cell() || spec.removes(in.face_axis())) return Centering::cell();
  const auto ret = spec.retained();
  for (int r = 0; r < D - K; ++r)
    if (ret[static_cast<size_t>(r)] == in.face_axis()) return Centering::face(r);
  return Centering::cell(); // unreachable
}

// the index range a fixed slice index must fall in: cells of the valid box,
// extended by one on the high side when that axis is face-centered
// (valid_box already carries that extension)
template <int D>
inline void check_fixed_in_range(const GridArray<D>& a, int axis, int fixed) {
  const Box<D> cb = a.valid_box();
  if (fixed < cb.lo()[axis] || fixed > cb.hi()[axis])
    throw ValidationError("slice fixed index out of range");
}

} // namespace detail

/// Copy the plane {i[axes] = fixed} of `in` into a (D-K)-dimensional array.
template <int D, int K>
inline GridArray<D - K> slice_array(const GridArray<D>& in,
                                    const SliceSpec<D, K>& spec) {
  spec.check();
  for (int k = 0; k < K; ++k)
    detail::check_fixed_in_range(in, spec.m_axes[k], spec.m_fixed[k]);
  const Centering outCent = detail::slice_centering<D, K>(in.centering(), spec);
  GridArray<D - K> out(spec.project_box(in.box()), 0, outCent, in.ncomp());
  for (int c = 0; c < in.ncomp(); ++c)
    for (BoxIter<D - K> it(out.storage_box()); it.ok(); ++it)
      out(*it, c) = in(spec.embed(*it), c);
  return out;
}

/// Place `in` on the slice plane of a D-dimensional array over targetBox,
/// zero everywhere else. slice_array(inject_array(u)) == u exactly.
template <int D, int K>
inline GridArray<D> inject_array(const GridArray<D - K>& in,
                                 const SliceSpec<D, K>& spec,
                                 const Box<D>& targetBox) {
  spec.check();
  Centering outCent = Centering::cell();
  if (!in.centering().is_cell()) {
    const auto ret = spec.retained();
    outCent = Centering::face(ret[static_cast<size_t>(in.centering().face_axis())]);
  }
  if (spec.project_box(targetBox) != in.box())
    throw ValidationError("inject: retained-axis box mismatch");
  GridArray<D> out(targetBox, 0, outCent, in.ncomp(), 0.0);
  const Box<D> cb = centered_box(targetBox, outCent);
  for (int k = 0; k < K; ++k) {
    const int ax = spec.m_axes[k];
    if (spec.m_fixed[k] < cb.lo()[ax] || spec.m_fixed[k] > cb.hi()[ax])
      throw ValidationError("inject: fixed index outside target box");
  }
  for (int c = 0; c < in.ncomp(); ++c)
    for (BoxIter<D - K> it(in.storage_box()); it.ok(); ++it)
      out(spec.embed(*it), c) = in(*it, c);
  return out;
}

/// Replicate `in` along the removed axes of targetBox: out(i) = in(project(i)).
template <int D, int K>
inline GridArray<D> spread_array(const GridArray<D - K>& in,
                                 const SliceSpec<D, K>& spec,
                                 const Box<D>& targetBox) {
  spec.check();
  Centering outCent = Centering::cell();
  if (!in.centering().is_cell()) {
    const auto ret = spec.retained();
    outCent = Centering::face(ret[static_cast<size_t>(in.centering().face_axis())]);
  }
  if (spec.project_box(targetBox) != in.box())
    throw ValidationError("spread: retained-axis box mismatch");
  GridArray<D> out(targetBox, 0, outCent, in.ncomp());
  for (int c = 0; c < in.ncomp(); ++c)
    for (BoxIter<D> it(out.storage_box()); it.ok(); ++it)
      out(*it, c) = in(spec.project(*it), c);
  return out;
}

/// Integrate cell-averaged data over the listed axes: out(j) = sum of
/// in(i) * measure over every removed-axis index, summed in lexicographic
/// order so the result is reproducible bitwise. `measure` is the product of
/// the cell spacings of the reduced axes (cell averages times cell measure
/// sum to the exact integral).
template <int D, std::size_t NK, int K = static_cast<int>(NK)>
inline GridArray<D - K> reduce_integrate_array(const GridArray<D>& in,
                                               const std::array<int, NK>& axes,
                                               double measure) {
  SliceSpec<D, K> spec;
  spec.m_axes = axes;
  spec.check();
  HOMMB_REQUIRE(in.centering().is_cell(), "reduce_integrate wants cell data");
  const Box<D>& vb = in.valid_box();
  // the removed-axis subspace, iterated innermost in lexicographic order
  IndexVec<K> rlo, rhi;
  for (int k = 0; k < K; ++k) {
    rlo[k] = vb.lo()[axes[static_cast<size_t>(k)]];
    rhi[k] = vb.hi()[axes[static_cast<size_t>(k)]];
  }
  const Box<K> rbox(rlo, rhi);
  GridArray<D - K> out(spec.project_box(vb), 0, Centering::cell(), in.ncomp());
  for (int c = 0; c < in.ncomp(); ++c)
    for (BoxIter<D - K> it(out.valid_box()); it.ok(); ++it) {
      IndexVec<D> i = spec.embed(*it);
      double acc = 0.0;
      for (BoxIter<K> rt(rbox); rt.ok(); ++rt) {
        for (int k = 0; k < K; ++k) i[axes[static_cast<size_t>(k)]] = (*rt)[k];
        acc += in(i, c);
      }
      out(*it, c) = acc * measure;
    }
  return out;
}

/// Layout-level variants. Each assembles the block into a single array first
/// (patch valid regions are disjoint, so assembly is order-independent) and
/// then runs the serial kernel, which pins the arithmetic order: results are
/// bitwise identical for every decomposition of the same block.

template <int D, int K>
inline std::vector<GridArray<D - K>> slice(const PatchField<D>& f,
                                           const SliceSpec<D, K>& spec) {
  std::vector<GridArray<D - K>> out;
  const MultiBlockDomain<D>& dom = f.layout().domain();
  out.reserve(static_cast<size_t>(dom.nblocks()));
  for (BlockId b = 0; b < dom.nblocks(); ++b)
    out.push_back(slice_array(f.assemble(b), spec));
  return out;
}

template <int D, std::size_t NK, int K = static_cast<int>(NK)>
inline std::vector<GridArray<D - K>> reduce_integrate(
    const PatchField<D>& f, const std::array<int, NK>& axes, double measure) {
  std::vector<GridArray<D - K>> out;
  const MultiBlockDomain<D>& dom = f.layout().domain();
  out.reserve(static_cast<size_t>(dom.nblocks()));
  for (BlockId b = 0; b < dom.nblocks(); ++b) {
    const GridArray<D> whole = f.assemble(b);
    if (whole.valid_box() != dom.block_box(b))
      throw ValidationError("reduce_integrate: partial coverage of block");
    out.push_back(reduce_integrate_array(whole, axes, measure));
  }
  return out;
}

template <int D, int K>
inline void inject(const std::vector<GridArray<D - K>>& in,
                   const SliceSpec<D, K>& spec, PatchField<D>& out) {
  const MultiBlockDomain<D>& dom = out.layout().domain();
  HOMMB_REQUIRE(static_cast<int>(in.size()) == dom.nblocks(),
                "inject: one lower-dimensional array per block");
  for (BlockId b = 0; b < dom.nblocks(); ++b)
    out.scatter(b, inject_array(in[static_cast<size_t>(b)], spec,
                                dom.block_box(b)));
}

template <int D, int K>
inline void spread(const std::vector<GridArray<D - K>>& in,
                   const SliceSpec<D, K>& spec, PatchField<D>& out) {
  const MultiBlockDomain<D>& dom = out.layout().domain();
  HOMMB_REQUIRE(static_cast<int>(in.size()) == dom.nblocks(),
                "spread: one lower-dimensional array per block");
  for (BlockId b = 0; b < dom.nblocks(); ++b)
    out.scatter(b, spread_array(in[static_cast<size_t>(b)], spec,
                                dom.block_box(b)));
}

/// One configuration-space step of the phase-space demonstration loop.
/// The 4D state lives on Omega4 = Omegax x Omegavel with axes (x, y, u, v).
struct PhaseState {
  GridArray<4> m_phi;  // cell averages on Omega4
  GridArray<2> m_phix; // configuration-space moment
  GridArray<2> m_sx;   // configuration-space source
  double m_dt = 0.0;
  RealVec<4> m_h{};    // per-axis spacings

  void check() const {
    SliceSpec<4, 2> conf;
    conf.m_axes = {2, 3};
    const Box<2> xb = conf.project_box(m_phi.valid_box());
    if (m_phix.valid_box() != xb || m_sx.valid_box() != xb)
      throw ValidationError("PhaseState: configuration boxes do not match phi");
  }
};

/// Advance the demonstration loop by one step:
///   S_u(x,y,u,v) = f(u,v)        (source profile spread over space)
///   S_x(x,y)     = integral of S_u over velocity
///   phi_x(x,y)   = integral of phi over velocity
///   phi_x^{n+1}  = phi_x + dt * S_x
/// The 4D field itself is not evolved; the step demonstrates the slice,
/// spread, and reduce plumbing on a realistic data layout.
template <typename F>
inline PhaseState phase_demo_step(const PhaseState& state, F&& f) {
  state.check();
  const Box<4>& b4 = state.m_phi.valid_box();
  SliceSpec<4, 2> velOf; // keep velocity axes, remove space
  velOf.m_axes = {0, 1};
  velOf.m_fixed = {b4.lo()[0], b4.lo()[1]};
  const Box<2> velBox = velOf.project_box(b4);

  GridArray<2> g(velBox, 0, Centering::cell(), 1);
  for (BoxIter<2> it(velBox); it.ok(); ++it)
    g(*it) = f(((*it)[0] + 0.5) * state.m_h[2], ((*it)[1] + 0.5) * state.m_h[3]);

  const GridArray<4> su = spread_array(g, velOf, b4);
  const double measure = state.m_h[2] * state.m_h[3];
  const std::array<int, 2> velAxes{2, 3};
  GridArray<2> sx = reduce_integrate_array(su, velAxes, measure);
  GridArray<2> phix = reduce_integrate_array(state.m_phi, velAxes, measure);

  PhaseState next;
  next.m_phi = state.m_phi;
  next.m_dt = state.m_dt;
  next.m_h = state.m_h;
  next.m_sx = std::move(sx);
  next.m_phix = GridArray<2>(phix.valid_box(), 0, Centering::cell(), 1);
  for (BoxIter<2> it(phix.valid_box()); it.ok(); ++it)
    next.m_phix(*it) = phix(*it) + state.m_dt * next.m_sx(*it);
  return next;
}

} // namespace hommb

#endif
