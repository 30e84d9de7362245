#pragma once

#include <cstdint>
#include <ostream>

#include "hommb/errors.hpp"
#include "hommb/index.hpp"

namespace hommb {

/// Axis-aligned index box [lo, hi], bounds inclusive on both ends.
/// A box with hi[d] < lo[d] on any axis is empty and has zero cells.
template <int D>
struct Box {
  IndexVec<D> m_lo{};
  IndexVec<D> m_hi = IndexVec<D>::uniform(-1); // default-constructed box is empty

  Box() = default;
  Box(const IndexVec<D>& lo, const IndexVec<D>& hi) : m_lo(lo), m_hi(hi) {}

  const IndexVec<D>& lo() const { return m_lo; }
  const IndexVec<D>& hi() const { return m_hi; }

  bool empty() const {
    for (int d = 0; d < D; ++d)
      if (m_hi[d] < m_lo[d]) return true;
    return false;
  }

  int extent(int d) const { return m_hi[d] - m_lo[d] + 1; }

  std::int64_t cells() const {
    if (empty()) return 0;
    std::int64_t n = 1;
    for (int d = 0; d < D; ++d) n *= extent(d);
    return n;
  }

  bool contains(const IndexVec<D>& iv) const {
    for (int d = 0; d < D; ++d)
      if (iv[d] < m_lo[d] || iv[d] > m_hi[d]) return false;
    return true;
  }

  bool contains(const Box& b) const {
    return b.empty() || (contains(b.m_lo) && contains(b.m_hi));
  }

  friend bool operator==(const Box& a, const Box& b) {
    return (a.empty() && b.empty()) || (a.m_lo == b.m_lo && a.m_hi == b.m_hi);
  }
  friend bool operator!=(const Box& a, const Box& b) { return !(a == b); }
};

template <int D>
std::ostream& operator<<(std::ostream& os, const Box<D>& b) {
  return os << '[' << b.lo() << ".." << b.hi() << ']';
}

/// Grow by g (may be negative) on all faces of each axis. Empty stays empty.
template <int D>
inline Box<D> grow(const Box<D>& b, const IndexVec<D>& g) {
  if (b.empty()) return b;
  return Box<D>(b.lo() - g, b.hi() + g);
}

template <int D>
inline Box<D> grow(const Box<D>& b, int g) {
  return grow(b, IndexVec<D>::uniform(g));
}

/// Grow a single side of one axis by g cells (outward for g > 0).
template <int D>
inline Box<D> grow_side(const Box<D>& b, int axis, int side, int g) {
  if (b.empty()) return b;
  Box<D> r = b;
  if (side == 0) r.m_lo[axis] -= g;
  else           r.m_hi[axis] += g;
  return r;
}

template <int D>
inline Box<D> shift(const Box<D>& b, const IndexVec<D>& s) {
  if (b.empty()) return b;
  return Box<D>(b.lo() + s, b.hi() + s);
}

template <int D>
inline Box<D> intersect(const Box<D>& a, const Box<D>& b) {
  Box<D> r;
  if (a.empty() || b.empty()) return r;
  for (int d = 0; d < D; ++d) {
    r.m_lo[d] = std::max(a.lo()[d], b.lo()[d]);
    r.m_hi[d] = std::min(a.hi()[d], b.hi()[d]);
  }
  return r;
}

/// Refine by an integer ratio r >= 1: cell i covers fine cells [r*i, r*i+r-1].
template <int D>
inline Box<D> refine(const Box<D>& b, int r) {
  HOMMB_REQUIRE(r >= 1, "refinement ratio");
  if (b.empty()) return b;
  Box<D> out;
  for (int d = 0; d < D; ++d) {
    out.m_lo[d] = b.lo()[d] * r;
    out.m_hi[d] = b.hi()[d] * r + (r - 1);
  }
  return out;
}

namespace detail {
inline int floor_div(int a, int b) {
  int q = a / b;
  return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}
} // namespace detail

/// Coarsen by r: adjoint of refine, coarsen(refine(b, r), r) == b.
template <int D>
inline Box<D> coarsen(const Box<D>& b, int r) {
  HOMMB_REQUIRE(r >= 1, "coarsening ratio");
  if (b.empty()) return b;
  Box<D> out;
  for (int d = 0; d < D; ++d) {
    out.m_lo[d] = detail::floor_div(b.lo()[d], r);
    out.m_hi[d] = detail::floor_div(b.hi()[d], r);
  }
  return out;
}

/// The slab of nGhost cells immediately outside the given face of b.
/// side: 0 = low, 1 = high.
template <int D>
inline Box<D> adjacent_cells(const Box<D>& b, int axis, int side, int nGhost) {
  HOMMB_REQUIRE(!b.empty() && nGhost >= 1, "adjacent_cells on empty box");
  Box<D> r = b;
  if (side == 0) {
    r.m_hi[axis] = b.lo()[axis] - 1;
    r.m_lo[axis] = b.lo()[axis] - nGhost;
  } else {
    r.m_lo[axis] = b.hi()[axis] + 1;
    r.m_hi[axis] = b.hi()[axis] + nGhost;
  }
  return r;
}

/// The layer of valid cells of b hugging the given face, nLayers deep.
template <int D>
inline Box<D> face_layer(const Box<D>& b, int axis, int side, int nLayers) {
  Box<D> r = b;
  if (side == 0) r.m_hi[axis] = std::min(b.hi()[axis], b.lo()[axis] + nLayers - 1);
  else           r.m_lo[axis] = std::max(b.lo()[axis], b.hi()[axis] - nLayers + 1);
  return r;
}

/// Cross-dimensional restriction: fix K axes at given indices, drop them, and
/// return the (D-K)-dimensional box over the remaining axes. Axes must be
/// strictly increasing. The fixed indices must lie inside the box.
template <int D, int K>
inline Box<D - K> slice_box(const Box<D>& b, const std::array<int, K>& axes,
                            const std::array<int, K>& at) {
  static_assert(K >= 1 && K < D, "slice removes at least one axis, not all");
  for (int k = 0; k < K; ++k) {
    HOMMB_REQUIRE(k == 0 || axes[k] > axes[k - 1], "slice axes strictly increasing");
    HOMMB_REQUIRE(at[k] >= b.lo()[axes[k]] && at[k] <= b.hi()[axes[k]],
                  "slice index outside box");
  }
  Box<D - K> out;
  int j = 0, k = 0;
  for (int d = 0; d < D; ++d) {
    if (k < K && axes[static_cast<size_t>(k)] == d) { ++k; continue; }
    out.m_lo[j] = b.lo()[d];
    out.m_hi[j] = b.hi()[d];
    ++j;
  }
  return out;
}

/// Inverse of slice_box on boxes: insert K axes at the given positions with
/// range [at, at] (thickness one).
template <int DLow, int K>
inline Box<DLow + K> embed_box(const Box<DLow>& b, const std::array<int, K>& axes,
                               const std::array<int, K>& at) {
  Box<DLow + K> out;
  int j = 0, k = 0;
  for (int d = 0; d < DLow + K; ++d) {
    if (k < K && axes[static_cast<size_t>(k)] == d) {
      out.m_lo[d] = at[static_cast<size_t>(k)];
      out.m_hi[d] = at[static_cast<size_t>(k)];
      ++k;
    } else {
      out.m_lo[d] = b.lo()[j];
      out.m_hi[d] = b.hi()[j];
      ++j;
    }
  }
  return out;
}

/// Forward iteration over box cells in lexicographic order, axis 0 fastest.
/// Usage: for (BoxIter<D> it(b); it.ok(); ++it) { const IndexVec<D>& iv = *it; }
template <int D>
class BoxIter {
public:
  explicit BoxIter(const Box<D>& b) : m_box(b), m_cur(b.lo()), m_ok(!b.empty()) {}

  bool ok() const { return m_ok; }
  const IndexVec<D>& operator*() const { return m_cur; }

  BoxIter& operator++() {
    for (int d = 0; d < D; ++d) {
      if (++m_cur[d] <= m_box.hi()[d]) return *this;
      m_cur[d] = m_box.lo()[d];
    }
    m_ok = false;
    return *this;
  }

private:
  Box<D> m_box;
  IndexVec<D> m_cur;
  bool m_ok;
};

} // namespace hommb
