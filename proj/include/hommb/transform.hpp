#pragma once

#include "hommb/box.hpp"

namespace hommb {

/// Affine index-space transform between block coordinate systems:
///   out[d] = sign[d] * in[perm[d]] + offset[d]
/// acting on cell indices. Node indices transform with an extra +1 on
/// sign-flipped axes because node n is the low corner of cell n.
template <int D>
struct IndexTransform {
  std::array<int, D> m_perm{};
  std::array<int, D> m_sign{};
  IndexVec<D> m_offset{};

  IndexTransform() {
    for (int d = 0; d < D; ++d) {
      m_perm[static_cast<size_t>(d)] = d;
      m_sign[static_cast<size_t>(d)] = 1;
    }
  }

  static IndexTransform identity() { return IndexTransform(); }

  static IndexTransform translation(const IndexVec<D>& s) {
    IndexTransform t;
    t.m_offset = s;
    return t;
  }

  int perm(int d) const { return m_perm[static_cast<size_t>(d)]; }
  int sign(int d) const { return m_sign[static_cast<size_t>(d)]; }

  bool is_identity() const {
    for (int d = 0; d < D; ++d)
      if (perm(d) != d || sign(d) != 1 || m_offset[d] != 0) return false;
    return true;
  }

  IndexVec<D> apply_cell(const IndexVec<D>& iv) const {
    IndexVec<D> out;
    for (int d = 0; d < D; ++d) out[d] = sign(d) * iv[perm(d)] + m_offset[d];
    return out;
  }

  IndexVec<D> apply_node(const IndexVec<D>& iv) const {
    IndexVec<D> out;
    for (int d = 0; d < D; ++d)
      out[d] = sign(d) * iv[perm(d)] + m_offset[d] + (sign(d) < 0 ? 1 : 0);
    return out;
  }

  /// Image of a cell box (corners transformed, bounds renormalized).
  Box<D> apply_box(const Box<D>& b) const {
    if (b.empty()) return b;
    const IndexVec<D> a = apply_cell(b.lo());
    const IndexVec<D> c = apply_cell(b.hi());
    Box<D> out;
    for (int d = 0; d < D; ++d) {
      out.m_lo[d] = std::min(a[d], c[d]);
      out.m_hi[d] = std::max(a[d], c[d]);
    }
    return out;
  }

  /// Output axis that input axis a maps to.
  int image_axis(int a) const {
    for (int d = 0; d < D; ++d)
      if (perm(d) == a) return d;
    HOMMB_REQUIRE(false, "transform permutation is not a permutation");
    return -1;
  }

  IndexTransform inverse() const {
    IndexTransform inv;
    for (int a = 0; a < D; ++a) {
      const int d = image_axis(a);
      inv.m_perm[static_cast<size_t>(a)] = d;
      inv.m_sign[static_cast<size_t>(a)] = sign(d);
      inv.m_offset[a] = -sign(d) * m_offset[d];
    }
    return inv;
  }

  friend bool operator==(const IndexTransform& a, const IndexTransform& b) {
    return a.m_perm == b.m_perm && a.m_sign == b.m_sign && a.m_offset == b.m_offset;
  }
};

/// compose(a, b) applies b first, then a.
template <int D>
inline IndexTransform<D> compose(const IndexTransform<D>& a, const IndexTransform<D>& b) {
  IndexTransform<D> c;
  for (int d = 0; d < D; ++d) {
    const int pa = a.perm(d);
    c.m_perm[static_cast<size_t>(d)] = b.perm(pa);
    c.m_sign[static_cast<size_t>(d)] = a.sign(d) * b.sign(pa);
    c.m_offset[d] = a.sign(d) * b.m_offset[pa] + a.m_offset[d];
  }
  return c;
}

} // namespace hommb
