#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hommb/box.hpp"

namespace hommb {

/// Data centering. Cell-centered values live on box cells; Face(axis) values
/// live on the faces normal to `axis`, where face index i is the low face of
/// cell i (so a box [lo, hi] carries faces lo .. hi+1 along that axis).
struct Centering {
  enum Kind : int { Cell = -1 };
  int m_faceAxis = Cell;

  static Centering cell() { return Centering{Cell}; }
  static Centering face(int axis) { return Centering{axis}; }

  bool is_cell() const { return m_faceAxis == Cell; }
  bool is_face() const { return m_faceAxis >= 0; }
  int face_axis() const { return m_faceAxis; }

  friend bool operator==(const Centering& a, const Centering& b) {
    return a.m_faceAxis == b.m_faceAxis;
  }
  friend bool operator!=(const Centering& a, const Centering& b) { return !(a == b); }
};

/// The index box of entities of the given centering attached to cell box b:
/// identical for cell centering, one longer along the face axis for faces.
template <int D>
inline Box<D> centered_box(const Box<D>& b, const Centering& c) {
  if (c.is_cell() || b.empty()) return b;
  Box<D> r = b;
  r.m_hi[c.face_axis()] += 1;
  return r;
}

/// Dense multi-component array over a box plus ghost padding.
///
/// Storage covers centered_box(grow(box, ghost), centering). Within that
/// region indices are laid out lexicographically with axis 0 fastest;
/// components are stored as separate contiguous planes (component-major).
/// Reads and writes outside the stored region throw std::out_of_range.
///
/// Ghost contents are the caller's contract: operators that consume ghosts
/// document the width they require and assume the caller has filled them.
template <int D>
class GridArray {
public:
  GridArray() = default;

  GridArray(const Box<D>& box, const IndexVec<D>& ghost, Centering centering,
            int ncomp, double init = 0.0)
    : m_box(box), m_ghost(ghost), m_centering(centering), m_ncomp(ncomp) {
    HOMMB_REQUIRE(!box.empty(), "GridArray over empty box");
    HOMMB_REQUIRE(ncomp >= 1, "GridArray needs at least one component");
    for (int d = 0; d < D; ++d) HOMMB_REQUIRE(ghost[d] >= 0, "negative ghost width");
    m_storage = centered_box(grow(box, ghost), centering);
    std::int64_t n = m_storage.cells();
    m_planeSize = n;
    m_data.assign(static_cast<size_t>(n * ncomp), init);
    m_stride[0] = 1;
    for (int d = 1; d < D; ++d)
      m_stride[d] = m_stride[d - 1] * m_storage.extent(d - 1);
  }

  GridArray(const Box<D>& box, int ghost, Centering centering, int ncomp,
            double init = 0.0)
    : GridArray(box, IndexVec<D>::uniform(ghost), centering, ncomp, init) {}

  const Box<D>& box() const { return m_box; }
  const IndexVec<D>& ghost() const { return m_ghost; }
  Centering centering() const { return m_centering; }
  int ncomp() const { return m_ncomp; }

  /// Full stored index region (valid + ghosts, centering applied).
  const Box<D>& storage_box() const { return m_storage; }

  /// Valid region with centering applied (no ghosts).
  Box<D> valid_box() const { return centered_box(m_box, m_centering); }

  bool defined() const { return !m_data.empty(); }

  double operator()(const IndexVec<D>& iv, int comp = 0) const {
    return m_data[checked_offset(iv, comp)];
  }
  double& operator()(const IndexVec<D>& iv, int comp = 0) {
    return m_data[checked_offset(iv, comp)];
  }

  void fill(double a) { m_data.assign(m_data.size(), a); }

  /// Copy values over region (which must be stored in both arrays).
  void copy_from(const GridArray& src, const Box<D>& region) {
    HOMMB_REQUIRE(src.m_ncomp == m_ncomp, "component count mismatch in copy");
    for (int c = 0; c < m_ncomp; ++c)
      for (BoxIter<D> it(region); it.ok(); ++it)
        (*this)(*it, c) = src(*it, c);
  }

  // Raw access for inner loops: offset arithmetic is the caller's
  // responsibility, bounds are checked only at the anchor.
  std::int64_t offset(const IndexVec<D>& iv, int comp = 0) const {
    return static_cast<std::int64_t>(checked_offset(iv, comp));
  }
  std::int64_t stride(int d) const { return m_stride[d]; }
  double* data() { return m_data.data(); }
  const double* data() const { return m_data.data(); }

private:
  size_t checked_offset(const IndexVec<D>& iv, int comp) const {
    std::int64_t off = 0;
    for (int d = 0; d < D; ++d) {
      if (iv[d] < m_storage.lo()[d] || iv[d] > m_storage.hi()[d])
        throw std::out_of_range("GridArray access outside stored region at axis " +
                                std::to_string(d) + ", index " + std::to_string(iv[d]));
      off += (iv[d] - m_storage.lo()[d]) * m_stride[d];
    }
    if (comp < 0 || comp >= m_ncomp)
      throw std::out_of_range("GridArray component out of range");
    return static_cast<size_t>(off + comp * m_planeSize);
  }

  Box<D> m_box;
  IndexVec<D> m_ghost{};
  Centering m_centering = Centering::cell();
  int m_ncomp = 0;
  Box<D> m_storage;
  std::int64_t m_planeSize = 0;
  std::array<std::int64_t, D> m_stride{};
  std::vector<double> m_data;
};

} // namespace hommb
