#pragma once

#include <algorithm>

#include "hommb/grid_array.hpp"
#include "hommb/multiblock.hpp"

namespace hommb {

template <int D>
struct Patch {
  BlockId m_block = 0;
  Box<D> m_box;
  int m_owner = 0;
};

/// Patches tiling every block of a domain, each with an owner rank. Ranks are
/// simulated in-process; ownership only matters for scheduling and for
/// demonstrating decomposition independence.
template <int D>
class DisjointLayout {
public:
  DisjointLayout() = default;

  DisjointLayout(const MultiBlockDomain<D>& domain, std::vector<Patch<D>> patches)
    : m_domain(domain), m_patches(std::move(patches)) {
    m_byBlock.assign(static_cast<size_t>(domain.nblocks()), {});
    for (int p = 0; p < npatches(); ++p)
      m_byBlock[static_cast<size_t>(m_patches[static_cast<size_t>(p)].m_block)].push_back(p);
    check_tiling();
  }

  const MultiBlockDomain<D>& domain() const { return m_domain; }
  int npatches() const { return static_cast<int>(m_patches.size()); }
  const Patch<D>& patch(int p) const { return m_patches[static_cast<size_t>(p)]; }
  const std::vector<int>& block_patches(BlockId b) const {
    return m_byBlock[static_cast<size_t>(b)];
  }

private:
  void check_tiling() const {
    for (BlockId b = 0; b < m_domain.nblocks(); ++b) {
      std::int64_t cells = 0;
      const std::vector<int>& ps = block_patches(b);
      for (size_t i = 0; i < ps.size(); ++i) {
        const Box<D>& bi = patch(ps[i]).m_box;
        HOMMB_REQUIRE(m_domain.block_box(b).contains(bi), "patch outside block");
        cells += bi.cells();
        for (size_t j = i + 1; j < ps.size(); ++j)
          HOMMB_REQUIRE(intersect(bi, patch(ps[j]).m_box).empty(), "patch overlap");
      }
      HOMMB_REQUIRE(cells == m_domain.block_box(b).cells(), "patches do not tile block");
    }
  }

  MultiBlockDomain<D> m_domain;
  std::vector<Patch<D>> m_patches;
  std::vector<std::vector<int>> m_byBlock;
};

namespace detail {

/// Split [lo, hi] into n near-equal contiguous segments (sizes differ by at
/// most one, longer segments first). Deterministic.
inline std::vector<std::pair<int, int>> split_range(int lo, int hi, int n) {
  const int len = hi - lo + 1;
  std::vector<std::pair<int, int>> segs;
  int start = lo;
  for (int k = 0; k < n; ++k) {
    const int size = len / n + (k < len % n ? 1 : 0);
    segs.emplace_back(start, start + size - 1);
    start += size;
  }
  return segs;
}

} // namespace detail

/// Tile every block into patches no larger than maxPatch per axis and assign
/// owners round-robin in lexicographic patch order (blocks in id order,
/// patches within a block ordered axis 0 fastest).
template <int D>
inline DisjointLayout<D> decompose(const MultiBlockDomain<D>& domain,
                                   const IndexVec<D>& maxPatch, int nRanks) {
  for (int d = 0; d < D; ++d) HOMMB_REQUIRE(maxPatch[d] >= 1, "maxPatch must be >= 1");
  HOMMB_REQUIRE(nRanks >= 1, "need at least one rank");
  std::vector<Patch<D>> patches;
  for (BlockId b = 0; b < domain.nblocks(); ++b) {
    const Box<D>& bb = domain.block_box(b);
    std::array<std::vector<std::pair<int, int>>, D> segs;
    IndexVec<D> nseg;
    for (int d = 0; d < D; ++d) {
      nseg[d] = (bb.extent(d) + maxPatch[d] - 1) / maxPatch[d];
      segs[static_cast<size_t>(d)] = detail::split_range(bb.lo()[d], bb.hi()[d], nseg[d]);
    }
    Box<D> grid(IndexVec<D>::zero(), nseg - IndexVec<D>::uniform(1));
    for (BoxIter<D> it(grid); it.ok(); ++it) {
      Box<D> pb;
      for (int d = 0; d < D; ++d) {
        const std::pair<int, int>& s = segs[static_cast<size_t>(d)][static_cast<size_t>((*it)[d])];
        pb.m_lo[d] = s.first;
        pb.m_hi[d] = s.second;
      }
      patches.push_back(Patch<D>{b, pb, 0});
    }
  }
  for (size_t p = 0; p < patches.size(); ++p)
    patches[p].m_owner = static_cast<int>(p % static_cast<size_t>(nRanks));
  return DisjointLayout<D>(domain, std::move(patches));
}

template <int D>
inline DisjointLayout<D> decompose(const MultiBlockDomain<D>& domain, int maxPatch,
                                   int nRanks) {
  return decompose(domain, IndexVec<D>::uniform(maxPatch), nRanks);
}

/// One GridArray per layout patch, uniform ghost width / centering / ncomp.
template <int D>
class PatchField {
public:
  PatchField() = default;

  PatchField(const DisjointLayout<D>& layout, const IndexVec<D>& ghost,
             Centering centering, int ncomp, double init = 0.0)
    : m_layout(&layout), m_ghost(ghost), m_centering(centering), m_ncomp(ncomp) {
    m_data.reserve(static_cast<size_t>(layout.npatches()));
    for (int p = 0; p < layout.npatches(); ++p)
      m_data.emplace_back(layout.patch(p).m_box, ghost, centering, ncomp, init);
  }

  PatchField(const DisjointLayout<D>& layout, int ghost, Centering centering,
             int ncomp, double init = 0.0)
    : PatchField(layout, IndexVec<D>::uniform(ghost), centering, ncomp, init) {}

  const DisjointLayout<D>& layout() const { return *m_layout; }
  const IndexVec<D>& ghost() const { return m_ghost; }
  Centering centering() const { return m_centering; }
  int ncomp() const { return m_ncomp; }
  int npatches() const { return static_cast<int>(m_data.size()); }

  GridArray<D>& operator[](int p) { return m_data[static_cast<size_t>(p)]; }
  const GridArray<D>& operator[](int p) const { return m_data[static_cast<size_t>(p)]; }

  /// Gather one block's valid data into a single ghost-free array; the
  /// deterministic staging ground for reductions and comparisons.
  GridArray<D> assemble(BlockId b) const {
    const Box<D>& bb = m_layout->domain().block_box(b);
    GridArray<D> out(bb, IndexVec<D>::zero(), m_centering, m_ncomp);
    for (int p : m_layout->block_patches(b)) {
      const GridArray<D>& src = m_data[static_cast<size_t>(p)];
      out.copy_from(src, src.valid_box());
    }
    return out;
  }

  /// Overwrite each patch's valid region from a per-block assembled array.
  void scatter(BlockId b, const GridArray<D>& blockData) {
    for (int p : m_layout->block_patches(b)) {
      GridArray<D>& dst = m_data[static_cast<size_t>(p)];
      dst.copy_from(blockData, dst.valid_box());
    }
  }

private:
  const DisjointLayout<D>* m_layout = nullptr;
  IndexVec<D> m_ghost{};
  Centering m_centering = Centering::cell();
  int m_ncomp = 1;
  std::vector<GridArray<D>> m_data;
};

/// Sum of valid-cell values, accumulated in block id order then lexicographic
/// cell order within each block, so the result is bitwise independent of the
/// decomposition.
template <int D>
inline double reduce_sum(const PatchField<D>& f, int comp = 0) {
  double total = 0.0;
  for (BlockId b = 0; b < f.layout().domain().nblocks(); ++b) {
    const GridArray<D> blockData = f.assemble(b);
    for (BoxIter<D> it(blockData.valid_box()); it.ok(); ++it)
      total += blockData(*it, comp);
  }
  return total;
}

template <int D>
inline double reduce_max_abs(const PatchField<D>& f, int comp = 0) {
  double m = 0.0;
  for (int p = 0; p < f.npatches(); ++p) {
    const GridArray<D>& a = f[p];
    for (BoxIter<D> it(a.valid_box()); it.ok(); ++it)
      m = std::max(m, std::abs(a(*it, comp)));
  }
  return m;
}

} // namespace hommb
