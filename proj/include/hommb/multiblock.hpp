#pragma once

#include <vector>

#include "hommb/transform.hpp"

namespace hommb {

/// Dense block identifier, 0 .. nblocks-1.
using BlockId = int;

enum class FaceKind {
  PhysicalBoundary, // domain boundary, ghosts come from extrapolation
  Block,            // another block face (or this block again: periodic wrap)
  BlockMulti        // seam shared with several blocks; donors are located
                    // geometrically, no single partner record applies
};

/// One directed record per block face. For kind Block, m_toOther maps this
/// block's cell indices into the neighbor's index space near the shared face.
/// m_conforming marks seams whose ghost cells land exactly on neighbor cells
/// (periodic wraps and index-translated abutments); curved seams leave it
/// false and are filled by least-squares interpolation instead of copy.
template <int D>
struct FaceConnection {
  FaceKind m_kind = FaceKind::PhysicalBoundary;
  BlockId m_other = -1;
  int m_otherAxis = -1;
  int m_otherSide = -1;
  IndexTransform<D> m_toOther;
  bool m_conforming = false;
};

template <int D>
struct BlockSpec {
  Box<D> m_box;
};

/// Blocks plus face connectivity. Block index spaces are unrelated to each
/// other; adjacency exists only through connection records.
template <int D>
class MultiBlockDomain {
public:
  MultiBlockDomain() = default;

  BlockId add_block(const Box<D>& b) {
    HOMMB_REQUIRE(!b.empty(), "empty block box");
    m_blocks.push_back(BlockSpec<D>{b});
    m_faces.emplace_back();
    return static_cast<BlockId>(m_blocks.size() - 1);
  }

  int nblocks() const { return static_cast<int>(m_blocks.size()); }
  const Box<D>& block_box(BlockId b) const { return m_blocks[static_cast<size_t>(b)].m_box; }

  FaceConnection<D>& face(BlockId b, int axis, int side) {
    return m_faces[static_cast<size_t>(b)][static_cast<size_t>(axis)][static_cast<size_t>(side)];
  }
  const FaceConnection<D>& face(BlockId b, int axis, int side) const {
    return m_faces[static_cast<size_t>(b)][static_cast<size_t>(axis)][static_cast<size_t>(side)];
  }

  /// Record a two-sided connection: block a's (axisA, sideA) face meets block
  /// b's (axisB, sideB) face; toOther maps a's indices into b's space.
  void connect(BlockId a, int axisA, int sideA, BlockId b, int axisB, int sideB,
               const IndexTransform<D>& toOther, bool conforming) {
    face(a, axisA, sideA) = FaceConnection<D>{FaceKind::Block, b, axisB, sideB,
                                              toOther, conforming};
    face(b, axisB, sideB) = FaceConnection<D>{FaceKind::Block, a, axisA, sideA,
                                              toOther.inverse(), conforming};
  }

  /// Make axis periodic within a single block (wrap low face to high face).
  void set_periodic(BlockId b, int axis) {
    const int n = block_box(b).extent(axis);
    face(b, axis, 0) = FaceConnection<D>{FaceKind::Block, b, axis, 1,
                                         IndexTransform<D>::translation(n * IndexVec<D>::unit(axis)),
                                         true};
    face(b, axis, 1) = FaceConnection<D>{FaceKind::Block, b, axis, 0,
                                         IndexTransform<D>::translation(-n * IndexVec<D>::unit(axis)),
                                         true};
  }

  bool is_periodic_self(BlockId b, int axis, int side) const {
    const FaceConnection<D>& c = face(b, axis, side);
    return c.m_kind == FaceKind::Block && c.m_other == b && c.m_otherAxis == axis &&
           c.m_otherSide == 1 - side;
  }

  /// Structural consistency: mutual records, inverse transforms, and index
  /// images of face slabs landing against the partner's matching face.
  void validate() const {
    for (BlockId b = 0; b < nblocks(); ++b) {
      for (int axis = 0; axis < D; ++axis) {
        for (int side = 0; side < 2; ++side) {
          const FaceConnection<D>& c = face(b, axis, side);
          if (c.m_kind == FaceKind::PhysicalBoundary) continue;
          if (c.m_kind == FaceKind::BlockMulti) continue; // no partner record
          HOMMB_REQUIRE(c.m_other >= 0 && c.m_other < nblocks(), "connection target");
          const FaceConnection<D>& back = face(c.m_other, c.m_otherAxis, c.m_otherSide);
          HOMMB_REQUIRE(back.m_kind == FaceKind::Block && back.m_other == b &&
                        back.m_otherAxis == axis && back.m_otherSide == side,
                        "connection not mutual");
          HOMMB_REQUIRE(back.m_conforming == c.m_conforming, "conforming flag asymmetric");
          HOMMB_REQUIRE(compose(back.m_toOther, c.m_toOther).is_identity(),
                        "connection transforms are not mutual inverses");
          // the transform must carry this face's outward ghost slab toward
          // the partner's matching face from inside
          const Box<D> slab = adjacent_cells(block_box(b), axis, side, 1);
          const Box<D> image = c.m_toOther.apply_box(slab);
          const Box<D> expect = face_layer(block_box(c.m_other), c.m_otherAxis,
                                           c.m_otherSide, 1);
          HOMMB_REQUIRE(c.m_toOther.image_axis(axis) == c.m_otherAxis,
                        "connection axis mismatch");
          if (c.m_conforming)
            HOMMB_REQUIRE(image == expect, "conforming connection face image mismatch");
        }
      }
    }
  }

private:
  std::vector<BlockSpec<D>> m_blocks;
  std::vector<std::array<std::array<FaceConnection<D>, 2>, D>> m_faces;
};

} // namespace hommb
