#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "hommb/box.hpp"
#include "hommb/grid_array.hpp"

using namespace hommb;

TEST_CASE("IndexVec arithmetic and ordering") {
  IndexVec<3> a{1, -2, 3}, b{4, 0, -1};
  CHECK((a + b) == IndexVec<3>{5, -2, 2});
  CHECK((a - b) == IndexVec<3>{-3, -2, 4});
  CHECK((2 * a) == IndexVec<3>{2, -4, 6});
  CHECK((-a) == IndexVec<3>{-1, 2, -3});
  CHECK(IndexVec<3>::unit(1) == IndexVec<3>{0, 1, 0});
  CHECK(IndexVec<2>::uniform(7) == IndexVec<2>{7, 7});
  CHECK(a < b);
  CHECK_FALSE(b < a);
}

TEST_CASE("Box basics: emptiness, extent, containment") {
  Box<2> b(IndexVec<2>{0, -3}, IndexVec<2>{4, 2});
  CHECK_FALSE(b.empty());
  CHECK(b.extent(0) == 5);
  CHECK(b.extent(1) == 6);
  CHECK(b.cells() == 30);
  CHECK(b.contains(IndexVec<2>{0, -3}));
  CHECK(b.contains(IndexVec<2>{4, 2}));
  CHECK_FALSE(b.contains(IndexVec<2>{5, 0}));

  Box<2> e; // default is empty
  CHECK(e.empty());
  CHECK(e.cells() == 0);
  CHECK(b.contains(e));
  CHECK(grow(e, 3).empty());
}

TEST_CASE("Box grow, shift, intersect") {
  Box<2> b(IndexVec<2>{2, 2}, IndexVec<2>{5, 7});
  Box<2> g = grow(b, 2);
  CHECK(g == Box<2>(IndexVec<2>{0, 0}, IndexVec<2>{7, 9}));
  CHECK(grow(g, -2) == b);
  CHECK(grow_side(b, 1, 0, 3) == Box<2>(IndexVec<2>{2, -1}, IndexVec<2>{5, 7}));
  CHECK(grow_side(b, 0, 1, 1) == Box<2>(IndexVec<2>{2, 2}, IndexVec<2>{6, 7}));
  CHECK(shift(b, IndexVec<2>{-2, 1}) == Box<2>(IndexVec<2>{0, 3}, IndexVec<2>{3, 8}));

  Box<2> c(IndexVec<2>{4, 0}, IndexVec<2>{9, 4});
  CHECK(intersect(b, c) == Box<2>(IndexVec<2>{4, 2}, IndexVec<2>{5, 4}));
  CHECK(intersect(b, shift(b, IndexVec<2>{10, 0})).empty());
}

TEST_CASE("refine and coarsen are adjoint") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> lo(-12, 12), len(0, 9), ratio(1, 5);
  for (int trial = 0; trial < 200; ++trial) {
    Box<3> b;
    for (int d = 0; d < 3; ++d) {
      b.m_lo[d] = lo(rng);
      b.m_hi[d] = b.m_lo[d] + len(rng);
    }
    const int r = ratio(rng);
    Box<3> f = refine(b, r);
    CHECK(f.cells() == b.cells() * r * r * r);
    CHECK(coarsen(f, r) == b);
    // every fine cell of refine(b) coarsens into b
    CHECK(b.contains(coarsen(Box<3>(f.lo(), f.lo()), r)));
    CHECK(b.contains(coarsen(Box<3>(f.hi(), f.hi()), r)));
  }
}

TEST_CASE("adjacent_cells and face_layer") {
  Box<2> b(IndexVec<2>{0, 0}, IndexVec<2>{7, 5});
  CHECK(adjacent_cells(b, 0, 0, 2) == Box<2>(IndexVec<2>{-2, 0}, IndexVec<2>{-1, 5}));
  CHECK(adjacent_cells(b, 1, 1, 3) == Box<2>(IndexVec<2>{0, 6}, IndexVec<2>{7, 8}));
  CHECK(intersect(adjacent_cells(b, 0, 0, 4), b).empty());
  CHECK(face_layer(b, 0, 1, 2) == Box<2>(IndexVec<2>{6, 0}, IndexVec<2>{7, 5}));
  CHECK(face_layer(b, 1, 0, 1) == Box<2>(IndexVec<2>{0, 0}, IndexVec<2>{7, 0}));
}

TEST_CASE("BoxIter visits every cell once, axis 0 fastest") {
  Box<3> b(IndexVec<3>{-1, 0, 2}, IndexVec<3>{1, 2, 3});
  std::set<IndexVec<3>> seen;
  IndexVec<3> prev;
  bool first = true;
  for (BoxIter<3> it(b); it.ok(); ++it) {
    CHECK(b.contains(*it));
    CHECK(seen.insert(*it).second);
    if (first) {
      CHECK(*it == b.lo());
      first = false;
    } else {
      // lexicographic with axis 0 fastest means (z,y,x) tuple increases
      IndexVec<3> p{prev[2], prev[1], prev[0]}, c{(*it)[2], (*it)[1], (*it)[0]};
      CHECK(p < c);
    }
    prev = *it;
  }
  CHECK(static_cast<std::int64_t>(seen.size()) == b.cells());
  CHECK(prev == b.hi());

  Box<3> e;
  CHECK_FALSE(BoxIter<3>(e).ok());
}

TEST_CASE("slice_box and embed_box round trip") {
  Box<4> b(IndexVec<4>{0, 1, 2, 3}, IndexVec<4>{5, 6, 7, 8});
  std::array<int, 2> axes{1, 3};
  std::array<int, 2> at{4, 6};
  Box<2> s = slice_box<4, 2>(b, axes, at);
  CHECK(s == Box<2>(IndexVec<2>{0, 2}, IndexVec<2>{5, 7}));
  Box<4> e = embed_box<2, 2>(s, axes, at);
  CHECK(e == Box<4>(IndexVec<4>{0, 4, 2, 6}, IndexVec<4>{5, 4, 7, 6}));
  CHECK(b.contains(e));
  CHECK_THROWS(slice_box<4, 1>(b, std::array<int, 1>{1}, std::array<int, 1>{0}));
}

TEST_CASE("centered_box adds one face along the face axis") {
  Box<2> b(IndexVec<2>{0, 0}, IndexVec<2>{7, 5});
  CHECK(centered_box(b, Centering::cell()) == b);
  CHECK(centered_box(b, Centering::face(0)) ==
        Box<2>(IndexVec<2>{0, 0}, IndexVec<2>{8, 5}));
  CHECK(centered_box(b, Centering::face(1)) ==
        Box<2>(IndexVec<2>{0, 0}, IndexVec<2>{7, 6}));
}

TEST_CASE("GridArray storage layout and bounds checking") {
  Box<2> b(IndexVec<2>{2, 3}, IndexVec<2>{9, 8});
  GridArray<2> a(b, 2, Centering::cell(), 3, 0.5);
  CHECK(a.storage_box() == grow(b, 2));
  CHECK(a.valid_box() == b);
  CHECK(a(IndexVec<2>{0, 1}, 2) == 0.5);

  // component planes are distinct
  a(IndexVec<2>{4, 4}, 0) = 1.0;
  a(IndexVec<2>{4, 4}, 1) = 2.0;
  CHECK(a(IndexVec<2>{4, 4}, 0) == 1.0);
  CHECK(a(IndexVec<2>{4, 4}, 1) == 2.0);
  CHECK(a(IndexVec<2>{4, 4}, 2) == 0.5);

  // axis 0 is unit stride within a component plane
  CHECK(a.stride(0) == 1);
  CHECK(a.stride(1) == a.storage_box().extent(0));
  const double* p = a.data() + a.offset(IndexVec<2>{4, 4}, 1);
  CHECK(p[1] == a(IndexVec<2>{5, 4}, 1));
  CHECK(p[a.stride(1)] == a(IndexVec<2>{4, 5}, 1));

  CHECK_THROWS_AS(a(IndexVec<2>{-1, 3}, 0), std::out_of_range);
  CHECK_THROWS_AS(a(IndexVec<2>{4, 11}, 0), std::out_of_range);
  CHECK_THROWS_AS(a(IndexVec<2>{4, 4}, 3), std::out_of_range);

  GridArray<2> f(b, 0, Centering::face(1), 1);
  CHECK(f.storage_box() == Box<2>(IndexVec<2>{2, 3}, IndexVec<2>{9, 9}));
  f(IndexVec<2>{9, 9}) = 7.0; // the extra high face is stored
  CHECK(f(IndexVec<2>{9, 9}) == 7.0);
  CHECK_THROWS_AS(f(IndexVec<2>{10, 9}), std::out_of_range);
}

TEST_CASE("GridArray copy_from copies only the requested region") {
  Box<2> b(IndexVec<2>{0, 0}, IndexVec<2>{5, 5});
  GridArray<2> src(b, 1, Centering::cell(), 2, 1.0);
  GridArray<2> dst(b, 1, Centering::cell(), 2, -1.0);
  Box<2> mid(IndexVec<2>{2, 2}, IndexVec<2>{3, 3});
  dst.copy_from(src, mid);
  CHECK(dst(IndexVec<2>{2, 3}, 1) == 1.0);
  CHECK(dst(IndexVec<2>{1, 3}, 1) == -1.0);
  CHECK(dst(IndexVec<2>{4, 2}, 0) == -1.0);
}
