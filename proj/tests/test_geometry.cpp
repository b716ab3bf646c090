#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "latgibbs/geometry.hpp"

using namespace latgibbs;

TEST_CASE("on_mesh membership") {
  CHECK(on_mesh({8, 3}, 4));
  CHECK_FALSE(on_mesh({3, 5}, 4));
  CHECK(on_mesh({0, 0}, 1));
  CHECK(on_mesh({-4, 7}, 4));
  CHECK(on_mesh({7, -8}, 4));
  CHECK_FALSE(on_mesh({-3, -5}, 4));
  CHECK_THROWS_AS(on_mesh({0, 0}, 0), std::invalid_argument);
}

TEST_CASE("frame_of anchors and cardinality") {
  Frame f = frame_of({4, 0}, 4);
  CHECK(f.anchor == Vertex{0, -4});
  CHECK(f.vertices.size() == 28);
  CHECK(frame_of({0, 0}, 4).anchor == Vertex{-4, -4});
  CHECK(frame_of({6, 8}, 4).anchor == Vertex{4, 4});
  CHECK_THROWS_AS(frame_of({3, 5}, 4), std::invalid_argument);
}

TEST_CASE("frame traversal starts at anchor+(1,0)") {
  Frame f = frame_of({0, 0}, 2);
  REQUIRE(!f.vertices.empty());
  CHECK(f.vertices.front() == Vertex{f.anchor.x + 1, f.anchor.y});
  std::set<Vertex> uniq(f.vertices.begin(), f.vertices.end());
  CHECK(uniq.size() == f.vertices.size());
}

TEST_CASE("frame properties over mesh parameters and residues") {
  for (int l = 2; l <= 8; ++l) {
    for (int rx = -l; rx <= l; ++rx) {
      for (int ry = -l; ry <= l; ++ry) {
        Vertex v{rx, ry};
        if (!on_mesh(v, l)) continue;
        Frame f = frame_of(v, l);
        CHECK(f.vertices.size() == static_cast<std::size_t>(8 * l - 4));
        int min_cheb = 1 << 20;
        for (const Vertex& w : f.vertices) {
          CHECK(on_mesh(w, l));
          min_cheb = std::min(min_cheb,
                              std::max(std::abs(w.x - v.x), std::abs(w.y - v.y)));
        }
        CHECK(min_cheb >= (l + 1) / 2);
        // The frame is exactly the graph boundary of the open square.
        std::vector<Vertex> open_sq;
        for (int b = 1; b < 2 * l; ++b)
          for (int a = 1; a < 2 * l; ++a)
            open_sq.push_back({f.anchor.x + a, f.anchor.y + b});
        Region ring = graph_boundary(Region(open_sq));
        std::vector<Vertex> sorted = f.vertices;
        std::sort(sorted.begin(), sorted.end());
        CHECK(std::equal(sorted.begin(), sorted.end(), ring.begin(), ring.end()));
        // v itself lies strictly inside the open square.
        CHECK(in_open_square(v, f.anchor, 2 * l));
      }
    }
  }
}

TEST_CASE("graph_boundary basics") {
  Region single{Vertex{0, 0}};
  Region b = graph_boundary(single);
  CHECK(b == Region{Vertex{1, 0}, Vertex{-1, 0}, Vertex{0, 1}, Vertex{0, -1}});
  CHECK(graph_boundary(Region{}) == Region{});

  Region open3 = Region::rectangle(1, 1, 3, 3);
  Region ring = graph_boundary(open3);
  CHECK(ring.size() == 12);
  for (Vertex corner : {Vertex{0, 0}, Vertex{0, 4}, Vertex{4, 0}, Vertex{4, 4}})
    CHECK_FALSE(ring.contains(corner));
  for (const Vertex& v : ring) {
    CHECK_FALSE(open3.contains(v));
    bool adjacent = open3.contains({v.x + 1, v.y}) ||
                    open3.contains({v.x - 1, v.y}) ||
                    open3.contains({v.x, v.y + 1}) ||
                    open3.contains({v.x, v.y - 1});
    CHECK(adjacent);
  }
}

TEST_CASE("bisected_boundary at L=2") {
  Region bb = bisected_boundary({0, 0}, 2);
  CHECK(bb.contains({2, 1}));
  CHECK_FALSE(bb.contains({2, 2}));
  CHECK(bb.contains({0, 1}));
}

TEST_CASE("bisected boundary covers the square boundary up to edge midpoints") {
  for (int l : {2, 3, 4}) {
    Vertex anchor{0, 0};
    Region open_sq = Region::rectangle(1, 1, 2 * l - 1, 2 * l - 1);
    Region ds = graph_boundary(open_sq);
    Region bb = bisected_boundary(anchor, l);
    // Outer corners of the four subsquares that land on the boundary.
    std::set<Vertex> midpoints{{l, 0}, {l, 2 * l}, {0, l}, {2 * l, l}};
    for (const Vertex& v : ds)
      CHECK((bb.contains(v) || midpoints.count(v) == 1));
  }
}

TEST_CASE("cell_of identifies the enclosing cell") {
  Cell c = cell_of({1, 1}, 4);
  CHECK(c.anchor == Vertex{0, 0});
  CHECK(c.interior == Region::rectangle(1, 1, 3, 3));
  CHECK(cell_of({5, 7}, 4).anchor == Vertex{4, 4});

  Cell small = cell_of({1, 1}, 2);
  CHECK(small.interior == Region{Vertex{1, 1}});
  CHECK(small.frame ==
        Region{Vertex{0, 1}, Vertex{2, 1}, Vertex{1, 0}, Vertex{1, 2}});
  CHECK_THROWS_AS(cell_of({4, 1}, 4), std::invalid_argument);
}

TEST_CASE("cells partition the off-mesh sites of a window") {
  for (int l : {2, 3}) {
    std::set<Vertex> covered;
    std::set<Vertex> interiors_seen;
    for (int x = -2 * l; x <= 2 * l; ++x) {
      for (int y = -2 * l; y <= 2 * l; ++y) {
        Vertex v{x, y};
        if (on_mesh(v, l)) {
          covered.insert(v);
          continue;
        }
        Cell c = cell_of(v, l);
        CHECK(c.interior.contains(v));
        for (const Vertex& u : c.interior) {
          CHECK_FALSE(on_mesh(u, l));
          covered.insert(u);
        }
        for (const Vertex& w : c.frame) CHECK(on_mesh(w, l));
      }
    }
    for (int x = -2 * l; x <= 2 * l; ++x)
      for (int y = -2 * l; y <= 2 * l; ++y)
        CHECK(covered.count({x, y}) == 1);
    (void)interiors_seen;
  }
}

TEST_CASE("floor_div rounds toward minus infinity") {
  CHECK(floor_div(7, 4) == 1);
  CHECK(floor_div(-1, 4) == -1);
  CHECK(floor_div(-4, 4) == -1);
  CHECK(floor_div(-5, 4) == -2);
  CHECK(floor_div(0, 4) == 0);
}
