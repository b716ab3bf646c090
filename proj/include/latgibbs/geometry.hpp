#pragma once

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace latgibbs {

/// A site of the 2-D integer lattice. Neighbours are the four sites at
/// Euclidean distance 1.
struct Vertex {
  std::int32_t x = 0;
  std::int32_t y = 0;

  friend bool operator==(const Vertex&, const Vertex&) = default;

  /// Canonical row-major order: by y, then x. Every deterministic iteration
  /// in this library follows this order.
  friend std::strong_ordering operator<=>(const Vertex& a, const Vertex& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

/// Finite vertex set, stored sorted in canonical order with no duplicates.
class Region {
 public:
  Region() = default;
  Region(std::initializer_list<Vertex> vs);
  explicit Region(std::vector<Vertex> vs);

  /// Axis-aligned rectangle, inclusive corners.
  static Region rectangle(std::int32_t x0, std::int32_t y0, std::int32_t x1,
                          std::int32_t y1);

  bool contains(const Vertex& v) const;
  bool empty() const { return vs_.empty(); }
  std::size_t size() const { return vs_.size(); }
  const std::vector<Vertex>& vertices() const { return vs_; }
  auto begin() const { return vs_.begin(); }
  auto end() const { return vs_.end(); }

  friend bool operator==(const Region&, const Region&) = default;

 private:
  std::vector<Vertex> vs_;
};

/// Boundary ring of the open 2L-square owned by a mesh vertex: anchor is the
/// square's corner v_c, mesh_l is L, and vertices holds the 8L-4 ring sites in
/// the canonical traversal (bottom edge x-ascending from anchor+(1,0), right
/// edge y-ascending, top edge x-descending, left edge y-descending).
struct Frame {
  Vertex anchor;
  int mesh_l = 0;
  std::vector<Vertex> vertices;
};

/// An L-cell of the mesh: the open L-square at anchor together with its
/// (L-1)^2 interior and its boundary ring, all of which lies on the mesh.
struct Cell {
  Vertex anchor;
  Region interior;
  Region frame;
};

/// True iff v lies on the L-mesh (a coordinate divisible by L).
bool on_mesh(const Vertex& v, int mesh_l);

/// The frame of mesh vertex v: the boundary of the unique open 2L-square
/// whose sides keep distance >= L/2 from v. Rejects off-mesh v.
Frame frame_of(const Vertex& v, int mesh_l);

/// Vertices outside W adjacent to some vertex of W.
Region graph_boundary(const Region& w);

/// Union of the four subsquare boundaries of the 2L-square at anchor.
Region bisected_boundary(const Vertex& anchor, int mesh_l);

/// The L-cell containing off-mesh vertex v. Rejects on-mesh v.
Cell cell_of(const Vertex& v, int mesh_l);

/// Floor division (quotient rounded toward minus infinity).
std::int32_t floor_div(std::int32_t a, std::int32_t b);

/// Boundary ring of the open square of the given side at anchor, in the
/// canonical traversal (bottom edge x-ascending from anchor+(1,0), right edge
/// y-ascending, top edge x-descending, left edge y-descending).
std::vector<Vertex> square_ring(const Vertex& anchor, int side);

/// True iff u lies strictly inside the open square of the given side at
/// anchor, i.e. anchor + (a,b) with 0 < a,b < side.
bool in_open_square(const Vertex& u, const Vertex& anchor, int side);

}  // namespace latgibbs
