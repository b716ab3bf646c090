#include "latgibbs/geometry.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace latgibbs {

namespace {

std::string vertex_str(const Vertex& v) {
  return "(" + std::to_string(v.x) + "," + std::to_string(v.y) + ")";
}

void sort_unique(std::vector<Vertex>& vs) {
  std::sort(vs.begin(), vs.end());
  vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
}

}  // namespace

Region::Region(std::initializer_list<Vertex> vs) : vs_(vs) { sort_unique(vs_); }

Region::Region(std::vector<Vertex> vs) : vs_(std::move(vs)) { sort_unique(vs_); }

Region Region::rectangle(std::int32_t x0, std::int32_t y0, std::int32_t x1,
                         std::int32_t y1) {
  if (x0 > x1 || y0 > y1) throw std::invalid_argument("empty rectangle");
  std::vector<Vertex> vs;
  vs.reserve(static_cast<std::size_t>(x1 - x0 + 1) *
             static_cast<std::size_t>(y1 - y0 + 1));
  for (std::int32_t y = y0; y <= y1; ++y)
    for (std::int32_t x = x0; x <= x1; ++x) vs.push_back({x, y});
  Region r;
  r.vs_ = std::move(vs);  // already canonical
  return r;
}

bool Region::contains(const Vertex& v) const {
  return std::binary_search(vs_.begin(), vs_.end(), v);
}

std::int32_t floor_div(std::int32_t a, std::int32_t b) {
  std::int32_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

bool in_open_square(const Vertex& u, const Vertex& anchor, int side) {
  std::int64_t a = std::int64_t{u.x} - anchor.x;
  std::int64_t b = std::int64_t{u.y} - anchor.y;
  return a > 0 && a < side && b > 0 && b < side;
}

bool on_mesh(const Vertex& v, int mesh_l) {
  if (mesh_l < 1) throw std::invalid_argument("mesh parameter must be >= 1");
  return v.x % mesh_l == 0 || v.y % mesh_l == 0;
}

namespace {

// The unique multiple m*L of L with m*L + L/2 <= c < m*L + 3L/2,
// i.e. m = floor((2c - L) / (2L)).
std::int32_t frame_anchor_coord(std::int32_t c, int l) {
  return floor_div(2 * c - l, 2 * l) * l;
}

}  // namespace

std::vector<Vertex> square_ring(const Vertex& anchor, int side) {
  std::vector<Vertex> ring;
  ring.reserve(static_cast<std::size_t>(4 * (side - 1)));
  for (int a = 1; a < side; ++a)  // bottom edge
    ring.push_back({anchor.x + a, anchor.y});
  for (int b = 1; b < side; ++b)  // right edge
    ring.push_back({anchor.x + side, anchor.y + b});
  for (int a = side - 1; a >= 1; --a)  // top edge
    ring.push_back({anchor.x + a, anchor.y + side});
  for (int b = side - 1; b >= 1; --b)  // left edge
    ring.push_back({anchor.x, anchor.y + b});
  return ring;
}

Frame frame_of(const Vertex& v, int mesh_l) {
  if (!on_mesh(v, mesh_l))
    throw std::invalid_argument("frame_of: vertex " + vertex_str(v) +
                                " is not on the mesh");
  const int l = mesh_l;
  const Vertex anchor{frame_anchor_coord(v.x, l), frame_anchor_coord(v.y, l)};
  Frame f;
  f.anchor = anchor;
  f.mesh_l = l;
  f.vertices = square_ring(anchor, 2 * l);
  return f;
}

Region graph_boundary(const Region& w) {
  std::vector<Vertex> out;
  out.reserve(w.size() * 4);
  constexpr std::int32_t dx[4] = {1, -1, 0, 0};
  constexpr std::int32_t dy[4] = {0, 0, 1, -1};
  for (const Vertex& u : w) {
    for (int d = 0; d < 4; ++d) {
      Vertex n{u.x + dx[d], u.y + dy[d]};
      if (!w.contains(n)) out.push_back(n);
    }
  }
  return Region(std::move(out));
}

Region bisected_boundary(const Vertex& anchor, int mesh_l) {
  if (mesh_l < 1) throw std::invalid_argument("mesh parameter must be >= 1");
  const int l = mesh_l;
  const Vertex offsets[4] = {{0, 0}, {l, 0}, {0, l}, {l, l}};
  std::vector<Vertex> out;
  for (const Vertex& off : offsets) {
    std::vector<Vertex> sub;
    for (int b = 1; b < l; ++b)
      for (int a = 1; a < l; ++a)
        sub.push_back({anchor.x + off.x + a, anchor.y + off.y + b});
    Region boundary = graph_boundary(Region(std::move(sub)));
    out.insert(out.end(), boundary.begin(), boundary.end());
  }
  return Region(std::move(out));
}

Cell cell_of(const Vertex& v, int mesh_l) {
  if (on_mesh(v, mesh_l))
    throw std::invalid_argument("cell_of: vertex " + vertex_str(v) +
                                " lies on the mesh");
  const int l = mesh_l;
  const Vertex anchor{floor_div(v.x, l) * l, floor_div(v.y, l) * l};
  std::vector<Vertex> interior;
  interior.reserve(static_cast<std::size_t>(l - 1) * (l - 1));
  for (int b = 1; b < l; ++b)
    for (int a = 1; a < l; ++a) interior.push_back({anchor.x + a, anchor.y + b});
  Cell c;
  c.anchor = anchor;
  c.interior = Region(std::move(interior));
  c.frame = graph_boundary(c.interior);
  return c;
}

}  // namespace latgibbs
