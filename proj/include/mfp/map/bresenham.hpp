#pragma once

#include "mfp/types.hpp"

#include <algorithm>
#include <cstdlib>
#include <tuple>
#include <vector>

namespace mfp::map {

/// Visits the voxels of the 3D Bresenham line a -> b in order, both ends
/// included. Each step moves the driving (dominant) axis by one and the other
/// axes by at most one.
template <typename Visitor>
void bresenham3d_visit(const Index3& a, const Index3& b, Visitor&& visit) {
  const int dx = std::abs(b.x - a.x);
  const int dy = std::abs(b.y - a.y);
  const int dz = std::abs(b.z - a.z);
  const int sx = b.x > a.x ? 1 : -1;
  const int sy = b.y > a.y ? 1 : -1;
  const int sz = b.z > a.z ? 1 : -1;

  Index3 p = a;
  visit(p);
  if (dx >= dy && dx >= dz) {
    int e1 = 2 * dy - dx;
    int e2 = 2 * dz - dx;
    for (int i = 0; i < dx; ++i) {
      if (e1 > 0) {
        p.y += sy;
        e1 -= 2 * dx;
      }
      if (e2 > 0) {
        p.z += sz;
        e2 -= 2 * dx;
      }
      e1 += 2 * dy;
      e2 += 2 * dz;
      p.x += sx;
      visit(p);
    }
  } else if (dy >= dx && dy >= dz) {
    int e1 = 2 * dx - dy;
    int e2 = 2 * dz - dy;
    for (int i = 0; i < dy; ++i) {
      if (e1 > 0) {
        p.x += sx;
        e1 -= 2 * dy;
      }
      if (e2 > 0) {
        p.z += sz;
        e2 -= 2 * dy;
      }
      e1 += 2 * dx;
      e2 += 2 * dz;
      p.y += sy;
      visit(p);
    }
  } else {
    int e1 = 2 * dy - dz;
    int e2 = 2 * dx - dz;
    for (int i = 0; i < dz; ++i) {
      if (e1 > 0) {
        p.y += sy;
        e1 -= 2 * dz;
      }
      if (e2 > 0) {
        p.x += sx;
        e2 -= 2 * dz;
      }
      e1 += 2 * dy;
      e2 += 2 * dx;
      p.z += sz;
      visit(p);
    }
  }
}

/// Ordered voxel list from a to b. The line is always rasterized from the
/// lexicographically smaller endpoint so that a->b and b->a cover the same
/// voxel set (Bresenham tie-breaking is direction dependent otherwise).
inline std::vector<Index3> bresenham3d(const Index3& a, const Index3& b) {
  const bool flip = std::tie(b.x, b.y, b.z) < std::tie(a.x, a.y, a.z);
  std::vector<Index3> out;
  bresenham3d_visit(flip ? b : a, flip ? a : b,
                    [&](const Index3& p) { out.push_back(p); });
  if (flip) std::reverse(out.begin(), out.end());
  return out;
}

}  // namespace mfp::map
