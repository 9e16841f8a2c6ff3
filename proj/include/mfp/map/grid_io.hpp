#pragma once

#include "mfp/map/sliding_grid.hpp"

#include <iosfwd>
#include <string>

namespace mfp::map {

/// Flat binary snapshot layout (little endian):
///   char[4] "MFPG", u32 version(=1),
///   f64 center[3], i32 dims[3], f64 voxel_size, u64 stamp,
///   u8 cells[dims.x*dims.y*dims.z]  (x fastest; 0=Unknown 1=Free 2=Occupied)
void write_grid(std::ostream& os, const SlidingGrid& grid);
SlidingGrid read_grid(std::istream& is);

void save_grid(const std::string& path, const SlidingGrid& grid);
SlidingGrid load_grid(const std::string& path);

}  // namespace mfp::map
