#include "mfp/map/grid_io.hpp"

#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace mfp::map {

namespace {

constexpr char kMagic[4] = {'M', 'F', 'P', 'G'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("truncated grid snapshot");
  return v;
}

}  // namespace

void write_grid(std::ostream& os, const SlidingGrid& grid) {
  os.write(kMagic, 4);
  put(os, kVersion);
  const Vec3 c = grid.center();
  for (int a = 0; a < 3; ++a) put(os, c[a]);
  for (int a = 0; a < 3; ++a) put(os, static_cast<std::int32_t>(grid.dims()[a]));
  put(os, grid.voxel_size());
  put(os, static_cast<std::uint64_t>(grid.stamp()));
  os.write(reinterpret_cast<const char*>(grid.cells().data()),
           static_cast<std::streamsize>(grid.cells().size()));
}

SlidingGrid read_grid(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("not a grid snapshot (bad magic)");
  }
  if (get<std::uint32_t>(is) != kVersion) {
    throw std::runtime_error("unsupported grid snapshot version");
  }
  Vec3 c;
  for (int a = 0; a < 3; ++a) c[a] = get<double>(is);
  Index3 dims;
  for (int a = 0; a < 3; ++a) dims[a] = get<std::int32_t>(is);
  const double s = get<double>(is);
  const auto stamp = get<std::uint64_t>(is);
  if (dims.x <= 0 || dims.y <= 0 || dims.z <= 0 || !(s > 0.0)) {
    throw std::runtime_error("corrupt grid snapshot header");
  }
  std::vector<std::uint8_t> cells(static_cast<std::size_t>(dims.x) * dims.y * dims.z);
  is.read(reinterpret_cast<char*>(cells.data()), static_cast<std::streamsize>(cells.size()));
  if (!is) throw std::runtime_error("truncated grid snapshot body");
  for (auto v : cells) {
    if (v > 2) throw std::runtime_error("invalid voxel state in snapshot");
  }
  return SlidingGrid(c, dims, s, stamp, std::move(cells));
}

void save_grid(const std::string& path, const SlidingGrid& grid) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_grid(os, grid);
}

SlidingGrid load_grid(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_grid(is);
}

}  // namespace mfp::map
