#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace mfp {

using Vec3 = Eigen::Vector3d;

/// Integer voxel coordinate. Local to whichever grid produced it.
struct Index3 {
  int x = 0;
  int y = 0;
  int z = 0;

  constexpr int& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr int operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  friend constexpr bool operator==(const Index3&, const Index3&) = default;
  friend constexpr Index3 operator+(Index3 a, const Index3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend constexpr Index3 operator-(Index3 a, const Index3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
};

struct Index3Hash {
  std::size_t operator()(const Index3& i) const noexcept {
    return (static_cast<std::size_t>(i.x) * 73856093u) ^
           (static_cast<std::size_t>(i.y) * 19349663u) ^
           (static_cast<std::size_t>(i.z) * 83492791u);
  }
};

/// Error raised by planning components; `code` names the failure class.
class PlanningError : public std::runtime_error {
 public:
  enum class Code {
    OutOfBounds,
    NoFeasibleGoal,
    NoPath,
    MaxIterations,
    OutOfDomain,
    NoFeasibleTerminal,
    OrderingError,
    InvalidArgument,
  };

  PlanningError(Code code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

}  // namespace mfp
