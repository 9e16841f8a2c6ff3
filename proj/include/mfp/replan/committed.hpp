#pragma once

#include "mfp/primitives/primitives.hpp"

#include <vector>

namespace mfp::replan {

/// Piecewise trajectory the vehicle executes: spliced jerk primitives, then
/// a hold at the final state (which is at rest by construction).
class CommittedTrajectory {
 public:
  CommittedTrajectory() = default;
  explicit CommittedTrajectory(const primitives::FlatState& hover) : hold_(hover) {}

  primitives::FlatState sample(double t) const;
  /// Keeps the trajectory on (-inf, t_a] and continues with `prim` from t_a.
  void commit(const primitives::JerkPrimitive& prim, double t_a);
  /// Drops pieces that end before t.
  void prune_before(double t);

  struct Piece {
    double t0 = 0.0;
    double t_end = 0.0;
    primitives::JerkPrimitive prim;
  };
  const std::vector<Piece>& pieces() const { return pieces_; }
  /// Time after which the trajectory holds still.
  double end_time() const { return pieces_.empty() ? -1e300 : pieces_.back().t_end; }

 private:
  std::vector<Piece> pieces_;
  primitives::FlatState hold_;
};

}  // namespace mfp::replan
