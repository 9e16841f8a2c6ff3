#include "mfp/replan/committed.hpp"

#include <algorithm>

namespace mfp::replan {

using primitives::FlatState;

FlatState CommittedTrajectory::sample(double t) const {
  if (pieces_.empty() || t < pieces_.front().t0) {
    return pieces_.empty() ? hold_ : primitives::sample(pieces_.front().prim, 0.0);
  }
  // Last piece starting at or before t.
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                             [](double v, const Piece& p) { return v < p.t0; });
  const Piece& p = *std::prev(it);
  if (t >= p.t_end) {
    if (std::next(std::prev(it)) == pieces_.end()) return hold_;
  }
  const double local = std::clamp(t - p.t0, 0.0, std::min(p.prim.duration(), p.t_end - p.t0));
  return primitives::sample(p.prim, local);
}

void CommittedTrajectory::commit(const primitives::JerkPrimitive& prim, double t_a) {
  while (!pieces_.empty() && pieces_.back().t0 >= t_a) pieces_.pop_back();
  if (!pieces_.empty()) pieces_.back().t_end = std::min(pieces_.back().t_end, t_a);
  pieces_.push_back({t_a, t_a + prim.duration(), prim});
  hold_ = prim.terminal;
}

void CommittedTrajectory::prune_before(double t) {
  std::size_t drop = 0;
  while (drop + 1 < pieces_.size() && pieces_[drop].t_end < t) ++drop;
  pieces_.erase(pieces_.begin(), pieces_.begin() + static_cast<std::ptrdiff_t>(drop));
}

}  // namespace mfp::replan
