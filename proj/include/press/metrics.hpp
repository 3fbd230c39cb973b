#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "press/errors.hpp"
#include "press/trajectory.hpp"

namespace press {

// Cumulative distance at time t, linear between samples. Domain [t1, tn].
// Linear scan by design: `visited` reports tuples touched for work accounting.
inline double dis(const TemporalSequence& s, double t, std::size_t* visited = nullptr) {
  if (s.empty()) throw DataError("dis on empty temporal sequence");
  if (t < s.front().t || t > s.back().t) throw DataError("dis: time outside sampled span");
  if (t == s.front().t) {
    if (visited) *visited += 1;
    return s.front().d;
  }
  std::size_t i = 0;
  while (s[i + 1].t < t) ++i;
  if (visited) *visited += i + 2;
  if (t == s[i + 1].t) return s[i + 1].d;
  const TemporalTuple &a = s[i], &b = s[i + 1];
  return a.d + (b.d - a.d) * (t - a.t) / (b.t - a.t);
}

// Earliest time at which cumulative distance d is reached (plateaus resolve
// to their start). Domain [d1, dn].
inline double tim(const TemporalSequence& s, double d, std::size_t* visited = nullptr) {
  if (s.empty()) throw DataError("tim on empty temporal sequence");
  if (d < s.front().d || d > s.back().d) throw DataError("tim: distance outside sampled span");
  std::size_t i = 0;
  while (s[i].d < d) ++i;
  if (visited) *visited += i + 1;
  if (s[i].d == d) return s[i].t;
  const TemporalTuple &a = s[i - 1], &b = s[i];
  return a.t + (b.t - a.t) * (d - a.d) / (b.d - a.d);
}

// Latest time still at distance d: the right-sided companion of tim(), equal
// to it except on plateaus where it returns the plateau end.
inline double tim_latest(const TemporalSequence& s, double d) {
  if (s.empty()) throw DataError("tim on empty temporal sequence");
  if (d < s.front().d || d > s.back().d) throw DataError("tim: distance outside sampled span");
  std::size_t j = s.size() - 1;
  while (s[j].d > d) --j;
  if (s[j].d == d) return s[j].t;
  const TemporalTuple &a = s[j], &b = s[j + 1];
  return a.t + (b.t - a.t) * (d - a.d) / (b.d - a.d);
}

namespace detail {

// Incremental piecewise-linear evaluation for non-decreasing query sequences.
// Returns stored values exactly at breakpoints.
class DisSweep {
 public:
  explicit DisSweep(const TemporalSequence& s) : s_(&s) {}
  double at(double t) {
    const TemporalSequence& s = *s_;
    if (t <= s.front().t) return s.front().d;
    while (i_ + 2 < s.size() && s[i_ + 1].t < t) ++i_;
    const TemporalTuple &a = s[i_], &b = s[i_ + 1];
    if (t == a.t) return a.d;
    if (t >= b.t) return b.d;
    return a.d + (b.d - a.d) * (t - a.t) / (b.t - a.t);
  }

 private:
  const TemporalSequence* s_;
  std::size_t i_ = 0;
};

class TimSweep {
 public:
  explicit TimSweep(const TemporalSequence& s) : s_(&s) {}

  double earliest(double d) {
    const TemporalSequence& s = *s_;
    while (i_ + 1 < s.size() && s[i_].d < d) ++i_;
    if (s[i_].d >= d) {
      if (s[i_].d == d) return s[i_].t;
      const TemporalTuple &a = s[i_ - 1], &b = s[i_];
      return a.t + (b.t - a.t) * (d - a.d) / (b.d - a.d);
    }
    return s.back().t;  // d == final distance
  }

  double latest(double d) {
    const TemporalSequence& s = *s_;
    while (j_ + 1 < s.size() && s[j_ + 1].d <= d) ++j_;
    if (s[j_].d == d) return s[j_].t;
    const TemporalTuple &a = s[j_], &b = s[j_ + 1];
    return a.t + (b.t - a.t) * (d - a.d) / (b.d - a.d);
  }

 private:
  const TemporalSequence* s_;
  std::size_t i_ = 0;
  std::size_t j_ = 0;
};

inline std::vector<double> merged_breakpoints(const TemporalSequence& a, const TemporalSequence& b,
                                              bool by_time) {
  std::vector<double> xs;
  xs.reserve(a.size() + b.size());
  for (const TemporalTuple& p : a) xs.push_back(by_time ? p.t : p.d);
  for (const TemporalTuple& p : b) xs.push_back(by_time ? p.t : p.d);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

}  // namespace detail

// Time-synchronized network distance: max over t of |dis(a,t) - dis(b,t)|.
// Both curves are piecewise linear, so the exact maximum is attained at a
// breakpoint of either.
inline double tsnd(const TemporalSequence& a, const TemporalSequence& b) {
  if (a.empty() || b.empty()) throw DataError("tsnd on empty temporal sequence");
  if (a.front().t != b.front().t || a.back().t != b.back().t)
    throw DataError("tsnd requires sequences over the same time span");
  detail::DisSweep ea(a), eb(b);
  double best = 0.0;
  for (double t : detail::merged_breakpoints(a, b, true))
    best = std::max(best, std::abs(ea.at(t) - eb.at(t)));
  return best;
}

// Network-synchronized time difference: sup over d of |tim(a,d) - tim(b,d)|
// under the earliest-time convention. tim jumps upward at plateau starts, so
// each union breakpoint is evaluated twice: the value and the right limit.
inline double nstd(const TemporalSequence& a, const TemporalSequence& b) {
  if (a.empty() || b.empty()) throw DataError("nstd on empty temporal sequence");
  if (a.front().d != b.front().d || a.back().d != b.back().d)
    throw DataError("nstd requires sequences over the same distance span");
  detail::TimSweep ea(a), eb(b);
  const std::vector<double> ds = detail::merged_breakpoints(a, b, false);
  double best = 0.0;
  for (std::size_t k = 0; k < ds.size(); ++k) {
    best = std::max(best, std::abs(ea.earliest(ds[k]) - eb.earliest(ds[k])));
    if (k + 1 < ds.size()) best = std::max(best, std::abs(ea.latest(ds[k]) - eb.latest(ds[k])));
  }
  return best;
}

// Time-synchronized Euclidean distance between two trajectories over the same
// spatial path. Between candidate instants both positions move linearly along
// a single edge and their distance is convex, so evaluating at tuple times
// plus every edge-boundary crossing time is exact.
inline double tsed(const Trajectory& a, const Trajectory& b, const RoadNetwork& net) {
  if (a.path != b.path) throw DataError("tsed requires identical spatial paths");
  if (a.times.empty() || b.times.empty()) throw DataError("tsed on empty temporal sequence");
  if (a.times.front().t != b.times.front().t || a.times.back().t != b.times.back().t)
    throw DataError("tsed requires sequences over the same time span");
  std::vector<double> ts;
  for (const TemporalTuple& p : a.times) ts.push_back(p.t);
  for (const TemporalTuple& p : b.times) ts.push_back(p.t);
  double arc = 0.0;
  for (std::size_t i = 0; i + 1 < a.path.size(); ++i) {
    arc += net.weight(a.path[i]);
    for (const Trajectory* traj : {&a, &b}) {
      const TemporalSequence& s = traj->times;
      if (arc >= s.front().d && arc <= s.back().d) {
        ts.push_back(tim(s, arc));
        ts.push_back(tim_latest(s, arc));
      }
    }
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  detail::DisSweep ea(a.times), eb(b.times);
  double best = 0.0;
  for (double t : ts) {
    if (t < a.times.front().t || t > a.times.back().t) continue;
    const Point pa = position_at(net, a.path, ea.at(t)).pos;
    const Point pb = position_at(net, b.path, eb.at(t)).pos;
    best = std::max(best, euclid(pa, pb));
  }
  return best;
}

}  // namespace press
