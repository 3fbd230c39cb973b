#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "press/errors.hpp"
#include "press/road_network.hpp"

namespace press {

// Edge sequence; consecutive edges must be adjacent on the network.
using SpatialPath = std::vector<EdgeId>;

// One sample: cumulative network distance d (meters, from the tail of the
// first path edge) at time t (seconds).
struct TemporalTuple {
  double d = 0.0;
  double t = 0.0;
};

inline bool operator==(const TemporalTuple& a, const TemporalTuple& b) {
  return a.d == b.d && a.t == b.t;
}

// t strictly increasing, d non-decreasing, d.front() >= 0.
using TemporalSequence = std::vector<TemporalTuple>;

struct Trajectory {
  std::int64_t id = 0;
  SpatialPath path;
  TemporalSequence times;
};

inline double path_length(const RoadNetwork& net, const SpatialPath& path) {
  double total = 0.0;
  for (EdgeId e : path) total += net.weight(e);
  return total;
}

// Location on the network: edge, network offset from its tail, coordinates.
struct NetworkPoint {
  EdgeId edge = kNoEdge;
  double offset = 0.0;
  Point pos;
};

// Point at arc length d along the path polyline. d is clamped to [0, length].
inline NetworkPoint position_at(const RoadNetwork& net, const SpatialPath& path, double d) {
  if (path.empty()) throw DataError("position_at on empty path");
  double cur = 0.0;
  for (EdgeId e : path) {
    const double w = net.weight(e);
    if (cur + w >= d) {
      const double off = std::max(0.0, d - cur);
      return {e, off, lerp(net.tail(e), net.head(e), off / w)};
    }
    cur += w;
  }
  const EdgeId last = path.back();
  return {last, net.weight(last), net.head(last)};
}

struct ValidationReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

inline ValidationReport validate(const Trajectory& traj, const RoadNetwork& net) {
  ValidationReport rep;
  auto issue = [&](const std::string& s) { rep.issues.push_back(s); };
  if (traj.path.empty()) issue("spatial path is empty");
  for (std::size_t i = 0; i < traj.path.size(); ++i) {
    if (!net.has_edge(traj.path[i])) {
      issue("edge " + std::to_string(traj.path[i]) + " at position " + std::to_string(i) +
            " does not exist");
      return rep;  // later checks would index out of range
    }
  }
  for (std::size_t i = 0; i + 1 < traj.path.size(); ++i) {
    if (!net.adjacent(traj.path[i], traj.path[i + 1]))
      issue("edges " + std::to_string(traj.path[i]) + " and " + std::to_string(traj.path[i + 1]) +
            " at positions " + std::to_string(i) + "," + std::to_string(i + 1) + " are not adjacent");
  }
  if (traj.times.empty()) {
    issue("temporal sequence is empty");
  } else {
    if (traj.times.front().d < 0.0) issue("first cumulative distance is negative");
    for (std::size_t i = 0; i + 1 < traj.times.size(); ++i) {
      if (!(traj.times[i].t < traj.times[i + 1].t))
        issue("timestamps not strictly increasing at tuple " + std::to_string(i + 1));
      if (traj.times[i].d > traj.times[i + 1].d)
        issue("cumulative distance decreases at tuple " + std::to_string(i + 1));
    }
    if (!traj.path.empty() && traj.times.back().d > path_length(net, traj.path))
      issue("final cumulative distance exceeds path length");
  }
  return rep;
}

// Text format per trajectory:
//   T <id> <n_edges> <n_tuples>
//   <edge ids, one line>
//   <d> <t>            (n_tuples lines)
inline std::vector<Trajectory> load_corpus(std::istream& in) {
  std::vector<Trajectory> corpus;
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&](std::istringstream& ls) {
    while (std::getline(in, line)) {
      ++line_no;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ls.clear();
      ls.str(line);
      return true;
    }
    return false;
  };
  auto fail = [&](const std::string& msg) {
    throw DataError("corpus line " + std::to_string(line_no) + ": " + msg);
  };
  std::istringstream ls;
  while (next_line(ls)) {
    std::string kind;
    ls >> kind;
    if (kind != "T") fail("expected 'T <id> <n_edges> <n_tuples>'");
    Trajectory traj;
    std::size_t n_edges = 0, n_tuples = 0;
    if (!(ls >> traj.id >> n_edges >> n_tuples)) fail("expected 'T <id> <n_edges> <n_tuples>'");
    if (n_edges == 0) fail("trajectory must have at least one edge");
    if (!next_line(ls)) fail("missing edge list");
    traj.path.resize(n_edges);
    for (std::size_t i = 0; i < n_edges; ++i)
      if (!(ls >> traj.path[i])) fail("expected " + std::to_string(n_edges) + " edge ids");
    traj.times.resize(n_tuples);
    for (std::size_t i = 0; i < n_tuples; ++i) {
      if (!next_line(ls)) fail("missing temporal tuple");
      if (!(ls >> traj.times[i].d >> traj.times[i].t)) fail("expected '<d> <t>'");
    }
    corpus.push_back(std::move(traj));
  }
  return corpus;
}

inline void save_corpus(std::ostream& out, const std::vector<Trajectory>& corpus) {
  out.precision(17);
  for (const Trajectory& traj : corpus) {
    out << "T " << traj.id << ' ' << traj.path.size() << ' ' << traj.times.size() << '\n';
    for (std::size_t i = 0; i < traj.path.size(); ++i)
      out << traj.path[i] << (i + 1 == traj.path.size() ? '\n' : ' ');
    for (const TemporalTuple& tp : traj.times) out << tp.d << ' ' << tp.t << '\n';
  }
}

}  // namespace press
