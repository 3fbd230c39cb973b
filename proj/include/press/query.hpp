#pragma once

#include <cstdint>
#include <vector>

#include "press/errors.hpp"
#include "press/geometry.hpp"
#include "press/metrics.hpp"
#include "press/road_network.hpp"
#include "press/spatial_codec.hpp"
#include "press/trajectory.hpp"

namespace press {

struct CompressedTrajectory {
  std::int64_t id = 0;
  CompressedSpatial spatial;
  TemporalSequence temporal;
};

struct QueryWork {
  std::uint64_t tuples_scanned = 0;
  std::uint64_t nodes_decoded = 0;
  std::uint64_t edges_expanded = 0;
};

// Read-only tables for query evaluation: the per-trie-node length/extent
// tables live in the model; the per-edge-pair extent of each canonical
// shortest path (both end edges included) lives here.
class QueryIndex {
 public:
  QueryIndex(const RoadNetwork& net, const SpIndex& sp, const FstModel& model)
      : net_(&net), sp_(&sp), model_(&model) {}

  const RoadNetwork& net() const { return *net_; }
  const SpIndex& sp() const { return *sp_; }
  const FstModel& model() const { return *model_; }

  double trie_dist(std::int32_t node) const {
    return model_->node_dist[static_cast<std::size_t>(node)];
  }
  const Mbr& trie_mbr(std::int32_t node) const {
    return model_->node_mbr[static_cast<std::size_t>(node)];
  }
  const Mbr& sp_mbr(EdgeId a, EdgeId b) const {
    return sp_mbr_[static_cast<std::size_t>(a) * net_->edge_count() +
                   static_cast<std::size_t>(b)];
  }
  // MBR containment slack; covers every per-edge snap tolerance.
  double inflate() const { return inflate_; }
  double snap_tol(EdgeId e) const { return 1e-6 * net_->weight(e); }

  std::size_t sp_mbr_bytes() const { return sp_mbr_.size() * sizeof(Mbr); }

  friend QueryIndex build_query_index(FstModel& model, const SpIndex& sp, const RoadNetwork& net);

 private:
  const RoadNetwork* net_;
  const SpIndex* sp_;
  const FstModel* model_;
  std::vector<Mbr> sp_mbr_;
  double inflate_ = 0.0;
};

// Fills the model's per-node tables (cumulative shortest-path length past the
// first edge, and decompressed-geometry extent) and the edge-pair shortest
// path extent table. Pair extents are memoized along predecessor chains.
inline QueryIndex build_query_index(FstModel& model, const SpIndex& sp, const RoadNetwork& net) {
  const std::size_t n = net.edge_count();
  QueryIndex qi(net, sp, model);
  for (EdgeId e = 0; e < static_cast<EdgeId>(n); ++e)
    if (net.weight(e) > qi.inflate_) qi.inflate_ = net.weight(e);
  qi.inflate_ *= 1e-6;

  qi.sp_mbr_.assign(n * n, Mbr{});
  std::vector<char> done(n * n, 0);
  std::vector<EdgeId> chain;
  for (EdgeId s = 0; s < static_cast<EdgeId>(n); ++s) {
    const std::size_t row = static_cast<std::size_t>(s) * n;
    for (EdgeId t = 0; t < static_cast<EdgeId>(n); ++t) {
      if (done[row + static_cast<std::size_t>(t)] || !sp.reachable(s, t)) continue;
      chain.clear();
      EdgeId cur = t;
      while (!done[row + static_cast<std::size_t>(cur)] && cur != s) {
        chain.push_back(cur);
        cur = sp.sp_end(s, cur);
      }
      Mbr acc = done[row + static_cast<std::size_t>(cur)]
                    ? qi.sp_mbr_[row + static_cast<std::size_t>(cur)]
                    : net.edge_mbr(s);
      done[row + static_cast<std::size_t>(s)] = 1;
      qi.sp_mbr_[row + static_cast<std::size_t>(s)].expand(net.edge_mbr(s));
      for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        acc.expand(net.edge_mbr(*it));
        qi.sp_mbr_[row + static_cast<std::size_t>(*it)] = acc;
        done[row + static_cast<std::size_t>(*it)] = 1;
      }
    }
  }

  model.node_dist.assign(model.trie.size(), 0.0);
  model.node_mbr.assign(model.trie.size(), Mbr{});
  // Parent ids are not ordered, so walk the trie breadth-first.
  std::vector<std::int32_t> order;
  order.push_back(0);
  for (std::size_t i = 0; i < order.size(); ++i)
    for (const auto& [label, child] : model.trie.nodes[static_cast<std::size_t>(order[i])].children)
      order.push_back(child);
  for (std::int32_t id : order) {
    if (id == 0) continue;
    const TrieNode& node = model.trie.nodes[static_cast<std::size_t>(id)];
    if (node.depth == 1) {
      model.node_dist[static_cast<std::size_t>(id)] = 0.0;
      model.node_mbr[static_cast<std::size_t>(id)] = net.edge_mbr(node.label);
      continue;
    }
    const EdgeId prev = model.trie.nodes[static_cast<std::size_t>(node.parent)].label;
    if (!sp.reachable(prev, node.label))
      throw ModelMismatch("query index: model sub-trajectory is not connected on this network");
    model.node_dist[static_cast<std::size_t>(id)] =
        model.node_dist[static_cast<std::size_t>(node.parent)] + sp.sp_dist(prev, node.label);
    Mbr m = model.node_mbr[static_cast<std::size_t>(node.parent)];
    m.expand(qi.sp_mbr(prev, node.label));
    model.node_mbr[static_cast<std::size_t>(id)] = m;
  }
  return qi;
}

namespace detail {

// Streaming unit decoder: yields one trie node per Huffman code.
class UnitCursor {
 public:
  UnitCursor(const CompressedSpatial& cs, const FstModel& model)
      : reader_(cs.bits, cs.bit_count), model_(&model) {
    if (cs.bit_count == 0) throw DataError("query on empty spatial bitstream");
  }

  bool done() const { return reader_.done(); }

  std::int32_t next() {
    std::int32_t n = 0;
    while (model_->decoder.nodes[static_cast<std::size_t>(n)].leaf < 0) {
      n = model_->decoder.nodes[static_cast<std::size_t>(n)].next[reader_.next_bit()];
      if (n < 0) throw DataError("query: bitstream does not decode to whole codes");
    }
    return model_->decoder.nodes[static_cast<std::size_t>(n)].leaf;
  }

 private:
  BitReader reader_;
  const FstModel* model_;
};

inline NetworkPoint point_on_edge(const RoadNetwork& net, EdgeId e, double offset) {
  const Edge& edge = net.edge(e);
  const Point a = net.vertex(edge.from).pos;
  const Point b = net.vertex(edge.to).pos;
  const double u = edge.weight > 0 ? offset / edge.weight : 0.0;
  return {e, offset, lerp(a, b, u)};
}

}  // namespace detail

// Position at time t without decompressing the whole path: trie-node and
// edge-pair length tables advance a cumulative distance unit by unit, and at
// most one shortest-path splice is expanded edge by edge.
inline NetworkPoint where_at(const CompressedTrajectory& ct, double t, const QueryIndex& qi,
                             QueryWork* work = nullptr) {
  std::size_t tuples = 0;
  const double target = dis(ct.temporal, t, &tuples);
  if (work) work->tuples_scanned += tuples;

  const FstModel& model = qi.model();
  const RoadNetwork& net = qi.net();
  const SpIndex& sp = qi.sp();
  detail::UnitCursor cursor(ct.spatial, model);
  double acc = 0.0;
  EdgeId prev_last = kNoEdge;
  auto walk = [&](const std::vector<EdgeId>& edges, std::size_t first, double base) {
    for (std::size_t i = first; i < edges.size(); ++i) {
      if (work) ++work->edges_expanded;
      const double w = net.weight(edges[i]);
      if (base + w >= target)
        return detail::point_on_edge(net, edges[i], std::max(0.0, target - base));
      base += w;
    }
    // Chunk sums and edge-walk sums agree exactly on integral weights; on
    // general weights the guard clamps to the chunk's final edge head.
    return detail::point_on_edge(net, edges.back(), net.weight(edges.back()));
  };
  while (!cursor.done()) {
    const std::int32_t node = cursor.next();
    if (work) ++work->nodes_decoded;
    const std::vector<EdgeId> unit = model.trie.string_of(node);
    const double hop = prev_last == kNoEdge ? net.weight(unit.front())
                                            : sp.sp_dist(prev_last, unit.front());
    const double span = hop + qi.trie_dist(node);
    if (acc + span >= target) {
      if (acc + hop >= target) {
        if (prev_last == kNoEdge) return walk({unit.front()}, 0, acc);
        return walk(reconstruct_sp(sp, prev_last, unit.front()), 1, acc);
      }
      acc += hop;
      for (std::size_t i = 0; i + 1 < unit.size(); ++i) {
        const double chunk = sp.sp_dist(unit[i], unit[i + 1]);
        if (acc + chunk >= target) return walk(reconstruct_sp(sp, unit[i], unit[i + 1]), 1, acc);
        acc += chunk;
      }
      return detail::point_on_edge(net, unit.back(), net.weight(unit.back()));
    }
    acc += span;
    prev_last = model.trie.nodes[static_cast<std::size_t>(node)].label;
  }
  throw DataError("where_at: distance beyond decompressed path");
}

// Earliest time the trajectory is at point p. Scans units in path order,
// pruning by node and edge-pair extents; candidate edges are snap-tested and
// a hit maps back through the cumulative distance to the temporal sequence.
inline double when_at(const CompressedTrajectory& ct, const Point& p, const QueryIndex& qi,
                      QueryWork* work = nullptr, bool use_mbr = true) {
  const FstModel& model = qi.model();
  const RoadNetwork& net = qi.net();
  const SpIndex& sp = qi.sp();
  const double d_lo = ct.temporal.front().d;
  const double d_hi = ct.temporal.back().d;
  detail::UnitCursor cursor(ct.spatial, model);
  double acc = 0.0;
  EdgeId prev_last = kNoEdge;
  double answer = 0.0;
  bool found = false;
  // Walks a splice's tail edges; returns true when p snaps onto one of them
  // at a distance inside the temporal span.
  auto scan = [&](const std::vector<EdgeId>& edges, std::size_t first, double base) {
    for (std::size_t i = first; i < edges.size(); ++i) {
      if (work) ++work->edges_expanded;
      const EdgeId e = edges[i];
      const Edge& edge = net.edge(e);
      const Point a = net.vertex(edge.from).pos;
      const Point b = net.vertex(edge.to).pos;
      if (point_segment_distance(p, a, b) <= qi.snap_tol(e)) {
        const double d = base + project_on_segment(p, a, b) * edge.weight;
        if (d >= d_lo && d <= d_hi) {
          std::size_t tuples = 0;
          answer = tim(ct.temporal, d, &tuples);
          if (work) work->tuples_scanned += tuples;
          found = true;
          return true;
        }
      }
      base += edge.weight;
    }
    return false;
  };
  while (!cursor.done() && !found) {
    const std::int32_t node = cursor.next();
    if (work) ++work->nodes_decoded;
    const std::vector<EdgeId> unit = model.trie.string_of(node);
    const Mbr& hop_mbr =
        prev_last == kNoEdge ? net.edge_mbr(unit.front()) : qi.sp_mbr(prev_last, unit.front());
    const double hop = prev_last == kNoEdge ? net.weight(unit.front())
                                            : sp.sp_dist(prev_last, unit.front());
    if (!use_mbr || hop_mbr.contains(p, qi.inflate())) {
      const bool hit = prev_last == kNoEdge
                           ? scan({unit.front()}, 0, acc)
                           : scan(reconstruct_sp(sp, prev_last, unit.front()), 1, acc);
      if (hit) break;
    }
    acc += hop;
    if (!use_mbr || qi.trie_mbr(node).contains(p, qi.inflate())) {
      for (std::size_t i = 0; i + 1 < unit.size() && !found; ++i) {
        const double chunk = sp.sp_dist(unit[i], unit[i + 1]);
        if (!use_mbr || qi.sp_mbr(unit[i], unit[i + 1]).contains(p, qi.inflate()))
          if (scan(reconstruct_sp(sp, unit[i], unit[i + 1]), 1, acc)) break;
        acc += chunk;
      }
    } else {
      acc += qi.trie_dist(node);
    }
    prev_last = model.trie.nodes[static_cast<std::size_t>(node)].label;
  }
  if (!found) throw DataError("when_at: point is not on the trajectory");
  return answer;
}

// Whether any part of the trajectory traversed during [t1, t2] intersects
// rect. Units outside the distance window or the rectangle are skipped whole.
inline bool range(const CompressedTrajectory& ct, double t1, double t2, const Mbr& rect,
                  const QueryIndex& qi, QueryWork* work = nullptr, bool use_mbr = true) {
  if (!(t1 < t2)) throw DataError("range: interval must satisfy t1 < t2");
  std::size_t tuples = 0;
  const double d1 = dis(ct.temporal, t1, &tuples);
  const double d2 = dis(ct.temporal, t2, &tuples);
  if (work) work->tuples_scanned += tuples;

  const FstModel& model = qi.model();
  const RoadNetwork& net = qi.net();
  const SpIndex& sp = qi.sp();
  detail::UnitCursor cursor(ct.spatial, model);
  double acc = 0.0;
  EdgeId prev_last = kNoEdge;
  // Tests the [d1,d2] clip of each walked edge against rect.
  auto scan = [&](const std::vector<EdgeId>& edges, std::size_t first, double base) {
    for (std::size_t i = first; i < edges.size(); ++i) {
      if (work) ++work->edges_expanded;
      const EdgeId e = edges[i];
      const Edge& edge = net.edge(e);
      const double lo = std::max(base, d1);
      const double hi = std::min(base + edge.weight, d2);
      if (lo <= hi) {
        const Point a = net.vertex(edge.from).pos;
        const Point b = net.vertex(edge.to).pos;
        const double w = edge.weight;
        const Point pa = lerp(a, b, std::max(0.0, lo - base) / w);
        const Point pb = lerp(a, b, std::min(w, hi - base) / w);
        if (segment_intersects_rect(pa, pb, rect)) return true;
      }
      base += edge.weight;
    }
    return false;
  };
  while (!cursor.done()) {
    const std::int32_t node = cursor.next();
    if (work) ++work->nodes_decoded;
    const std::vector<EdgeId> unit = model.trie.string_of(node);
    const double hop = prev_last == kNoEdge ? net.weight(unit.front())
                                            : sp.sp_dist(prev_last, unit.front());
    const double span = hop + qi.trie_dist(node);
    const bool in_window = acc <= d2 && acc + span >= d1;
    if (in_window) {
      const Mbr& hop_mbr =
          prev_last == kNoEdge ? net.edge_mbr(unit.front()) : qi.sp_mbr(prev_last, unit.front());
      if (acc <= d2 && acc + hop >= d1 && (!use_mbr || hop_mbr.intersects(rect))) {
        const bool hit = prev_last == kNoEdge
                             ? scan({unit.front()}, 0, acc)
                             : scan(reconstruct_sp(sp, prev_last, unit.front()), 1, acc);
        if (hit) return true;
      }
      double base = acc + hop;
      if (!use_mbr || qi.trie_mbr(node).intersects(rect)) {
        for (std::size_t i = 0; i + 1 < unit.size(); ++i) {
          const double chunk = sp.sp_dist(unit[i], unit[i + 1]);
          if (base <= d2 && base + chunk >= d1 &&
              (!use_mbr || qi.sp_mbr(unit[i], unit[i + 1]).intersects(rect)))
            if (scan(reconstruct_sp(sp, unit[i], unit[i + 1]), 1, base)) return true;
          base += chunk;
        }
      }
    }
    acc += span;
    if (acc > d2) break;
    prev_last = model.trie.nodes[static_cast<std::size_t>(node)].label;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Reference implementations on uncompressed trajectories: linear scans used
// as oracles and as the baseline for work-counter comparisons.
// ---------------------------------------------------------------------------

inline NetworkPoint reference_where_at(const Trajectory& traj, double t, const RoadNetwork& net,
                                       QueryWork* work = nullptr) {
  std::size_t tuples = 0;
  const double target = dis(traj.times, t, &tuples);
  if (work) work->tuples_scanned += tuples;
  double base = 0.0;
  for (std::size_t i = 0; i < traj.path.size(); ++i) {
    if (work) ++work->edges_expanded;
    const double w = net.weight(traj.path[i]);
    if (base + w >= target)
      return detail::point_on_edge(net, traj.path[i], std::max(0.0, target - base));
    base += w;
  }
  return detail::point_on_edge(net, traj.path.back(), net.weight(traj.path.back()));
}

inline double reference_when_at(const Trajectory& traj, const Point& p, const RoadNetwork& net,
                                QueryWork* work = nullptr) {
  const double d_lo = traj.times.front().d;
  const double d_hi = traj.times.back().d;
  double base = 0.0;
  for (std::size_t i = 0; i < traj.path.size(); ++i) {
    if (work) ++work->edges_expanded;
    const EdgeId e = traj.path[i];
    const Edge& edge = net.edge(e);
    const Point a = net.vertex(edge.from).pos;
    const Point b = net.vertex(edge.to).pos;
    if (point_segment_distance(p, a, b) <= 1e-6 * edge.weight) {
      const double d = base + project_on_segment(p, a, b) * edge.weight;
      if (d >= d_lo && d <= d_hi) {
        std::size_t tuples = 0;
        const double t = tim(traj.times, d, &tuples);
        if (work) work->tuples_scanned += tuples;
        return t;
      }
    }
    base += edge.weight;
  }
  throw DataError("when_at: point is not on the trajectory");
}

inline bool reference_range(const Trajectory& traj, double t1, double t2, const Mbr& rect,
                            const RoadNetwork& net, QueryWork* work = nullptr) {
  if (!(t1 < t2)) throw DataError("range: interval must satisfy t1 < t2");
  std::size_t tuples = 0;
  const double d1 = dis(traj.times, t1, &tuples);
  const double d2 = dis(traj.times, t2, &tuples);
  if (work) work->tuples_scanned += tuples;
  double base = 0.0;
  for (std::size_t i = 0; i < traj.path.size() && base <= d2; ++i) {
    if (work) ++work->edges_expanded;
    const EdgeId e = traj.path[i];
    const Edge& edge = net.edge(e);
    const double lo = std::max(base, d1);
    const double hi = std::min(base + edge.weight, d2);
    if (lo <= hi) {
      const Point a = net.vertex(edge.from).pos;
      const Point b = net.vertex(edge.to).pos;
      const double w = edge.weight;
      const Point pa = lerp(a, b, std::max(0.0, lo - base) / w);
      const Point pb = lerp(a, b, std::min(w, hi - base) / w);
      if (segment_intersects_rect(pa, pb, rect)) return true;
    }
    base += edge.weight;
  }
  return false;
}

}  // namespace press
