#pragma once

#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "press/errors.hpp"
#include "press/geometry.hpp"

namespace press {

using EdgeId = std::int32_t;
using VertexId = std::int32_t;

inline constexpr EdgeId kNoEdge = -1;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Vertex {
  VertexId id = 0;
  Point pos;
};

struct Edge {
  EdgeId id = 0;
  VertexId from = 0;
  VertexId to = 0;
  double weight = 0.0;  // network length in meters, > 0
};

// Directed road graph. Vertex and edge ids are dense (0..n-1); edge b follows
// edge a iff head(a) == tail(b).
class RoadNetwork {
 public:
  RoadNetwork(std::vector<Vertex> vertices, std::vector<Edge> edges)
      : vertices_(std::move(vertices)), edges_(std::move(edges)), out_(vertices_.size()) {
    for (const Edge& e : edges_) out_[static_cast<std::size_t>(e.from)].push_back(e.id);
  }

  std::size_t vertex_count() const { return vertices_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  const Vertex& vertex(VertexId v) const { return vertices_[static_cast<std::size_t>(v)]; }
  const Edge& edge(EdgeId e) const { return edges_[static_cast<std::size_t>(e)]; }

  bool has_edge(EdgeId e) const { return e >= 0 && static_cast<std::size_t>(e) < edges_.size(); }

  double weight(EdgeId e) const { return edge(e).weight; }
  Point tail(EdgeId e) const { return vertex(edge(e).from).pos; }
  Point head(EdgeId e) const { return vertex(edge(e).to).pos; }

  Mbr edge_mbr(EdgeId e) const {
    Mbr m;
    m.expand(tail(e));
    m.expand(head(e));
    return m;
  }

  // Edges that may follow e on a path.
  const std::vector<EdgeId>& edges_after(EdgeId e) const {
    return out_[static_cast<std::size_t>(edge(e).to)];
  }

  const std::vector<EdgeId>& out_edges(VertexId v) const {
    return out_[static_cast<std::size_t>(v)];
  }

  bool adjacent(EdgeId a, EdgeId b) const { return edge(a).to == edge(b).from; }

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> out_;
};

// Text format, one record per line:
//   V <id> <x> <y>
//   E <id> <from> <to> <weight>
// '#' starts a comment. Ids must be dense and 0-based.
inline RoadNetwork load_network(std::istream& in) {
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw DataError("network line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    if (kind == "V") {
      Vertex v;
      if (!(ls >> v.id >> v.pos.x >> v.pos.y)) fail("expected 'V <id> <x> <y>'");
      vertices.push_back(v);
    } else if (kind == "E") {
      Edge e;
      if (!(ls >> e.id >> e.from >> e.to >> e.weight)) fail("expected 'E <id> <from> <to> <weight>'");
      if (!(e.weight > 0.0)) fail("non-positive edge weight");
      edges.push_back(e);
    } else {
      fail("unknown record '" + kind + "'");
    }
  }
  // Dense-id check doubles as the duplicate check.
  std::vector<char> seen(vertices.size(), 0);
  for (const Vertex& v : vertices) {
    if (v.id < 0 || static_cast<std::size_t>(v.id) >= vertices.size() || seen[static_cast<std::size_t>(v.id)])
      throw DataError("vertex ids must be dense 0.." + std::to_string(vertices.size() - 1));
    seen[static_cast<std::size_t>(v.id)] = 1;
  }
  std::vector<Vertex> vs(vertices.size());
  for (const Vertex& v : vertices) vs[static_cast<std::size_t>(v.id)] = v;
  std::vector<char> eseen(edges.size(), 0);
  for (const Edge& e : edges) {
    if (e.id < 0 || static_cast<std::size_t>(e.id) >= edges.size() || eseen[static_cast<std::size_t>(e.id)])
      throw DataError("edge ids must be dense 0.." + std::to_string(edges.size() - 1));
    eseen[static_cast<std::size_t>(e.id)] = 1;
    if (e.from < 0 || static_cast<std::size_t>(e.from) >= vs.size() || e.to < 0 ||
        static_cast<std::size_t>(e.to) >= vs.size())
      throw DataError("edge " + std::to_string(e.id) + " references a missing vertex");
    // Self-loops are rejected: a walk repeating one is not expressible as a
    // splice of shortest paths, so such paths could not round-trip.
    if (e.from == e.to) throw DataError("edge " + std::to_string(e.id) + " is a self-loop");
  }
  std::vector<Edge> es(edges.size());
  for (const Edge& e : edges) es[static_cast<std::size_t>(e.id)] = e;
  return RoadNetwork(std::move(vs), std::move(es));
}

inline void save_network(std::ostream& out, const RoadNetwork& net) {
  out.precision(17);
  for (std::size_t v = 0; v < net.vertex_count(); ++v) {
    const Vertex& vx = net.vertex(static_cast<VertexId>(v));
    out << "V " << vx.id << ' ' << vx.pos.x << ' ' << vx.pos.y << '\n';
  }
  for (std::size_t e = 0; e < net.edge_count(); ++e) {
    const Edge& ed = net.edge(static_cast<EdgeId>(e));
    out << "E " << ed.id << ' ' << ed.from << ' ' << ed.to << ' ' << ed.weight << '\n';
  }
}

// Dense all-pairs shortest-path tables over the edge graph.
//
// dist(s,t) excludes the weight of s and includes the weight of t, so
// dist(s,s) == 0 and dist(s,t) == weight(t) for t directly after s.
// end(s,t) is the edge preceding t on the canonical path from s; ties pick
// the smallest predecessor edge id, which makes the tables independent of
// heap pop order and gives every canonical path the suffix property:
// the recorded path from any edge on SP(s,t) to t is that path's suffix.
class SpIndex {
 public:
  std::size_t edge_count() const { return n_; }

  EdgeId sp_end(EdgeId s, EdgeId t) const { return end_[idx(s, t)]; }
  double sp_dist(EdgeId s, EdgeId t) const { return dist_[idx(s, t)]; }
  bool reachable(EdgeId s, EdgeId t) const { return dist_[idx(s, t)] < kInf; }

  std::size_t table_bytes() const { return end_.size() * sizeof(EdgeId) + dist_.size() * sizeof(double); }

  friend SpIndex build_sp_index(const RoadNetwork& net);

 private:
  std::size_t idx(EdgeId s, EdgeId t) const {
    return static_cast<std::size_t>(s) * n_ + static_cast<std::size_t>(t);
  }

  std::size_t n_ = 0;
  std::vector<EdgeId> end_;
  std::vector<double> dist_;
};

inline SpIndex build_sp_index(const RoadNetwork& net) {
  SpIndex sp;
  sp.n_ = net.edge_count();
  sp.end_.assign(sp.n_ * sp.n_, kNoEdge);
  sp.dist_.assign(sp.n_ * sp.n_, kInf);
  using Entry = std::pair<double, EdgeId>;
  std::vector<double> dist(sp.n_);
  std::vector<EdgeId> pred(sp.n_);
  for (std::size_t s = 0; s < sp.n_; ++s) {
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(pred.begin(), pred.end(), kNoEdge);
    std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
    dist[s] = 0.0;
    heap.push({0.0, static_cast<EdgeId>(s)});
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d != dist[static_cast<std::size_t>(u)]) continue;
      for (EdgeId v : net.edges_after(u)) {
        const double nd = d + net.weight(v);
        const std::size_t vi = static_cast<std::size_t>(v);
        if (nd < dist[vi]) {
          dist[vi] = nd;
          pred[vi] = u;
          heap.push({nd, v});
        } else if (nd == dist[vi] && u < pred[vi]) {
          pred[vi] = u;  // deterministic tie-break; dist is unchanged
        }
      }
    }
    std::copy(dist.begin(), dist.end(), sp.dist_.begin() + static_cast<std::ptrdiff_t>(s * sp.n_));
    std::copy(pred.begin(), pred.end(), sp.end_.begin() + static_cast<std::ptrdiff_t>(s * sp.n_));
    sp.end_[s * sp.n_ + s] = static_cast<EdgeId>(s);
  }
  return sp;
}

// Canonical shortest path from s to t, both included.
inline std::vector<EdgeId> reconstruct_sp(const SpIndex& sp, EdgeId s, EdgeId t) {
  if (!sp.reachable(s, t))
    throw DataError("no path between edges " + std::to_string(s) + " and " + std::to_string(t));
  std::vector<EdgeId> rev;
  EdgeId cur = t;
  while (cur != s) {
    rev.push_back(cur);
    cur = sp.sp_end(s, cur);
    if (rev.size() > sp.edge_count())
      throw DataError("shortest-path table is corrupt (predecessor cycle)");
  }
  rev.push_back(s);
  return {rev.rbegin(), rev.rend()};
}

}  // namespace press
