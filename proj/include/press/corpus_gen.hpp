#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "press/errors.hpp"
#include "press/rng.hpp"
#include "press/road_network.hpp"
#include "press/trajectory.hpp"

namespace press {

struct GenConfig {
  std::uint64_t seed = 1;
  int rows = 8;
  int cols = 8;
  double weight_min = 50.0;
  double weight_max = 300.0;
  int count = 100;
  int len_min = 20;
  int len_max = 80;
  double sp_bias = 0.7;          // probability a leg follows a canonical shortest path
  int pattern_count = 12;        // shared edge-sequence pool size
  double pattern_reuse = 0.3;    // probability a non-shortest-path leg replays a pattern
  double stop_fraction = 0.1;    // long-run share of zero-progress samples
  double sample_interval = 10.0; // seconds between temporal tuples
};

inline void check_config(const GenConfig& cfg) {
  if (cfg.rows < 2 || cfg.cols < 2) throw DataError("gen: grid must be at least 2x2");
  if (cfg.weight_min < 1.0 || cfg.weight_max < cfg.weight_min)
    throw DataError("gen: weight range must satisfy 1 <= min <= max");
  if (cfg.count < 0) throw DataError("gen: negative count");
  if (cfg.len_min < 1 || cfg.len_max < cfg.len_min) throw DataError("gen: bad length range");
  if (cfg.sp_bias < 0.0 || cfg.sp_bias > 1.0 || cfg.pattern_reuse < 0.0 ||
      cfg.pattern_reuse > 1.0 || cfg.stop_fraction < 0.0 || cfg.stop_fraction >= 1.0)
    throw DataError("gen: probabilities must lie in [0,1] (stop_fraction < 1)");
  if (cfg.pattern_count < 1) throw DataError("gen: pattern_count must be >= 1");
  if (cfg.sample_interval < 1.0) throw DataError("gen: sample_interval must be >= 1");
}

// rows x cols lattice with one directed edge pair per adjacent vertex pair.
// Weights are integers, and vertex spacing is kept strictly below the minimum
// weight so every edge's straight-line length is shorter than its cost.
inline RoadNetwork gen_network(const GenConfig& cfg) {
  check_config(cfg);
  Rng rng = Rng(cfg.seed).fork(0);
  const std::int64_t wlo = static_cast<std::int64_t>(std::ceil(cfg.weight_min));
  const std::int64_t whi = static_cast<std::int64_t>(std::floor(cfg.weight_max));
  if (whi < wlo) throw DataError("gen: weight range contains no integer");
  const double spacing = wlo > 1 ? static_cast<double>(wlo - 1) : 1.0;
  std::vector<Vertex> vertices;
  for (int r = 0; r < cfg.rows; ++r)
    for (int c = 0; c < cfg.cols; ++c)
      vertices.push_back({static_cast<VertexId>(r * cfg.cols + c), {c * spacing, r * spacing}});
  std::vector<Edge> edges;
  auto add_pair = [&](VertexId a, VertexId b) {
    const double w1 = static_cast<double>(rng.uniform_int(wlo, whi));
    const double w2 = static_cast<double>(rng.uniform_int(wlo, whi));
    edges.push_back({static_cast<EdgeId>(edges.size()), a, b, w1});
    edges.push_back({static_cast<EdgeId>(edges.size()), b, a, w2});
  };
  for (int r = 0; r < cfg.rows; ++r) {
    for (int c = 0; c < cfg.cols; ++c) {
      const VertexId v = static_cast<VertexId>(r * cfg.cols + c);
      if (c + 1 < cfg.cols) add_pair(v, v + 1);
      if (r + 1 < cfg.rows) add_pair(v, v + cfg.cols);
    }
  }
  return RoadNetwork(std::move(vertices), std::move(edges));
}

namespace detail {

inline EdgeId random_edge(Rng& rng, const RoadNetwork& net) {
  return static_cast<EdgeId>(rng.uniform_int(0, static_cast<std::int64_t>(net.edge_count()) - 1));
}

inline EdgeId random_next(Rng& rng, const RoadNetwork& net, EdgeId e) {
  const auto& next = net.edges_after(e);
  if (next.empty()) throw DataError("gen: dead-end edge in network");
  return next[static_cast<std::size_t>(
      rng.uniform_int(0, static_cast<std::int64_t>(next.size()) - 1))];
}

inline std::vector<SpatialPath> make_patterns(Rng rng, const RoadNetwork& net, int count) {
  std::vector<SpatialPath> pool;
  for (int i = 0; i < count; ++i) {
    SpatialPath p{random_edge(rng, net)};
    const std::int64_t len = rng.uniform_int(3, 8);
    while (static_cast<std::int64_t>(p.size()) < len) p.push_back(random_next(rng, net, p.back()));
    pool.push_back(std::move(p));
  }
  return pool;
}

// Speeds are even multiples of 1/256 m/s in [5,20]; each sample adds a parity
// half-step on top. Consecutive moving samples therefore never share a speed,
// so only genuine stop plateaus are exactly collinear, while every d stays an
// exact multiple of 1/256 and interpolation on kept segments reconstructs
// dropped plateau readings without rounding.
inline double quantized_speed(Rng& rng) {
  return static_cast<double>(1280 + 2 * rng.uniform_int(0, 1920)) / 256.0;
}

}  // namespace detail

// Trajectories are concatenated legs: a canonical shortest path with
// probability sp_bias, otherwise a replayed pool pattern (bridged to the
// current position by a shortest path) or a short random walk. Temporal
// tuples are sampled on a fixed clock from a piecewise speed profile with
// clustered stop runs.
inline std::vector<Trajectory> gen_corpus(const RoadNetwork& net, const SpIndex& sp,
                                          const GenConfig& cfg,
                                          std::vector<int>* leg_counts = nullptr) {
  check_config(cfg);
  Rng base(cfg.seed);
  const std::vector<SpatialPath> patterns =
      detail::make_patterns(base.fork(1), net, cfg.pattern_count);
  if (leg_counts) leg_counts->clear();
  std::vector<Trajectory> corpus;
  const double interval = std::floor(cfg.sample_interval);
  const double stop_entry =
      cfg.stop_fraction > 0.0 ? cfg.stop_fraction / ((1.0 - cfg.stop_fraction) * 20.0) : 0.0;

  for (int idx = 0; idx < cfg.count; ++idx) {
    Rng rng = base.fork(2 + idx);
    const std::int64_t target = rng.uniform_int(cfg.len_min, cfg.len_max);
    SpatialPath path;
    int legs = 0;
    while (static_cast<std::int64_t>(path.size()) < target) {
      ++legs;
      const double u = rng.real01();
      if (u < cfg.sp_bias) {
        const EdgeId to = detail::random_edge(rng, net);
        if (path.empty()) {
          const EdgeId from = detail::random_edge(rng, net);
          path = reconstruct_sp(sp, from, to);
        } else if (to != path.back()) {
          const SpatialPath seg = reconstruct_sp(sp, path.back(), to);
          path.insert(path.end(), seg.begin() + 1, seg.end());
        }
      } else if (rng.real01() < cfg.pattern_reuse) {
        const SpatialPath& p = patterns[static_cast<std::size_t>(
            rng.uniform_int(0, static_cast<std::int64_t>(patterns.size()) - 1))];
        if (path.empty()) {
          path = p;
        } else {
          const SpatialPath bridge = reconstruct_sp(sp, path.back(), p.front());
          path.insert(path.end(), bridge.begin() + 1, bridge.end());
          path.insert(path.end(), p.begin() + 1, p.end());
        }
      } else {
        const std::int64_t steps = rng.uniform_int(3, 10);
        if (path.empty()) path.push_back(detail::random_edge(rng, net));
        for (std::int64_t s = 0; s < steps; ++s)
          path.push_back(detail::random_next(rng, net, path.back()));
      }
    }

    const double total = path_length(net, path);
    TemporalSequence times;
    times.push_back({0.0, 0.0});
    double d = 0.0;
    double t = 0.0;
    double speed = detail::quantized_speed(rng);
    std::int64_t regime_left = rng.uniform_int(10, 40);
    std::int64_t stop_left = 0;
    std::uint64_t sample = 0;
    const std::uint64_t max_samples = 200000;
    while (d < total && sample < max_samples) {
      ++sample;
      t += interval;
      if (stop_left > 0) {
        --stop_left;
      } else {
        if (regime_left-- <= 0) {
          speed = detail::quantized_speed(rng);
          regime_left = rng.uniform_int(10, 40);
        }
        if (stop_entry > 0.0 && rng.real01() < stop_entry) {
          stop_left = rng.uniform_int(10, 30) - 1;
        } else {
          const double step = (speed + static_cast<double>(sample % 2) / 256.0) * interval;
          d = d + step >= total ? total : d + step;
        }
      }
      times.push_back({d, t});
    }
    if (d < total) times.push_back({total, t + interval});

    corpus.push_back({idx, std::move(path), std::move(times)});
    if (leg_counts) leg_counts->push_back(legs);
  }
  return corpus;
}

}  // namespace press
