#pragma once

// Shared fixtures and independent oracles. Oracles deliberately use different
// algorithms than the library (Bellman-Ford instead of Dijkstra, exhaustive
// enumeration instead of greedy/DP) so agreement is meaningful.

#include <sys/wait.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "press/corpus_gen.hpp"
#include "press/rng.hpp"
#include "press/road_network.hpp"
#include "press/spatial_codec.hpp"
#include "press/trajectory.hpp"

namespace testsupport {

using namespace press;

// 3x4 grid, 12 vertices, 17 directed edges; weights 1 except edges 1, 4, 15
// (weight 3). Built so the canonical shortest paths used in the documented
// examples are unique.
inline std::string sample_network_text() {
  return R"(# sample 3x4 grid
V 0 0 2
V 1 1 2
V 2 2 2
V 3 3 2
V 4 0 1
V 5 1 1
V 6 2 1
V 7 3 1
V 8 0 0
V 9 1 0
V 10 2 0
V 11 3 0
E 0 0 1 1
E 1 1 2 3
E 2 2 3 1
E 3 4 0 1
E 4 5 1 3
E 5 6 2 1
E 6 7 3 1
E 7 4 5 1
E 8 5 6 1
E 9 6 7 1
E 10 8 4 1
E 11 9 5 1
E 12 10 6 1
E 13 11 7 1
E 14 8 9 1
E 15 9 10 3
E 16 10 11 1
)";
}

// `edges` unit-weight edges in a straight line. Used where only the edge
// alphabet matters.
inline std::string chain_network_text(int edges) {
  std::ostringstream out;
  for (int v = 0; v <= edges; ++v) out << "V " << v << ' ' << v << " 0\n";
  for (int e = 0; e < edges; ++e) out << "E " << e << ' ' << e << ' ' << (e + 1) << " 1\n";
  return out.str();
}

inline RoadNetwork net_from_text(const std::string& text) {
  std::istringstream in(text);
  return load_network(in);
}

// Training corpus of the documented trie example (10-edge alphabet).
inline std::vector<SpatialPath> trie_corpus() {
  return {{0, 4, 7, 5, 2}, {0, 4, 1, 0, 3, 7}, {1, 0, 3, 5}};
}

struct TrieRow {
  std::int32_t id;
  std::vector<EdgeId> str;
  std::uint64_t freq;
};

// Full expected trie for trie_corpus() at theta=3: 27 nodes plus the root.
inline std::vector<TrieRow> expected_trie_rows() {
  return {
      {1, {0}, 4},        {2, {0, 4}, 2},     {3, {0, 4, 7}, 1},  {4, {4}, 2},
      {5, {4, 7}, 1},     {6, {4, 7, 5}, 1},  {7, {7}, 2},        {8, {7, 5}, 1},
      {9, {7, 5, 2}, 1},  {10, {0, 4, 1}, 1}, {11, {4, 1}, 1},    {12, {4, 1, 0}, 1},
      {13, {1}, 2},       {14, {1, 0}, 2},    {15, {1, 0, 3}, 2}, {16, {0, 3}, 2},
      {17, {0, 3, 7}, 1}, {18, {0, 3, 5}, 1}, {19, {2}, 1},       {20, {3}, 2},
      {21, {5}, 2},       {22, {6}, 0},       {23, {8}, 0},       {24, {9}, 0},
      {25, {5, 2}, 1},    {26, {3, 7}, 1},    {27, {3, 5}, 1},
  };
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

// Edge-graph shortest distance by Bellman-Ford: excludes the source weight,
// includes the target weight. Infinity when unreachable.
inline double oracle_sp_dist(const RoadNetwork& net, EdgeId s, EdgeId t) {
  const std::size_t n = net.edge_count();
  std::vector<double> dist(n, kInf);
  dist[static_cast<std::size_t>(s)] = 0.0;
  for (std::size_t pass = 0; pass + 1 < n || pass == 0; ++pass) {
    bool changed = false;
    for (std::size_t u = 0; u < n; ++u) {
      if (dist[u] == kInf) continue;
      for (EdgeId v : net.edges_after(static_cast<EdgeId>(u))) {
        const double nd = dist[u] + net.weight(v);
        if (nd < dist[static_cast<std::size_t>(v)]) {
          dist[static_cast<std::size_t>(v)] = nd;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  return dist[static_cast<std::size_t>(t)];
}

// Smallest subsequence (first and last edge kept) whose splice decompression
// reproduces the path. Exhaustive over interior subsets; |path| <= ~16.
inline std::size_t oracle_min_kept(const SpIndex& sp, const SpatialPath& path) {
  if (path.size() <= 2) return path.size();
  const std::size_t interior = path.size() - 2;
  std::size_t best = path.size();
  for (std::uint64_t mask = 0; mask < (1ull << interior); ++mask) {
    SpatialPath kept{path.front()};
    for (std::size_t i = 0; i < interior; ++i)
      if (mask & (1ull << i)) kept.push_back(path[i + 1]);
    kept.push_back(path.back());
    if (kept.size() >= best) continue;
    try {
      if (sp_decompress(kept, sp) == path) best = kept.size();
    } catch (const DataError&) {
    }
  }
  return best;
}

// Deepest proper suffix of node's string present in the trie, by direct walk.
inline std::int32_t brute_suffix(const Trie& trie, std::int32_t node) {
  const std::vector<EdgeId> s = trie.string_of(node);
  for (std::size_t k = 1; k < s.size(); ++k) {
    const std::int32_t hit = trie.walk(s.data() + k, s.size() - k);
    if (hit >= 0) return hit;
  }
  return 0;
}

// Minimum total code bits over every split of the path into trie units.
// Plain recursion over all segmentations; fine for |path| <= ~14.
inline std::uint64_t oracle_min_bits(const FstModel& model, const SpatialPath& path,
                                     std::size_t from = 0) {
  if (from == path.size()) return 0;
  std::uint64_t best = ~0ull;
  std::int32_t node = 0;
  for (std::size_t len = 1; from + len <= path.size(); ++len) {
    node = model.trie.child(node, path[from + len - 1]);
    if (node < 0) break;
    const std::uint64_t rest = oracle_min_bits(model, path, from + len);
    if (rest != ~0ull) {
      const std::uint64_t c = model.codebook.length[static_cast<std::size_t>(node)] + rest;
      if (c < best) best = c;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Random instances
// ---------------------------------------------------------------------------

// Strongly connected digraph: a Hamiltonian vertex cycle plus random chords,
// integer weights in [1, 9]. Every edge can extend to a walk of any length.
inline RoadNetwork random_network(Rng& rng, int vertices, int extra_edges) {
  std::vector<Vertex> vs;
  for (int v = 0; v < vertices; ++v)
    vs.push_back({v, {static_cast<double>(v % 5), static_cast<double>(v / 5)}});
  std::vector<Edge> es;
  auto add = [&](VertexId a, VertexId b) {
    es.push_back({static_cast<EdgeId>(es.size()), a, b,
                  static_cast<double>(rng.uniform_int(1, 9))});
  };
  for (int v = 0; v < vertices; ++v) add(v, (v + 1) % vertices);
  for (int k = 0; k < extra_edges; ++k) {
    const VertexId a = static_cast<VertexId>(rng.uniform_int(0, vertices - 1));
    VertexId b = static_cast<VertexId>(rng.uniform_int(0, vertices - 1));
    if (b == a) b = (a + 1) % vertices;  // self-loops are not valid network input
    add(a, b);
  }
  return RoadNetwork(std::move(vs), std::move(es));
}

inline SpatialPath random_walk(Rng& rng, const RoadNetwork& net, std::size_t len) {
  SpatialPath path{static_cast<EdgeId>(
      rng.uniform_int(0, static_cast<std::int64_t>(net.edge_count()) - 1))};
  while (path.size() < len) {
    const auto& next = net.edges_after(path.back());
    path.push_back(next[static_cast<std::size_t>(
        rng.uniform_int(0, static_cast<std::int64_t>(next.size()) - 1))]);
  }
  return path;
}

// ---------------------------------------------------------------------------
// Files and subprocesses
// ---------------------------------------------------------------------------

struct TempDir {
  std::string path;

  TempDir() {
    char tmpl[] = "/tmp/press_test_XXXXXX";
    const char* p = ::mkdtemp(tmpl);
    if (!p) throw std::runtime_error("mkdtemp failed");
    path = p;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return path + "/" + name; }
};

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// CLI binary under test, injected by the build.
inline std::string press_cli() {
  const char* p = std::getenv("PRESS_CLI");
  return p ? p : "";
}

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

inline CliResult run_cli(const std::string& args, const TempDir& dir,
                         const std::string& stdin_file = "") {
  CliResult res;
  std::string cmd = "'" + press_cli() + "' " + args;
  if (!stdin_file.empty()) cmd += " < '" + stdin_file + "'";
  cmd += " > '" + dir.file("cli_out.txt") + "' 2> '" + dir.file("cli_err.txt") + "'";
  const int status = std::system(cmd.c_str());
  res.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  res.out = read_file(dir.file("cli_out.txt"));
  res.err = read_file(dir.file("cli_err.txt"));
  return res;
}

// Writes a generated network + corpus pair into dir and returns their paths.
inline std::pair<std::string, std::string> gen_files(const TempDir& dir, const GenConfig& cfg) {
  const RoadNetwork net = gen_network(cfg);
  const SpIndex sp = build_sp_index(net);
  const std::vector<Trajectory> corpus = gen_corpus(net, sp, cfg);
  const std::string net_path = dir.file("network.txt");
  const std::string corpus_path = dir.file("corpus.txt");
  std::ofstream nf(net_path);
  save_network(nf, net);
  std::ofstream cf(corpus_path);
  save_corpus(cf, corpus);
  return {net_path, corpus_path};
}

}  // namespace testsupport
