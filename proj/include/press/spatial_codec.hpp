#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <vector>

#include "press/bitstream.hpp"
#include "press/errors.hpp"
#include "press/geometry.hpp"
#include "press/road_network.hpp"
#include "press/trajectory.hpp"

namespace press {

// ---------------------------------------------------------------------------
// Shortest-path stage
// ---------------------------------------------------------------------------

// Drops every edge that is implied by the canonical shortest path between its
// neighbors in the output. Greedy skip is optimal: the result is a shortest
// possible subsequence that still decompresses exactly (the kept-edge pairs
// always bound canonical shortest-path runs, and the predecessor tables are
// one shortest-path tree per source, so recorded paths extend edge by edge).
inline SpatialPath sp_compress(const SpatialPath& path, const SpIndex& sp,
                               const RoadNetwork& net) {
  if (path.empty()) throw DataError("sp_compress on empty path");
  for (EdgeId e : path)
    if (!net.has_edge(e)) throw DataError("sp_compress: edge " + std::to_string(e) + " not in network");
  for (std::size_t i = 0; i + 1 < path.size(); ++i)
    if (!net.adjacent(path[i], path[i + 1]))
      throw DataError("sp_compress: path edges " + std::to_string(path[i]) + "," +
                      std::to_string(path[i + 1]) + " are not adjacent");
  if (path.size() == 1) return path;
  SpatialPath out;
  out.push_back(path.front());
  std::size_t anchor = 0;
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    if (sp.sp_end(path[anchor], path[i + 1]) != path[i]) {
      out.push_back(path[i]);
      anchor = i;
    }
  }
  out.push_back(path.back());
  return out;
}

// Splices the canonical shortest path between consecutive kept edges.
inline SpatialPath sp_decompress(const SpatialPath& compressed, const SpIndex& sp) {
  if (compressed.empty()) throw DataError("sp_decompress on empty path");
  SpatialPath out;
  out.push_back(compressed.front());
  for (std::size_t i = 0; i + 1 < compressed.size(); ++i) {
    const std::vector<EdgeId> seg = reconstruct_sp(sp, compressed[i], compressed[i + 1]);
    out.insert(out.end(), seg.begin() + 1, seg.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frequent sub-trajectory stage: Trie -> matching automaton -> Huffman codes
// ---------------------------------------------------------------------------

struct TrieNode {
  std::int32_t parent = -1;
  EdgeId label = kNoEdge;
  std::int32_t depth = 0;
  std::uint64_t freq = 0;
  std::map<EdgeId, std::int32_t> children;
};

// Prefix tree of corpus sub-trajectories up to depth theta. Depth 1 always
// covers the whole edge alphabet. Node 0 is the root.
struct Trie {
  std::vector<TrieNode> nodes;
  int theta = 0;
  std::int32_t alphabet = 0;  // network edge count

  std::size_t size() const { return nodes.size(); }

  std::int32_t child(std::int32_t node, EdgeId label) const {
    const auto& c = nodes[static_cast<std::size_t>(node)].children;
    const auto it = c.find(label);
    return it == c.end() ? -1 : it->second;
  }

  // Edge string spelled from the root to `node`.
  std::vector<EdgeId> string_of(std::int32_t node) const {
    std::vector<EdgeId> rev;
    for (std::int32_t n = node; n != 0; n = nodes[static_cast<std::size_t>(n)].parent)
      rev.push_back(nodes[static_cast<std::size_t>(n)].label);
    return {rev.rbegin(), rev.rend()};
  }

  std::int32_t walk(const EdgeId* s, std::size_t len) const {
    std::int32_t n = 0;
    for (std::size_t i = 0; i < len && n >= 0; ++i) n = child(n, s[i]);
    return n;
  }
};

// Builds the trie from (already shortest-path-compressed) corpus paths.
// Every suffix window of length up to theta is inserted and every node on an
// insertion path has its frequency incremented. Node ids are assigned on
// creation in three passes -- full-length windows, then the missing depth-1
// alphabet in ascending edge order, then the shorter tail windows -- so
// equal corpora train to identical, reproducible node numberings.
inline Trie build_trie(const std::vector<SpatialPath>& corpus, int theta, const RoadNetwork& net) {
  if (theta < 1) throw DataError("build_trie: theta must be >= 1");
  if (corpus.empty()) throw DataError("build_trie: empty corpus");
  Trie trie;
  trie.theta = theta;
  trie.alphabet = static_cast<std::int32_t>(net.edge_count());
  trie.nodes.emplace_back();
  auto insert = [&trie](const EdgeId* s, std::size_t len) {
    std::int32_t n = 0;
    for (std::size_t i = 0; i < len; ++i) {
      std::int32_t& slot = trie.nodes[static_cast<std::size_t>(n)].children[s[i]];
      if (slot == 0) {  // map default; node 0 is the root, never a child
        TrieNode node;
        node.parent = n;
        node.label = s[i];
        node.depth = trie.nodes[static_cast<std::size_t>(n)].depth + 1;
        slot = static_cast<std::int32_t>(trie.nodes.size());
        trie.nodes.push_back(node);
      }
      n = slot;
      ++trie.nodes[static_cast<std::size_t>(n)].freq;
    }
  };
  const std::size_t th = static_cast<std::size_t>(theta);
  for (const SpatialPath& path : corpus) {
    if (path.empty()) throw DataError("build_trie: empty path in corpus");
    for (EdgeId e : path)
      if (e < 0 || e >= trie.alphabet)
        throw DataError("build_trie: edge " + std::to_string(e) + " not in network");
    for (std::size_t i = 0; i + th <= path.size(); ++i) insert(path.data() + i, th);
  }
  for (EdgeId e = 0; e < trie.alphabet; ++e) {
    if (trie.child(0, e) < 0) {
      TrieNode node;
      node.parent = 0;
      node.label = e;
      node.depth = 1;
      trie.nodes[0].children[e] = static_cast<std::int32_t>(trie.nodes.size());
      trie.nodes.push_back(node);
    }
  }
  for (const SpatialPath& path : corpus) {
    const std::size_t start = path.size() >= th ? path.size() - th + 1 : 0;
    for (std::size_t i = start; i < path.size(); ++i) insert(path.data() + i, path.size() - i);
  }
  return trie;
}

// Failure links: suffix[n] is the deepest trie node spelling a proper suffix
// of n's string. suffix[root] = -1.
struct AcAutomaton {
  std::vector<std::int32_t> suffix;
};

inline AcAutomaton build_automaton(const Trie& trie) {
  AcAutomaton ac;
  ac.suffix.assign(trie.size(), -1);
  std::queue<std::int32_t> bfs;
  for (const auto& [label, child] : trie.nodes[0].children) {
    ac.suffix[static_cast<std::size_t>(child)] = 0;
    bfs.push(child);
  }
  while (!bfs.empty()) {
    const std::int32_t n = bfs.front();
    bfs.pop();
    for (const auto& [label, child] : trie.nodes[static_cast<std::size_t>(n)].children) {
      std::int32_t f = ac.suffix[static_cast<std::size_t>(n)];
      while (f > 0 && trie.child(f, label) < 0) f = ac.suffix[static_cast<std::size_t>(f)];
      const std::int32_t target = trie.child(f, label);
      ac.suffix[static_cast<std::size_t>(child)] = (target >= 0 && target != child) ? target : 0;
      bfs.push(child);
    }
  }
  return ac;
}

struct Decomposition {
  std::vector<std::int32_t> nodes;    // left-to-right trie units covering the path
  std::vector<std::int32_t> matched;  // forward-pass match stack, bottom to top
};

// Splits the path into trie sub-trajectories. Forward pass records the
// deepest match ending at each edge; the backward pass keeps a match, skips
// the edges it covers, and repeats.
inline Decomposition decompose_full(const Trie& trie, const AcAutomaton& ac,
                                    const SpatialPath& path) {
  if (path.empty()) throw DataError("decompose on empty path");
  Decomposition res;
  res.matched.reserve(path.size());
  std::int32_t n = 0;
  for (std::size_t i = 0; i < path.size();) {
    const std::int32_t child = trie.child(n, path[i]);
    if (child >= 0) {
      res.matched.push_back(child);
      n = child;
      ++i;
    } else if (n != 0) {
      n = ac.suffix[static_cast<std::size_t>(n)];
    } else {
      throw ModelMismatch("decompose: edge " + std::to_string(path[i]) + " not in model alphabet");
    }
  }
  std::int32_t skip = 0;
  for (std::size_t k = res.matched.size(); k-- > 0;) {
    if (skip > 0) {
      --skip;
      continue;
    }
    const std::int32_t m = res.matched[k];
    res.nodes.push_back(m);
    skip = trie.nodes[static_cast<std::size_t>(m)].depth - 1;
  }
  std::reverse(res.nodes.begin(), res.nodes.end());
  return res;
}

inline std::vector<std::int32_t> decompose(const Trie& trie, const AcAutomaton& ac,
                                           const SpatialPath& path) {
  return decompose_full(trie, ac, path).nodes;
}

// Canonical Huffman code per trie node (node 0 excluded). Tree construction
// orders the heap by (weight, id) with merged subtrees numbered past the
// leaves; code values are reassigned canonically by (length, node id).
struct HuffmanCodebook {
  std::vector<std::uint8_t> length;  // indexed by node id, [0] unused
  std::vector<std::uint64_t> code;
};

inline HuffmanCodebook build_codebook(const Trie& trie) {
  const std::size_t n = trie.size() - 1;
  if (n == 0) throw DataError("build_codebook: trie has no nodes");
  HuffmanCodebook book;
  book.length.assign(trie.size(), 0);
  book.code.assign(trie.size(), 0);
  if (n == 1) {
    book.length[1] = 1;
    return book;
  }
  struct Item {
    std::uint64_t weight;
    std::uint64_t order;
    std::int32_t tree;  // index into parent/left arrays
    bool operator>(const Item& o) const {
      return weight != o.weight ? weight > o.weight : order > o.order;
    }
  };
  std::vector<std::int32_t> parent(2 * n - 1, -1);
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  for (std::size_t id = 1; id <= n; ++id)
    heap.push({trie.nodes[id].freq, static_cast<std::uint64_t>(id),
               static_cast<std::int32_t>(id - 1)});
  std::int32_t next_tree = static_cast<std::int32_t>(n);
  std::uint64_t next_order = n + 1;
  while (heap.size() > 1) {
    const Item a = heap.top();
    heap.pop();
    const Item b = heap.top();
    heap.pop();
    parent[static_cast<std::size_t>(a.tree)] = next_tree;
    parent[static_cast<std::size_t>(b.tree)] = next_tree;
    heap.push({a.weight + b.weight, next_order++, next_tree});
    ++next_tree;
  }
  for (std::size_t id = 1; id <= n; ++id) {
    int depth = 0;
    for (std::int32_t t = static_cast<std::int32_t>(id - 1); parent[static_cast<std::size_t>(t)] >= 0;
         t = parent[static_cast<std::size_t>(t)])
      ++depth;
    if (depth > 63) throw DataError("build_codebook: code length exceeds 63 bits");
    book.length[id] = static_cast<std::uint8_t>(depth);
  }
  // Canonical assignment: shortest codes first, node id breaking ties.
  std::vector<std::uint32_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::uint32_t>(i + 1);
  std::sort(ids.begin(), ids.end(), [&](std::uint32_t x, std::uint32_t y) {
    return book.length[x] != book.length[y] ? book.length[x] < book.length[y] : x < y;
  });
  std::uint64_t code = 0;
  std::uint8_t prev_len = book.length[ids[0]];
  for (std::size_t i = 0; i < n; ++i) {
    code <<= (book.length[ids[i]] - prev_len);
    prev_len = book.length[ids[i]];
    book.code[ids[i]] = code;
    ++code;
  }
  return book;
}

// Binary decode trie over the canonical codes.
struct CodeDecoder {
  struct Node {
    std::int32_t next[2] = {-1, -1};
    std::int32_t leaf = -1;
  };
  std::vector<Node> nodes;

  void build(const HuffmanCodebook& book) {
    nodes.assign(1, {});
    for (std::size_t id = 1; id < book.length.size(); ++id) {
      const int len = book.length[id];
      if (len == 0) continue;
      std::int32_t n = 0;
      for (int i = len - 1; i >= 0; --i) {
        if (nodes[static_cast<std::size_t>(n)].leaf >= 0)
          throw DataError("code table is not prefix-free");
        const int b = static_cast<int>((book.code[id] >> i) & 1u);
        std::int32_t slot = nodes[static_cast<std::size_t>(n)].next[b];
        if (slot < 0) {
          slot = static_cast<std::int32_t>(nodes.size());
          nodes.emplace_back();
          nodes[static_cast<std::size_t>(n)].next[b] = slot;
        }
        n = slot;
      }
      Node& leaf = nodes[static_cast<std::size_t>(n)];
      if (leaf.leaf >= 0 || leaf.next[0] >= 0 || leaf.next[1] >= 0)
        throw DataError("code table is not prefix-free");
      leaf.leaf = static_cast<std::int32_t>(id);
    }
  }
};

// Trained spatial model: trie, failure links, codes, and the per-node
// decompressed length/extent tables filled in by build_query_index.
struct FstModel {
  Trie trie;
  AcAutomaton automaton;
  HuffmanCodebook codebook;
  CodeDecoder decoder;
  std::vector<double> node_dist;  // decompressed length excluding the first edge
  std::vector<Mbr> node_mbr;      // extent of the decompressed sub-trajectory

  void rebuild_decoder() { decoder.build(codebook); }
};

inline FstModel train_fst_model(const std::vector<SpatialPath>& sp_corpus, int theta,
                                const RoadNetwork& net) {
  FstModel model;
  model.trie = build_trie(sp_corpus, theta, net);
  model.automaton = build_automaton(model.trie);
  model.codebook = build_codebook(model.trie);
  model.rebuild_decoder();
  model.node_dist.assign(model.trie.size(), 0.0);
  model.node_mbr.assign(model.trie.size(), Mbr{});
  return model;
}

struct CompressedSpatial {
  std::uint64_t bit_count = 0;
  std::vector<std::uint8_t> bits;
};

inline bool operator==(const CompressedSpatial& a, const CompressedSpatial& b) {
  return a.bit_count == b.bit_count && a.bits == b.bits;
}

inline CompressedSpatial fst_encode(const SpatialPath& path, const FstModel& model) {
  const Decomposition dec = decompose_full(model.trie, model.automaton, path);
  BitWriter w;
  for (std::int32_t n : dec.nodes)
    w.push_code(model.codebook.code[static_cast<std::size_t>(n)],
                model.codebook.length[static_cast<std::size_t>(n)]);
  return {w.bit_count(), w.take_bytes()};
}

// Minimum-bit split of the path into trie sub-trajectories, by prefix DP.
// F[k] = best cost of the first k edges; ties prefer the longer last unit.
inline CompressedSpatial fst_encode_optimal(const SpatialPath& path, const FstModel& model) {
  if (path.empty()) throw DataError("fst_encode_optimal on empty path");
  const std::size_t n = path.size();
  const std::uint64_t kBig = ~0ull;
  std::vector<std::uint64_t> cost(n + 1, kBig);
  std::vector<std::size_t> take(n + 1, 0);
  std::vector<std::int32_t> unit(n + 1, -1);
  cost[0] = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if (cost[k] == kBig) continue;
    std::int32_t node = 0;
    for (std::size_t len = 1; len <= static_cast<std::size_t>(model.trie.theta) && k + len <= n;
         ++len) {
      node = model.trie.child(node, path[k + len - 1]);
      if (node < 0) break;
      const std::uint64_t c =
          cost[k] + model.codebook.length[static_cast<std::size_t>(node)];
      if (c < cost[k + len] || (c == cost[k + len] && len > take[k + len])) {
        cost[k + len] = c;
        take[k + len] = len;
        unit[k + len] = node;
      }
    }
  }
  if (cost[n] == kBig)
    throw ModelMismatch("fst_encode_optimal: path contains an edge outside the model alphabet");
  std::vector<std::int32_t> rev;
  for (std::size_t k = n; k > 0; k -= take[k]) rev.push_back(unit[k]);
  BitWriter w;
  for (auto it = rev.rbegin(); it != rev.rend(); ++it)
    w.push_code(model.codebook.code[static_cast<std::size_t>(*it)],
                model.codebook.length[static_cast<std::size_t>(*it)]);
  return {w.bit_count(), w.take_bytes()};
}

inline SpatialPath fst_decode(const CompressedSpatial& cs, const FstModel& model) {
  if (cs.bit_count == 0) throw DataError("fst_decode: empty bitstream");
  BitReader r(cs.bits, cs.bit_count);
  SpatialPath path;
  while (!r.done()) {
    std::int32_t n = 0;
    while (model.decoder.nodes[static_cast<std::size_t>(n)].leaf < 0) {
      n = model.decoder.nodes[static_cast<std::size_t>(n)].next[r.next_bit()];
      if (n < 0) throw DataError("fst_decode: bitstream does not decode to whole codes");
    }
    const std::vector<EdgeId> s =
        model.trie.string_of(model.decoder.nodes[static_cast<std::size_t>(n)].leaf);
    path.insert(path.end(), s.begin(), s.end());
  }
  return path;
}

// ---------------------------------------------------------------------------
// Hybrid pipeline
// ---------------------------------------------------------------------------

inline CompressedSpatial hsc_compress(const SpatialPath& path, const SpIndex& sp,
                                      const RoadNetwork& net, const FstModel& model) {
  return fst_encode(sp_compress(path, sp, net), model);
}

inline SpatialPath hsc_decompress(const CompressedSpatial& cs, const SpIndex& sp,
                                  const FstModel& model) {
  return sp_decompress(fst_decode(cs, model), sp);
}

}  // namespace press
