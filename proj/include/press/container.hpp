#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "press/errors.hpp"
#include "press/query.hpp"
#include "press/spatial_codec.hpp"

namespace press {

static_assert(std::numeric_limits<double>::is_iec559, "binary doubles assume IEEE-754");

namespace detail {

inline void put_u8(std::ostream& out, std::uint8_t v) {
  out.put(static_cast<char>(v));
}

inline void put_u32(std::ostream& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_u64(std::ostream& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_i32(std::ostream& out, std::int32_t v) {
  put_u32(out, static_cast<std::uint32_t>(v));
}

inline void put_f64(std::ostream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

inline std::uint8_t get_u8(std::istream& in) {
  const int c = in.get();
  if (c == std::char_traits<char>::eof()) throw DataError("unexpected end of file");
  return static_cast<std::uint8_t>(c);
}

inline std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(get_u8(in)) << (8 * i);
  return v;
}

inline std::uint64_t get_u64(std::istream& in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(get_u8(in)) << (8 * i);
  return v;
}

inline std::int32_t get_i32(std::istream& in) {
  return static_cast<std::int32_t>(get_u32(in));
}

inline double get_f64(std::istream& in) {
  const std::uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace detail

inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = 1469598103934665603ull;
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::vector<char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a64(buf.data(), buf.size());
}

// Model container: magic "PRSM", version, theta, alphabet, then per node
// parent, label, frequency, failure link, code length, decompressed length,
// extent. Codes and the decoder are canonical so lengths alone rebuild them.
inline void save_model(std::ostream& out, const FstModel& model) {
  out.write("PRSM", 4);
  detail::put_u32(out, 1);
  detail::put_u32(out, static_cast<std::uint32_t>(model.trie.theta));
  detail::put_i32(out, model.trie.alphabet);
  detail::put_u64(out, model.trie.size());
  for (std::size_t i = 0; i < model.trie.size(); ++i) {
    const TrieNode& n = model.trie.nodes[i];
    detail::put_i32(out, n.parent);
    detail::put_i32(out, n.label);
    detail::put_u64(out, n.freq);
    detail::put_i32(out, model.automaton.suffix[i]);
    detail::put_u8(out, i < model.codebook.length.size() ? model.codebook.length[i] : 0);
    detail::put_f64(out, i < model.node_dist.size() ? model.node_dist[i] : 0.0);
    const Mbr m = i < model.node_mbr.size() ? model.node_mbr[i] : Mbr{};
    detail::put_f64(out, m.min_x);
    detail::put_f64(out, m.min_y);
    detail::put_f64(out, m.max_x);
    detail::put_f64(out, m.max_y);
  }
  if (!out) throw DataError("model write failed");
}

inline FstModel load_model(std::istream& in) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "PRSM", 4) != 0) throw DataError("not a model file");
  if (detail::get_u32(in) != 1) throw DataError("unsupported model version");
  FstModel model;
  model.trie.theta = static_cast<int>(detail::get_u32(in));
  model.trie.alphabet = detail::get_i32(in);
  const std::uint64_t count = detail::get_u64(in);
  if (model.trie.theta < 1 || model.trie.alphabet < 1 || count < 1 || count > (1ull << 31))
    throw DataError("model header out of range");
  model.trie.nodes.resize(count);
  model.automaton.suffix.resize(count);
  model.codebook.length.resize(count);
  model.codebook.code.assign(count, 0);
  model.node_dist.resize(count);
  model.node_mbr.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    TrieNode& n = model.trie.nodes[i];
    n.parent = detail::get_i32(in);
    n.label = detail::get_i32(in);
    n.freq = detail::get_u64(in);
    model.automaton.suffix[i] = detail::get_i32(in);
    model.codebook.length[i] = detail::get_u8(in);
    model.node_dist[i] = detail::get_f64(in);
    Mbr& m = model.node_mbr[i];
    m.min_x = detail::get_f64(in);
    m.min_y = detail::get_f64(in);
    m.max_x = detail::get_f64(in);
    m.max_y = detail::get_f64(in);
    if (i == 0) {
      if (n.parent != -1 || n.label != kNoEdge) throw DataError("model root malformed");
      continue;
    }
    if (n.parent < 0 || static_cast<std::uint64_t>(n.parent) >= i)
      throw DataError("model parent out of order");
    if (n.label < 0 || n.label >= model.trie.alphabet) throw DataError("model label out of range");
    n.depth = model.trie.nodes[static_cast<std::size_t>(n.parent)].depth + 1;
    if (n.depth > model.trie.theta) throw DataError("model node deeper than theta");
    if (model.automaton.suffix[i] < 0 || static_cast<std::uint64_t>(model.automaton.suffix[i]) >= count)
      throw DataError("model failure link out of range");
    auto& slot = model.trie.nodes[static_cast<std::size_t>(n.parent)].children[n.label];
    if (slot != 0) throw DataError("model has duplicate children");
    slot = static_cast<std::int32_t>(i);
  }
  for (std::uint64_t i = 1; i < count; ++i) {
    const std::int32_t f = model.automaton.suffix[i];
    if (model.trie.nodes[static_cast<std::size_t>(f)].depth >= model.trie.nodes[i].depth)
      throw DataError("model failure link does not shorten");
  }
  // Canonical code values are a function of the stored lengths.
  std::vector<std::uint32_t> ids;
  for (std::uint64_t i = 1; i < count; ++i) {
    if (model.codebook.length[i] == 0) throw DataError("model code length missing");
    ids.push_back(static_cast<std::uint32_t>(i));
  }
  std::sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
    return model.codebook.length[a] != model.codebook.length[b]
               ? model.codebook.length[a] < model.codebook.length[b]
               : a < b;
  });
  std::uint64_t code = 0;
  std::uint8_t prev = model.codebook.length[ids[0]];
  for (std::size_t k = 0; k < ids.size(); ++k) {
    code <<= (model.codebook.length[ids[k]] - prev);
    prev = model.codebook.length[ids[k]];
    model.codebook.code[ids[k]] = code;
    ++code;
  }
  model.rebuild_decoder();
  return model;
}

inline void save_model_file(const std::string& path, const FstModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  save_model(out, model);
}

inline FstModel load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return load_model(in);
}

// Compressed corpus container: magic "PRSC", version, hash of the model file
// it was compressed under, then byte-aligned records.
inline void write_compressed_corpus(std::ostream& out, std::uint64_t model_hash,
                                    const std::vector<CompressedTrajectory>& corpus) {
  out.write("PRSC", 4);
  detail::put_u32(out, 1);
  detail::put_u64(out, model_hash);
  detail::put_u64(out, corpus.size());
  for (const CompressedTrajectory& ct : corpus) {
    detail::put_u64(out, static_cast<std::uint64_t>(ct.id));
    detail::put_u64(out, ct.spatial.bit_count);
    const std::size_t nbytes = (ct.spatial.bit_count + 7) / 8;
    if (ct.spatial.bits.size() != nbytes) throw DataError("record bit count inconsistent");
    out.write(reinterpret_cast<const char*>(ct.spatial.bits.data()),
              static_cast<std::streamsize>(nbytes));
    detail::put_u32(out, static_cast<std::uint32_t>(ct.temporal.size()));
    for (const TemporalTuple& tp : ct.temporal) {
      detail::put_f64(out, tp.d);
      detail::put_f64(out, tp.t);
    }
  }
  if (!out) throw DataError("compressed corpus write failed");
}

inline std::vector<CompressedTrajectory> read_compressed_corpus(std::istream& in,
                                                                std::uint64_t expected_hash) {
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "PRSC", 4) != 0) throw DataError("not a compressed corpus file");
  if (detail::get_u32(in) != 1) throw DataError("unsupported compressed corpus version");
  const std::uint64_t hash = detail::get_u64(in);
  if (hash != expected_hash)
    throw ModelMismatch("compressed corpus was built under a different model");
  const std::uint64_t count = detail::get_u64(in);
  std::vector<CompressedTrajectory> corpus;
  corpus.reserve(count < (1ull << 20) ? count : 0);
  for (std::uint64_t i = 0; i < count; ++i) {
    CompressedTrajectory ct;
    ct.id = static_cast<std::int64_t>(detail::get_u64(in));
    ct.spatial.bit_count = detail::get_u64(in);
    const std::size_t nbytes = (ct.spatial.bit_count + 7) / 8;
    ct.spatial.bits.resize(nbytes);
    in.read(reinterpret_cast<char*>(ct.spatial.bits.data()), static_cast<std::streamsize>(nbytes));
    if (!in) throw DataError("unexpected end of file");
    const std::uint32_t tuples = detail::get_u32(in);
    ct.temporal.reserve(tuples);
    for (std::uint32_t k = 0; k < tuples; ++k) {
      const double d = detail::get_f64(in);
      const double t = detail::get_f64(in);
      ct.temporal.push_back({d, t});
    }
    corpus.push_back(std::move(ct));
  }
  return corpus;
}

}  // namespace press
