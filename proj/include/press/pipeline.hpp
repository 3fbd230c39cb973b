#pragma once

#include <chrono>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "press/container.hpp"
#include "press/corpus_gen.hpp"
#include "press/errors.hpp"
#include "press/metrics.hpp"
#include "press/query.hpp"
#include "press/road_network.hpp"
#include "press/spatial_codec.hpp"
#include "press/temporal_codec.hpp"
#include "press/trajectory.hpp"

namespace press {

class Stopwatch {
 public:
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

inline RoadNetwork load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return load_network(in);
}

inline std::vector<Trajectory> load_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return load_corpus(in);
}

inline void check_model_network(const FstModel& model, const RoadNetwork& net) {
  if (model.trie.alphabet != static_cast<std::int32_t>(net.edge_count()))
    throw ModelMismatch("model alphabet does not match network edge count");
}

inline void validate_or_throw(const Trajectory& traj, const RoadNetwork& net) {
  const ValidationReport report = validate(traj, net);
  if (!report.ok())
    throw DataError("trajectory " + std::to_string(traj.id) + ": " + report.issues.front());
}

// ---------------------------------------------------------------------------
// Command cores. The CLI wraps these; tests call them directly.
// ---------------------------------------------------------------------------

struct TrainReport {
  std::size_t nodes = 0;
  int theta = 0;
  std::uint64_t model_bytes = 0;
  double train_ms = 0.0;
};

inline TrainReport cmd_train(const std::string& network_path, const std::string& corpus_path,
                             int theta, const std::string& out_path) {
  const Stopwatch clock;
  const RoadNetwork net = load_network_file(network_path);
  const SpIndex sp = build_sp_index(net);
  const std::vector<Trajectory> corpus = load_corpus_file(corpus_path);
  if (corpus.empty()) throw DataError("training corpus is empty");
  std::vector<SpatialPath> sp_corpus;
  sp_corpus.reserve(corpus.size());
  for (const Trajectory& traj : corpus) {
    validate_or_throw(traj, net);
    sp_corpus.push_back(sp_compress(traj.path, sp, net));
  }
  FstModel model = train_fst_model(sp_corpus, theta, net);
  build_query_index(model, sp, net);
  save_model_file(out_path, model);
  TrainReport report;
  report.nodes = model.trie.size();
  report.theta = theta;
  report.model_bytes = [&] {
    std::ifstream in(out_path, std::ios::binary | std::ios::ate);
    return static_cast<std::uint64_t>(in.tellg());
  }();
  report.train_ms = clock.ms();
  return report;
}

// Declared baseline: 4 bytes per spatial edge id plus 16 bytes per temporal
// tuple; compressed records cost their byte-aligned bitstream plus 16 bytes
// per retained tuple. Undefined ratios (empty denominators) stay unset.
struct CompressionStats {
  std::uint64_t trajectories = 0;
  std::uint64_t edges_in = 0;
  std::uint64_t edges_after_sp = 0;
  std::uint64_t spatial_bits = 0;
  std::uint64_t spatial_bytes = 0;
  std::uint64_t tuples_in = 0;
  std::uint64_t tuples_out = 0;
  std::optional<double> alpha, gamma, beta, spatial_ratio, overall_ratio;
  double sp_ms = 0.0, fst_ms = 0.0, btc_ms = 0.0;

  void finalize() {
    const auto ratio = [](double num, double den) {
      return den > 0.0 ? std::optional<double>(num / den) : std::nullopt;
    };
    alpha = ratio(static_cast<double>(edges_in), static_cast<double>(edges_after_sp));
    gamma = ratio(4.0 * static_cast<double>(edges_after_sp), static_cast<double>(spatial_bytes));
    beta = ratio(static_cast<double>(tuples_in), static_cast<double>(tuples_out));
    spatial_ratio =
        ratio(4.0 * static_cast<double>(edges_in), static_cast<double>(spatial_bytes));
    overall_ratio =
        ratio(4.0 * static_cast<double>(edges_in) + 16.0 * static_cast<double>(tuples_in),
              static_cast<double>(spatial_bytes) + 16.0 * static_cast<double>(tuples_out));
  }
};

inline CompressedTrajectory compress_one(const Trajectory& traj, const SpIndex& sp,
                                         const RoadNetwork& net, const FstModel& model,
                                         const BtcConfig& cfg) {
  CompressedTrajectory ct;
  ct.id = traj.id;
  ct.spatial = fst_encode(sp_compress(traj.path, sp, net), model);
  ct.temporal = btc_compress(traj.times, cfg);
  return ct;
}

inline Trajectory decompress_one(const CompressedTrajectory& ct, const SpIndex& sp,
                                 const FstModel& model) {
  return {ct.id, hsc_decompress(ct.spatial, sp, model), ct.temporal};
}

inline CompressionStats compress_corpus(const std::vector<Trajectory>& corpus, const SpIndex& sp,
                                        const RoadNetwork& net, const FstModel& model,
                                        const BtcConfig& cfg,
                                        std::vector<CompressedTrajectory>& out) {
  CompressionStats stats;
  out.clear();
  out.reserve(corpus.size());
  for (const Trajectory& traj : corpus) {
    validate_or_throw(traj, net);
    CompressedTrajectory ct;
    ct.id = traj.id;
    const Stopwatch sp_clock;
    const SpatialPath kept = sp_compress(traj.path, sp, net);
    stats.sp_ms += sp_clock.ms();
    const Stopwatch fst_clock;
    ct.spatial = fst_encode(kept, model);
    stats.fst_ms += fst_clock.ms();
    const Stopwatch btc_clock;
    ct.temporal = btc_compress(traj.times, cfg);
    stats.btc_ms += btc_clock.ms();
    stats.trajectories += 1;
    stats.edges_in += traj.path.size();
    stats.edges_after_sp += kept.size();
    stats.spatial_bits += ct.spatial.bit_count;
    stats.spatial_bytes += (ct.spatial.bit_count + 7) / 8;
    stats.tuples_in += traj.times.size();
    stats.tuples_out += ct.temporal.size();
    out.push_back(std::move(ct));
  }
  stats.finalize();
  return stats;
}

inline CompressionStats cmd_compress(const std::string& model_path,
                                     const std::string& network_path,
                                     const std::string& corpus_path, double tau, double eta,
                                     const std::string& out_path) {
  const FstModel model = load_model_file(model_path);
  const std::uint64_t model_hash = hash_file(model_path);
  const RoadNetwork net = load_network_file(network_path);
  check_model_network(model, net);
  const SpIndex sp = build_sp_index(net);
  const std::vector<Trajectory> corpus = load_corpus_file(corpus_path);
  std::vector<CompressedTrajectory> out;
  const CompressionStats stats = compress_corpus(corpus, sp, net, model, {tau, eta}, out);
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw DataError("cannot write " + out_path);
  write_compressed_corpus(file, model_hash, out);
  return stats;
}

inline void cmd_decompress(const std::string& model_path, const std::string& network_path,
                           const std::string& compressed_path, const std::string& out_path) {
  const FstModel model = load_model_file(model_path);
  const std::uint64_t model_hash = hash_file(model_path);
  const RoadNetwork net = load_network_file(network_path);
  check_model_network(model, net);
  const SpIndex sp = build_sp_index(net);
  std::ifstream in(compressed_path, std::ios::binary);
  if (!in) throw DataError("cannot open " + compressed_path);
  const std::vector<CompressedTrajectory> records = read_compressed_corpus(in, model_hash);
  std::vector<Trajectory> corpus;
  corpus.reserve(records.size());
  for (const CompressedTrajectory& ct : records) corpus.push_back(decompress_one(ct, sp, model));
  std::ofstream out(out_path);
  if (!out) throw DataError("cannot write " + out_path);
  save_corpus(out, corpus);
}

struct QueryReport {
  std::uint64_t queries = 0;
  std::uint64_t agreements = 0;
  double max_where_err = 0.0;
  double max_when_err = 0.0;
  std::uint64_t range_mismatches = 0;
};

// Executes a query batch. With `reference`, each answer is recomputed by the
// linear-scan oracle on the decompressed trajectory and compared.
inline QueryReport cmd_query(const std::string& model_path, const std::string& network_path,
                             const std::string& compressed_path, std::istream& batch,
                             std::ostream& out, bool reference) {
  const FstModel model = load_model_file(model_path);
  const std::uint64_t model_hash = hash_file(model_path);
  const RoadNetwork net = load_network_file(network_path);
  check_model_network(model, net);
  const SpIndex sp = build_sp_index(net);
  FstModel indexed = model;
  const QueryIndex qi = build_query_index(indexed, sp, net);
  std::ifstream in(compressed_path, std::ios::binary);
  if (!in) throw DataError("cannot open " + compressed_path);
  const std::vector<CompressedTrajectory> records = read_compressed_corpus(in, model_hash);
  std::map<std::int64_t, std::size_t> by_id;
  for (std::size_t i = 0; i < records.size(); ++i) by_id[records[i].id] = i;
  std::map<std::int64_t, Trajectory> decompressed;
  const auto original = [&](std::int64_t id) -> const Trajectory& {
    auto it = decompressed.find(id);
    if (it == decompressed.end())
      it = decompressed.emplace(id, decompress_one(records[by_id.at(id)], sp, indexed)).first;
    return it->second;
  };

  QueryReport report;
  out << std::setprecision(17);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(batch, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string kind;
    std::int64_t id = 0;
    fields >> kind >> id;
    if (!fields) throw DataError("query line " + std::to_string(line_no) + ": malformed");
    if (!by_id.count(id))
      throw DataError("query line " + std::to_string(line_no) + ": unknown trajectory id");
    const CompressedTrajectory& ct = records[by_id.at(id)];
    ++report.queries;
    if (kind == "WHEREAT") {
      double t = 0.0;
      fields >> t;
      if (!fields) throw DataError("query line " + std::to_string(line_no) + ": malformed");
      const NetworkPoint p = where_at(ct, t, qi);
      out << "WHEREAT " << id << ' ' << t << ' ' << p.edge << ' ' << p.offset << ' ' << p.pos.x
          << ' ' << p.pos.y;
      if (reference) {
        const NetworkPoint r = reference_where_at(original(id), t, net);
        const double err = euclid(p.pos, r.pos);
        report.max_where_err = std::max(report.max_where_err, err);
        if (err <= 1e-9) ++report.agreements;
        out << " ref_edge=" << r.edge << " ref_offset=" << r.offset << " err=" << err;
      }
      out << '\n';
    } else if (kind == "WHENAT") {
      double x = 0.0, y = 0.0;
      fields >> x >> y;
      if (!fields) throw DataError("query line " + std::to_string(line_no) + ": malformed");
      const double t = when_at(ct, {x, y}, qi);
      out << "WHENAT " << id << ' ' << x << ' ' << y << ' ' << t;
      if (reference) {
        const double r = reference_when_at(original(id), {x, y}, net);
        const double err = std::abs(t - r);
        report.max_when_err = std::max(report.max_when_err, err);
        if (err <= 1e-9) ++report.agreements;
        out << " ref=" << r << " err=" << err;
      }
      out << '\n';
    } else if (kind == "RANGE") {
      double t1 = 0.0, t2 = 0.0;
      Mbr rect;
      fields >> t1 >> t2 >> rect.min_x >> rect.min_y >> rect.max_x >> rect.max_y;
      if (!fields) throw DataError("query line " + std::to_string(line_no) + ": malformed");
      const bool hit = range(ct, t1, t2, rect, qi);
      out << "RANGE " << id << ' ' << t1 << ' ' << t2 << ' ' << rect.min_x << ' ' << rect.min_y
          << ' ' << rect.max_x << ' ' << rect.max_y << ' ' << (hit ? 1 : 0);
      if (reference) {
        const bool r = reference_range(original(id), t1, t2, rect, net);
        if (r == hit)
          ++report.agreements;
        else
          ++report.range_mismatches;
        out << " ref=" << (r ? 1 : 0);
      }
      out << '\n';
    } else {
      throw DataError("query line " + std::to_string(line_no) + ": unknown query kind");
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Sweep tables
// ---------------------------------------------------------------------------

namespace detail {

inline std::string csv_opt(const std::optional<double>& v) {
  if (!v) return "NA";
  std::ostringstream s;
  s << std::setprecision(12) << *v;
  return s.str();
}

}  // namespace detail

// Emits two comma-separated tables: per-theta spatial rows (retrained each
// time, with the greedy-vs-optimal encoder gap) and per-(tau,eta) temporal
// rows, all against the declared byte baseline.
inline void cmd_stats(const std::string& network_path, const std::string& corpus_path,
                      const std::vector<int>& thetas, const std::vector<double>& taus,
                      const std::vector<double>& etas, std::ostream& out) {
  const RoadNetwork net = load_network_file(network_path);
  const SpIndex sp = build_sp_index(net);
  const std::vector<Trajectory> corpus = load_corpus_file(corpus_path);
  std::vector<SpatialPath> sp_corpus;
  std::uint64_t edges_in = 0, edges_after = 0, tuples_in = 0;
  for (const Trajectory& traj : corpus) {
    validate_or_throw(traj, net);
    sp_corpus.push_back(sp_compress(traj.path, sp, net));
    edges_in += traj.path.size();
    edges_after += sp_corpus.back().size();
    tuples_in += traj.times.size();
  }

  out << "table,theta,tau,eta,trajectories,edges_in,edges_after_sp,spatial_bytes,greedy_bits,"
         "dp_bits,tuples_in,tuples_out,alpha,gamma,beta,spatial_ratio,overall_ratio,gap,"
         "model_bytes,sp_table_bytes,sp_mbr_bytes\n";
  out << std::setprecision(12);

  for (const int theta : thetas) {
    FstModel model = train_fst_model(sp_corpus, theta, net);
    const QueryIndex qi = build_query_index(model, sp, net);
    std::uint64_t greedy_bits = 0, dp_bits = 0, bytes = 0;
    for (const SpatialPath& path : sp_corpus) {
      const std::uint64_t bits = fst_encode(path, model).bit_count;
      greedy_bits += bits;
      dp_bits += fst_encode_optimal(path, model).bit_count;
      bytes += (bits + 7) / 8;
    }
    std::ostringstream model_stream;
    save_model(model_stream, model);
    CompressionStats s;
    s.trajectories = corpus.size();
    s.edges_in = edges_in;
    s.edges_after_sp = edges_after;
    s.spatial_bytes = bytes;
    s.tuples_in = tuples_in;
    s.tuples_out = tuples_in;
    s.finalize();
    out << "fst," << theta << ",,," << s.trajectories << ',' << edges_in << ',' << edges_after
        << ',' << bytes << ',' << greedy_bits << ',' << dp_bits << ',' << tuples_in << ','
        << tuples_in << ',' << detail::csv_opt(s.alpha) << ',' << detail::csv_opt(s.gamma) << ','
        << detail::csv_opt(s.beta) << ',' << detail::csv_opt(s.spatial_ratio) << ','
        << detail::csv_opt(s.overall_ratio) << ','
        << (dp_bits > 0 ? detail::csv_opt(static_cast<double>(greedy_bits) /
                                              static_cast<double>(dp_bits) -
                                          1.0)
                        : "NA")
        << ',' << model_stream.str().size() << ',' << sp.table_bytes() << ',' << qi.sp_mbr_bytes()
        << '\n';
  }

  for (const double tau : taus) {
    for (const double eta : etas) {
      std::uint64_t tuples_out = 0;
      for (const Trajectory& traj : corpus) tuples_out += btc_compress(traj.times, {tau, eta}).size();
      CompressionStats s;
      s.trajectories = corpus.size();
      s.tuples_in = tuples_in;
      s.tuples_out = tuples_out;
      s.finalize();
      out << "btc,," << tau << ',' << eta << ',' << corpus.size() << ",,,,,," << tuples_in << ','
          << tuples_out << ",,," << detail::csv_opt(s.beta) << ",,,,,,\n";
    }
  }
}

struct GenReport {
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::size_t trajectories = 0;
};

inline GenReport cmd_gen(const GenConfig& cfg, const std::string& out_network,
                         const std::string& out_corpus) {
  const RoadNetwork net = gen_network(cfg);
  const SpIndex sp = build_sp_index(net);
  const std::vector<Trajectory> corpus = gen_corpus(net, sp, cfg);
  std::ofstream nf(out_network);
  if (!nf) throw DataError("cannot write " + out_network);
  save_network(nf, net);
  std::ofstream cf(out_corpus);
  if (!cf) throw DataError("cannot write " + out_corpus);
  save_corpus(cf, corpus);
  return {net.vertex_count(), net.edge_count(), corpus.size()};
}

}  // namespace press
