#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "press/pipeline.hpp"
#include "support.hpp"

using namespace press;
using namespace testsupport;

namespace {

// Generated files plus a trained model, shared by the command-layer tests.
struct PipeRig {
  TempDir dir;
  GenConfig cfg;
  std::string net_path, corpus_path, model_path;

  explicit PipeRig(int count = 30, int theta = 3) {
    cfg.seed = 7;
    cfg.rows = 6;
    cfg.cols = 6;
    cfg.count = count;
    auto files = gen_files(dir, cfg);
    net_path = files.first;
    corpus_path = files.second;
    model_path = dir.file("model.bin");
    cmd_train(net_path, corpus_path, theta, model_path);
  }
};

FstModel trained_model(const PipeRig& rig) { return load_model_file(rig.model_path); }

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// Batch of queries whose answers exist on every trajectory: a mid-span
// position lookup, a time lookup at a visited point, and a whole-world
// window. Returns the batch text and the query count.
std::pair<std::string, int> make_batch(const std::vector<Trajectory>& corpus,
                                       const RoadNetwork& net, std::size_t take) {
  std::ostringstream batch;
  batch << std::setprecision(17);
  const Mbr world = [&] {
    Mbr m;
    for (std::size_t e = 0; e < net.edge_count(); ++e) m.expand(net.edge_mbr(static_cast<EdgeId>(e)));
    return m;
  }();
  int queries = 0;
  for (std::size_t k = 0; k < corpus.size() && k < take; ++k) {
    const Trajectory& traj = corpus[k];
    const double t_mid = 0.5 * traj.times.back().t;
    batch << "WHEREAT " << traj.id << ' ' << t_mid << '\n';
    const NetworkPoint p = reference_where_at(traj, t_mid, net);
    batch << "WHENAT " << traj.id << ' ' << p.pos.x << ' ' << p.pos.y << '\n';
    batch << "RANGE " << traj.id << " 0 " << traj.times.back().t << ' ' << world.min_x << ' '
          << world.min_y << ' ' << world.max_x << ' ' << world.max_y << '\n';
    queries += 3;
  }
  return {batch.str(), queries};
}

}  // namespace

TEST_CASE("model container round-trips every table") {
  const PipeRig rig;
  const RoadNetwork net = load_network_file(rig.net_path);
  const FstModel model = trained_model(rig);

  std::stringstream buf;
  save_model(buf, model);
  const FstModel back = load_model(buf);

  REQUIRE(back.trie.size() == model.trie.size());
  CHECK(back.trie.theta == model.trie.theta);
  CHECK(back.trie.alphabet == model.trie.alphabet);
  for (std::size_t i = 0; i < model.trie.size(); ++i) {
    const TrieNode& a = model.trie.nodes[i];
    const TrieNode& b = back.trie.nodes[i];
    CHECK(a.parent == b.parent);
    CHECK(a.label == b.label);
    CHECK(a.depth == b.depth);
    CHECK(a.freq == b.freq);
    CHECK(a.children == b.children);
  }
  CHECK(back.automaton.suffix == model.automaton.suffix);
  CHECK(back.codebook.length == model.codebook.length);
  CHECK(back.codebook.code == model.codebook.code);
  CHECK(back.node_dist == model.node_dist);
  REQUIRE(back.node_mbr.size() == model.node_mbr.size());
  for (std::size_t i = 0; i < model.node_mbr.size(); ++i)
    CHECK(back.node_mbr[i] == model.node_mbr[i]);

  // The reloaded decoder must invert codes produced by the original model.
  const std::vector<Trajectory> corpus = load_corpus_file(rig.corpus_path);
  const SpIndex sp = build_sp_index(net);
  const SpatialPath kept = sp_compress(corpus.front().path, sp, net);
  CHECK(fst_decode(fst_encode(kept, model), back) == fst_decode(fst_encode(kept, back), back));
  CHECK(hsc_decompress(fst_encode(kept, model), sp, back) == corpus.front().path);
}

TEST_CASE("model container rejects corrupt input") {
  const PipeRig rig(10, 2);
  const std::string good = read_file(rig.model_path);

  std::string bad_magic = good;
  bad_magic[0] = 'X';
  std::istringstream m(bad_magic);
  CHECK_THROWS_AS(load_model(m), DataError);

  std::string bad_version = good;
  bad_version[4] = 9;
  std::istringstream v(bad_version);
  CHECK_THROWS_AS(load_model(v), DataError);

  std::istringstream cut(good.substr(0, good.size() / 2));
  CHECK_THROWS_AS(load_model(cut), DataError);

  std::istringstream empty;
  CHECK_THROWS_AS(load_model(empty), DataError);
}

TEST_CASE("compressed corpus container binds records to the model hash") {
  const PipeRig rig(8);
  const RoadNetwork net = load_network_file(rig.net_path);
  const SpIndex sp = build_sp_index(net);
  const FstModel model = trained_model(rig);
  const std::vector<Trajectory> corpus = load_corpus_file(rig.corpus_path);

  std::vector<CompressedTrajectory> records;
  for (const Trajectory& traj : corpus)
    records.push_back(compress_one(traj, sp, net, model, {30.0, 20.0}));

  const std::uint64_t hash = hash_file(rig.model_path);
  std::stringstream buf;
  write_compressed_corpus(buf, hash, records);

  const auto back = read_compressed_corpus(buf, hash);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(back[i].id == records[i].id);
    CHECK(back[i].spatial.bit_count == records[i].spatial.bit_count);
    CHECK(back[i].spatial.bits == records[i].spatial.bits);
    REQUIRE(back[i].temporal.size() == records[i].temporal.size());
    for (std::size_t k = 0; k < records[i].temporal.size(); ++k) {
      CHECK(back[i].temporal[k].d == records[i].temporal[k].d);
      CHECK(back[i].temporal[k].t == records[i].temporal[k].t);
    }
  }

  std::stringstream again;
  write_compressed_corpus(again, hash, records);
  CHECK_THROWS_AS(read_compressed_corpus(again, hash + 1), ModelMismatch);

  std::stringstream third;
  write_compressed_corpus(third, hash, records);
  std::istringstream cut(third.str().substr(0, third.str().size() - 9));
  CHECK_THROWS_AS(read_compressed_corpus(cut, hash), DataError);

  std::istringstream not_corpus("PRSMxxxxxxxxxxxxxxxx");
  CHECK_THROWS_AS(read_compressed_corpus(not_corpus, hash), DataError);
}

TEST_CASE("training is deterministic byte for byte") {
  const PipeRig rig(15);
  const std::string second = rig.dir.file("model2.bin");
  const TrainReport r = cmd_train(rig.net_path, rig.corpus_path, 3, second);
  CHECK(read_file(rig.model_path) == read_file(second));
  CHECK(r.nodes > 0);
  CHECK(r.theta == 3);
  CHECK(r.model_bytes == read_file(second).size());
  CHECK_THROWS_AS(cmd_train(rig.net_path, rig.dir.file("missing.txt"), 3, second), DataError);
}

TEST_CASE("compression statistics are internally consistent") {
  const PipeRig rig(25);
  const RoadNetwork net = load_network_file(rig.net_path);
  const SpIndex sp = build_sp_index(net);
  const FstModel model = trained_model(rig);
  const std::vector<Trajectory> corpus = load_corpus_file(rig.corpus_path);

  std::vector<CompressedTrajectory> out;
  const CompressionStats s = compress_corpus(corpus, sp, net, model, {50.0, 40.0}, out);

  REQUIRE(out.size() == corpus.size());
  CHECK(s.trajectories == corpus.size());
  std::uint64_t edges_in = 0, tuples_in = 0, tuples_out = 0, bytes = 0;
  for (const Trajectory& traj : corpus) edges_in += traj.path.size();
  for (const CompressedTrajectory& ct : out) {
    tuples_out += ct.temporal.size();
    bytes += (ct.spatial.bit_count + 7) / 8;
  }
  for (const Trajectory& traj : corpus) tuples_in += traj.times.size();
  CHECK(s.edges_in == edges_in);
  CHECK(s.tuples_in == tuples_in);
  CHECK(s.tuples_out == tuples_out);
  CHECK(s.spatial_bytes == bytes);

  REQUIRE(s.alpha.has_value());
  REQUIRE(s.gamma.has_value());
  REQUIRE(s.beta.has_value());
  REQUIRE(s.spatial_ratio.has_value());
  REQUIRE(s.overall_ratio.has_value());
  // The spatial ratio factors exactly into the two pipeline stages.
  CHECK(*s.spatial_ratio == Catch::Approx(*s.alpha * *s.gamma).epsilon(1e-12));
  CHECK(*s.beta == Catch::Approx(static_cast<double>(tuples_in) / static_cast<double>(tuples_out))
                       .epsilon(1e-12));
  CHECK(*s.overall_ratio ==
        Catch::Approx((4.0 * static_cast<double>(edges_in) + 16.0 * static_cast<double>(tuples_in)) /
                      (static_cast<double>(bytes) + 16.0 * static_cast<double>(tuples_out)))
            .epsilon(1e-12));
  CHECK(*s.beta >= 1.0);

  std::vector<CompressedTrajectory> none;
  CompressionStats zero = compress_corpus({}, sp, net, model, {0.0, 0.0}, none);
  CHECK(!zero.alpha.has_value());
  CHECK(!zero.overall_ratio.has_value());
  CHECK(detail::csv_opt(zero.alpha) == "NA");
}

TEST_CASE("compress and decompress invert over the command layer") {
  const PipeRig rig(20);
  const std::string comp = rig.dir.file("corpus.prsc");
  const std::string back_path = rig.dir.file("back.txt");
  const double tau = 50.0, eta = 40.0;

  const CompressionStats s = cmd_compress(rig.model_path, rig.net_path, rig.corpus_path, tau, eta, comp);
  CHECK(s.trajectories == 20);
  cmd_decompress(rig.model_path, rig.net_path, comp, back_path);

  const std::vector<Trajectory> original = load_corpus_file(rig.corpus_path);
  const std::vector<Trajectory> back = load_corpus_file(back_path);
  REQUIRE(back.size() == original.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].id == original[i].id);
    CHECK(back[i].path == original[i].path);
    const auto want = btc_compress(original[i].times, {tau, eta});
    REQUIRE(back[i].times.size() == want.size());
    for (std::size_t k = 0; k < want.size(); ++k) {
      CHECK(back[i].times[k].d == want[k].d);
      CHECK(back[i].times[k].t == want[k].t);
    }
  }
}

TEST_CASE("decompress rejects records from a different model") {
  const PipeRig rig(10);
  const std::string comp = rig.dir.file("corpus.prsc");
  cmd_compress(rig.model_path, rig.net_path, rig.corpus_path, 0.0, 0.0, comp);

  const std::string other_model = rig.dir.file("model_theta2.bin");
  cmd_train(rig.net_path, rig.corpus_path, 2, other_model);
  CHECK_THROWS_AS(cmd_decompress(other_model, rig.net_path, comp, rig.dir.file("back.txt")),
                  ModelMismatch);
}

TEST_CASE("query batches agree with the linear-scan reference") {
  const PipeRig rig(25);
  const RoadNetwork net = load_network_file(rig.net_path);
  const std::vector<Trajectory> corpus = load_corpus_file(rig.corpus_path);
  const auto batch = make_batch(corpus, net, 15);

  SECTION("lossless temporal records answer bitwise") {
    const std::string comp = rig.dir.file("zero.prsc");
    cmd_compress(rig.model_path, rig.net_path, rig.corpus_path, 0.0, 0.0, comp);
    std::istringstream in(batch.first);
    std::ostringstream out;
    const QueryReport r = cmd_query(rig.model_path, rig.net_path, comp, in, out, true);
    CHECK(r.queries == static_cast<std::uint64_t>(batch.second));
    CHECK(r.agreements == r.queries);
    CHECK(r.max_where_err == 0.0);
    CHECK(r.max_when_err == 0.0);
    CHECK(r.range_mismatches == 0);

    const auto lines = split_lines(out.str());
    REQUIRE(lines.size() == static_cast<std::size_t>(batch.second));
    for (const std::string& line : lines) {
      if (line.rfind("RANGE ", 0) == 0)
        CHECK(line.find("ref=") != std::string::npos);
      else
        CHECK(line.find("err=") != std::string::npos);
      const bool known = line.rfind("WHEREAT ", 0) == 0 || line.rfind("WHENAT ", 0) == 0 ||
                         line.rfind("RANGE ", 0) == 0;
      CHECK(known);
    }
  }

  SECTION("bounded records stay within the configured tolerances") {
    const std::string comp = rig.dir.file("bounded.prsc");
    cmd_compress(rig.model_path, rig.net_path, rig.corpus_path, 50.0, 40.0, comp);
    std::istringstream in(batch.first);
    std::ostringstream out;
    const QueryReport r = cmd_query(rig.model_path, rig.net_path, comp, in, out, true);
    CHECK(r.queries == static_cast<std::uint64_t>(batch.second));
    // The reference scan runs on the decompressed record, so pruning must
    // not change answers even when the temporal data itself is lossy.
    CHECK(r.agreements == r.queries);
    CHECK(r.max_where_err <= 1e-9);
    CHECK(r.max_when_err <= 1e-9);
    CHECK(r.range_mismatches == 0);
  }

  SECTION("without the reference flag answers are still emitted") {
    const std::string comp = rig.dir.file("plain.prsc");
    cmd_compress(rig.model_path, rig.net_path, rig.corpus_path, 0.0, 0.0, comp);
    std::istringstream in(batch.first);
    std::ostringstream out;
    const QueryReport r = cmd_query(rig.model_path, rig.net_path, comp, in, out, false);
    CHECK(r.queries == static_cast<std::uint64_t>(batch.second));
    CHECK(r.agreements == 0);
    CHECK(split_lines(out.str()).size() == static_cast<std::size_t>(batch.second));
    CHECK(out.str().find("err=") == std::string::npos);
  }
}

TEST_CASE("query batch input errors are reported") {
  const PipeRig rig(5);
  const std::string comp = rig.dir.file("corpus.prsc");
  cmd_compress(rig.model_path, rig.net_path, rig.corpus_path, 0.0, 0.0, comp);

  const auto run = [&](const std::string& text) {
    std::istringstream in(text);
    std::ostringstream out;
    return cmd_query(rig.model_path, rig.net_path, comp, in, out, false);
  };
  CHECK_THROWS_AS(run("WHEREAT 999 10\n"), DataError);
  CHECK_THROWS_AS(run("WHEREAT 0\n"), DataError);
  CHECK_THROWS_AS(run("NEARBY 0 1 2\n"), DataError);
  CHECK_THROWS_AS(run("WHEREAT zero 10\n"), DataError);

  // Comments and blank lines are skipped without being counted.
  const QueryReport r = run("# header\n\nWHEREAT 0 0\n");
  CHECK(r.queries == 1);
}

TEST_CASE("ratio sweep emits the documented table") {
  const PipeRig rig(20);
  std::ostringstream out;
  cmd_stats(rig.net_path, rig.corpus_path, {2, 3}, {0.0, 50.0}, {0.0, 40.0}, out);

  const auto lines = split_lines(out.str());
  REQUIRE(lines.size() == 1 + 2 + 4);
  CHECK(lines[0] ==
        "table,theta,tau,eta,trajectories,edges_in,edges_after_sp,spatial_bytes,greedy_bits,"
        "dp_bits,tuples_in,tuples_out,alpha,gamma,beta,spatial_ratio,overall_ratio,gap,"
        "model_bytes,sp_table_bytes,sp_mbr_bytes");

  for (std::size_t i = 1; i < lines.size(); ++i) CHECK(split_csv(lines[i]).size() == 21);

  const std::vector<std::string> thetas = {"2", "3"};
  for (std::size_t i = 0; i < 2; ++i) {
    const auto f = split_csv(lines[1 + i]);
    CHECK(f[0] == "fst");
    CHECK(f[1] == thetas[i]);
    const double greedy = std::stod(f[8]);
    const double dp = std::stod(f[9]);
    CHECK(greedy >= dp);
    CHECK(std::stod(f[17]) >= 0.0);
    CHECK(std::stod(f[7]) > 0.0);
    CHECK(std::stod(f[18]) > 0.0);
    CHECK(std::stod(f[19]) > 0.0);
    CHECK(std::stod(f[20]) > 0.0);
  }

  const std::vector<std::pair<std::string, std::string>> bands = {
      {"0", "0"}, {"0", "40"}, {"50", "0"}, {"50", "40"}};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto f = split_csv(lines[3 + i]);
    CHECK(f[0] == "btc");
    CHECK(f[1].empty());
    CHECK(std::stod(f[2]) == std::stod(bands[i].first));
    CHECK(std::stod(f[3]) == std::stod(bands[i].second));
    CHECK(std::stod(f[14]) >= 1.0);
    CHECK(std::stoull(f[11]) <= std::stoull(f[10]));
  }
}

TEST_CASE("command line drives the full pipeline") {
  const TempDir dir;
  const std::string net = dir.file("net.txt");
  const std::string corpus = dir.file("corpus.txt");

  const CliResult gen = run_cli("gen --seed 3 --rows 5 --cols 5 --count 25 --out-network '" + net +
                                    "' --out-corpus '" + corpus + "'",
                                dir);
  REQUIRE(gen.code == 0);
  CHECK(gen.out.find("vertices 25") != std::string::npos);
  CHECK(gen.out.find("edges 80") != std::string::npos);
  CHECK(gen.out.find("trajectories 25") != std::string::npos);

  const std::string model = dir.file("model.bin");
  const CliResult train = run_cli("train --network '" + net + "' --corpus '" + corpus +
                                      "' --theta 3 --out '" + model + "'",
                                  dir);
  REQUIRE(train.code == 0);
  CHECK(train.out.find("nodes ") != std::string::npos);
  CHECK(train.out.find("theta 3") != std::string::npos);

  const std::string comp = dir.file("corpus.prsc");
  const CliResult compress =
      run_cli("compress --network '" + net + "' --model '" + model + "' --corpus '" + corpus +
                  "' --tsnd 50 --nstd 40 --out '" + comp + "'",
              dir);
  REQUIRE(compress.code == 0);
  CHECK(compress.out.find("trajectories 25") != std::string::npos);
  CHECK(compress.out.find("alpha ") != std::string::npos);
  CHECK(compress.out.find("overall_ratio ") != std::string::npos);

  const std::string batch_path = dir.file("batch.txt");
  {
    const RoadNetwork net_obj = load_network_file(net);
    const std::vector<Trajectory> corpus_obj = load_corpus_file(corpus);
    write_file(batch_path, make_batch(corpus_obj, net_obj, 10).first);
  }
  const std::string answers = dir.file("answers.txt");
  const CliResult query =
      run_cli("query --network '" + net + "' --model '" + model + "' --compressed '" + comp +
                  "' --batch '" + batch_path + "' --out '" + answers + "' --reference",
              dir);
  REQUIRE(query.code == 0);
  CHECK(query.err.find("queries 30") != std::string::npos);
  CHECK(query.err.find("agreements") != std::string::npos);
  CHECK(split_lines(read_file(answers)).size() == 30);

  const std::string back = dir.file("back.txt");
  const CliResult decompress = run_cli("decompress --network '" + net + "' --model '" + model +
                                           "' --compressed '" + comp + "' --out '" + back + "'",
                                       dir);
  REQUIRE(decompress.code == 0);
  const std::vector<Trajectory> original = load_corpus_file(corpus);
  const std::vector<Trajectory> recovered = load_corpus_file(back);
  REQUIRE(recovered.size() == original.size());
  for (std::size_t i = 0; i < recovered.size(); ++i)
    CHECK(recovered[i].path == original[i].path);

  const std::string table = dir.file("stats.csv");
  const CliResult stats = run_cli("stats --network '" + net + "' --corpus '" + corpus +
                                      "' --theta-sweep 2 3 --tsnd-sweep 0 50 --nstd-sweep 0 40 "
                                      "--out '" + table + "'",
                                  dir);
  REQUIRE(stats.code == 0);
  const auto rows = split_lines(read_file(table));
  REQUIRE(rows.size() == 1 + 2 + 4);
  CHECK(rows[0].rfind("table,theta,tau,eta,", 0) == 0);
}

TEST_CASE("command line distinguishes usage, data, and model errors") {
  const TempDir dir;
  CHECK(run_cli("", dir).code == 1);
  CHECK(run_cli("train", dir).code == 1);
  CHECK(run_cli("frobnicate", dir).code == 1);
  CHECK(run_cli("--help", dir).code == 0);

  const CliResult missing = run_cli("train --network '" + dir.file("no.txt") + "' --corpus '" +
                                        dir.file("no.txt") + "' --out '" + dir.file("m.bin") + "'",
                                    dir);
  CHECK(missing.code == 2);
  CHECK(missing.err.find("error:") != std::string::npos);

  // A model trained on one lattice must be rejected on another.
  const std::string net5 = dir.file("net5.txt"), cor5 = dir.file("cor5.txt");
  const std::string net4 = dir.file("net4.txt"), cor4 = dir.file("cor4.txt");
  REQUIRE(run_cli("gen --seed 3 --rows 5 --cols 5 --count 10 --out-network '" + net5 +
                      "' --out-corpus '" + cor5 + "'",
                  dir)
              .code == 0);
  REQUIRE(run_cli("gen --seed 3 --rows 4 --cols 4 --count 10 --out-network '" + net4 +
                      "' --out-corpus '" + cor4 + "'",
                  dir)
              .code == 0);
  const std::string model = dir.file("m5.bin");
  REQUIRE(run_cli("train --network '" + net5 + "' --corpus '" + cor5 + "' --out '" + model + "'",
                  dir)
              .code == 0);
  const CliResult mismatch =
      run_cli("compress --network '" + net4 + "' --model '" + model + "' --corpus '" + cor4 +
                  "' --out '" + dir.file("c.prsc") + "'",
              dir);
  CHECK(mismatch.code == 3);
  CHECK(mismatch.err.find("error:") != std::string::npos);
}

TEST_CASE("concurrent queries share one index") {
  const PipeRig rig(16);
  const RoadNetwork net = load_network_file(rig.net_path);
  const SpIndex sp = build_sp_index(net);
  FstModel model = trained_model(rig);
  const QueryIndex qi = build_query_index(model, sp, net);

  const std::vector<Trajectory> corpus = load_corpus_file(rig.corpus_path);
  std::vector<CompressedTrajectory> records;
  for (const Trajectory& traj : corpus)
    records.push_back(compress_one(traj, sp, net, model, {0.0, 0.0}));

  const std::vector<double> fractions = {0.1, 0.3, 0.5, 0.7, 0.9};
  const auto answer_all = [&] {
    std::vector<NetworkPoint> points;
    for (const CompressedTrajectory& ct : records)
      for (double f : fractions) points.push_back(where_at(ct, f * ct.temporal.back().t, qi));
    return points;
  };

  const std::vector<NetworkPoint> serial = answer_all();
  std::vector<std::vector<NetworkPoint>> parallel(4);
  std::vector<std::thread> workers;
  for (int w = 0; w < 4; ++w)
    workers.emplace_back([&, w] { parallel[static_cast<std::size_t>(w)] = answer_all(); });
  for (std::thread& t : workers) t.join();

  for (const auto& got : parallel) {
    REQUIRE(got.size() == serial.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
      CHECK(got[i].edge == serial[i].edge);
      CHECK(got[i].offset == serial[i].offset);
      CHECK(got[i].pos.x == serial[i].pos.x);
      CHECK(got[i].pos.y == serial[i].pos.y);
    }
  }
}
