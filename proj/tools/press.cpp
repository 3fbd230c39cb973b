// Road-network trajectory compression driver: train a spatial model, compress
// and decompress trajectory corpora, answer queries on compressed records,
// sweep compression ratios, and generate synthetic benchmark data.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "press/pipeline.hpp"

namespace {

void print_stats(const press::CompressionStats& s) {
  const auto opt = [](const std::optional<double>& v) {
    if (!v) return std::string("NA");
    std::ostringstream out;
    out << std::setprecision(6) << *v;
    return out.str();
  };
  std::cout << "trajectories " << s.trajectories << "\n"
            << "edges_in " << s.edges_in << "\n"
            << "edges_after_sp " << s.edges_after_sp << "\n"
            << "spatial_bytes " << s.spatial_bytes << "\n"
            << "tuples_in " << s.tuples_in << "\n"
            << "tuples_out " << s.tuples_out << "\n"
            << "alpha " << opt(s.alpha) << "\n"
            << "gamma " << opt(s.gamma) << "\n"
            << "beta " << opt(s.beta) << "\n"
            << "spatial_ratio " << opt(s.spatial_ratio) << "\n"
            << "overall_ratio " << opt(s.overall_ratio) << "\n"
            << std::setprecision(3) << std::fixed << "sp_ms " << s.sp_ms << "\nfst_ms " << s.fst_ms
            << "\nbtc_ms " << s.btc_ms << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"road-network trajectory compression"};
  app.require_subcommand(1);

  std::string network, model, corpus, compressed, out, batch;
  int theta = 3;
  double tsnd = 0.0, nstd = 0.0;
  bool reference = false;

  CLI::App* train = app.add_subcommand("train", "build a spatial model from a corpus");
  train->add_option("--network", network)->required();
  train->add_option("--corpus", corpus)->required();
  train->add_option("--theta", theta)->check(CLI::PositiveNumber);
  train->add_option("--out", out)->required();

  CLI::App* compress = app.add_subcommand("compress", "compress a corpus under a model");
  compress->add_option("--network", network)->required();
  compress->add_option("--model", model)->required();
  compress->add_option("--corpus", corpus)->required();
  compress->add_option("--tsnd", tsnd)->check(CLI::NonNegativeNumber);
  compress->add_option("--nstd", nstd)->check(CLI::NonNegativeNumber);
  compress->add_option("--out", out)->required();

  CLI::App* decompress = app.add_subcommand("decompress", "recover a corpus text file");
  decompress->add_option("--network", network)->required();
  decompress->add_option("--model", model)->required();
  decompress->add_option("--compressed", compressed)->required();
  decompress->add_option("--out", out)->required();

  CLI::App* query = app.add_subcommand("query", "run a query batch against compressed records");
  query->add_option("--network", network)->required();
  query->add_option("--model", model)->required();
  query->add_option("--compressed", compressed)->required();
  query->add_option("--batch", batch)->required();
  query->add_option("--out", out, "results file (default: stdout)");
  query->add_flag("--reference", reference, "compare against linear-scan answers");

  std::vector<int> theta_sweep{1, 2, 3, 4, 5, 6, 8};
  std::vector<double> tau_sweep{0, 10, 20, 50, 100, 200, 400, 600, 800, 1000};
  std::vector<double> eta_sweep{0, 10, 20, 50, 100, 200, 400, 600, 800, 1000};
  CLI::App* stats = app.add_subcommand("stats", "sweep compression ratios");
  stats->add_option("--network", network)->required();
  stats->add_option("--corpus", corpus)->required();
  stats->add_option("--theta-sweep", theta_sweep, "theta values for the spatial table");
  stats->add_option("--tsnd-sweep", tau_sweep, "tau values for the temporal table");
  stats->add_option("--nstd-sweep", eta_sweep, "eta values for the temporal table");
  stats->add_option("--out", out, "csv file (default: stdout)");

  press::GenConfig cfg;
  std::string out_network, out_corpus;
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic network and corpus");
  gen->add_option("--seed", cfg.seed);
  gen->add_option("--rows", cfg.rows);
  gen->add_option("--cols", cfg.cols);
  gen->add_option("--weight-min", cfg.weight_min);
  gen->add_option("--weight-max", cfg.weight_max);
  gen->add_option("--count", cfg.count);
  gen->add_option("--len-min", cfg.len_min);
  gen->add_option("--len-max", cfg.len_max);
  gen->add_option("--sp-bias", cfg.sp_bias);
  gen->add_option("--pattern-count", cfg.pattern_count);
  gen->add_option("--pattern-reuse", cfg.pattern_reuse);
  gen->add_option("--stop-fraction", cfg.stop_fraction);
  gen->add_option("--sample-interval", cfg.sample_interval);
  gen->add_option("--out-network", out_network)->required();
  gen->add_option("--out-corpus", out_corpus)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*train) {
      const press::TrainReport r = press::cmd_train(network, corpus, theta, out);
      std::cout << "nodes " << r.nodes << "\ntheta " << r.theta << "\nmodel_bytes "
                << r.model_bytes << "\ntrain_ms " << std::setprecision(3) << std::fixed
                << r.train_ms << "\n";
    } else if (*compress) {
      print_stats(press::cmd_compress(model, network, corpus, tsnd, nstd, out));
    } else if (*decompress) {
      press::cmd_decompress(model, network, compressed, out);
    } else if (*query) {
      std::ifstream batch_file(batch);
      if (!batch_file) throw press::DataError("cannot open " + batch);
      std::ofstream out_file;
      std::ostream* sink = &std::cout;
      if (!out.empty()) {
        out_file.open(out);
        if (!out_file) throw press::DataError("cannot write " + out);
        sink = &out_file;
      }
      const press::QueryReport r =
          press::cmd_query(model, network, compressed, batch_file, *sink, reference);
      std::cerr << "queries " << r.queries << "\n";
      if (reference)
        std::cerr << "agreements " << r.agreements << "\nmax_where_err " << r.max_where_err
                  << "\nmax_when_err " << r.max_when_err << "\nrange_mismatches "
                  << r.range_mismatches << "\n";
    } else if (*stats) {
      std::ofstream out_file;
      std::ostream* sink = &std::cout;
      if (!out.empty()) {
        out_file.open(out);
        if (!out_file) throw press::DataError("cannot write " + out);
        sink = &out_file;
      }
      press::cmd_stats(network, corpus, theta_sweep, tau_sweep, eta_sweep, *sink);
    } else if (*gen) {
      const press::GenReport r = press::cmd_gen(cfg, out_network, out_corpus);
      std::cout << "vertices " << r.vertices << "\nedges " << r.edges << "\ntrajectories "
                << r.trajectories << "\n";
    }
  } catch (const press::ModelMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const press::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
