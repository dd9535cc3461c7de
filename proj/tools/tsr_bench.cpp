// Benchmark driver for the band reductions.  CSV goes to stdout,
// diagnostics to stderr.

#include <CLI11.hpp>

#include <iostream>

#include "tsr/bench.hpp"

int main(int argc, char** argv) {
  tsr::BenchOptions opt;
  CLI::App app{"Two-sided band reductions: timing, sweeps and verification"};
  app.add_option("--algo", opt.algo,
                 "sevp-ref|sevp-v1|sevp-v2|svd-triband|svd-ref|svd-sim|svd-v1|svd-v2|depgraph");
  app.add_option("--n", opt.n, "order (SEVP) or column count (SVD)");
  app.add_option("--m", opt.m, "row count for SVD algorithms (default n)");
  app.add_option("--w", opt.w, "bandwidth");
  app.add_option("--b", opt.b, "block size");
  app.add_flag("--b-sweep", opt.b_sweep, "sweep the block size");
  app.add_option("--b-start", opt.b_start, "first block size of the sweep (default 16)");
  app.add_option("--b-end", opt.b_end, "last block size of the sweep (default w, or w/2 for V1)");
  app.add_option("--b-step", opt.b_step, "sweep increment (default 16)");
  app.add_option("--seed", opt.seed, "seed of the input generator");
  app.add_option("--threads", opt.threads, "total workers (default max(ts+1, hardware threads))");
  app.add_option("--ts", opt.ts, "workers in the sequential group; 0 disables look-ahead");
  app.add_flag("--verify", opt.verify, "compare spectra against the Jacobi oracles");
  app.add_option("--v2-mapping", opt.v2_mapping, "phase-1 placement for V2: ts or all");
  app.add_option("--dump", opt.dump_file, "write the output band to FILE");
  app.add_option("--load", opt.load_file, "read the input matrix from FILE");
  app.add_option("--trace", opt.trace_file, "write the event trace to FILE");
  app.add_option("--dot", opt.dot_file, "depgraph: write the DAG in DOT format to FILE");
  app.add_option("--form", opt.form, "depgraph: triband or band");
  app.add_option("--ratio", opt.ratio, "depgraph: w / b");
  app.add_option("--iters", opt.iters, "depgraph: number of steps modelled");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (opt.algo == "depgraph") return tsr::run_depgraph(opt, std::cout, std::cerr);
  return tsr::run_bench(opt, std::cout, std::cerr);
}
