#pragma once

// Benchmark harness behind the command-line tool: deterministic inputs,
// timing, nominal GFLOPS, verification and CSV output.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tsr/dense.hpp"

namespace tsr {

/// Entries are drawn column by column from std::mt19937_64 seeded with
/// `seed`; each 64-bit draw x maps to ((x >> 11) + 0.5) * 2^-53, which lies
/// strictly inside (0, 1).
Matrix gen_general(Index m, Index n, std::uint64_t seed);

/// (G + G^T) / 2 for G = gen_general(n, n, seed).
Matrix gen_sym(Index n, std::uint64_t seed);

/// Text format: a line "rows cols", then the entries in column-major order,
/// one per line, in %.16e.
void write_matrix(std::ostream& os, const Matrix& a);
Matrix read_matrix(std::istream& is);

struct BenchOptions {
  std::string algo = "sevp-ref";
  Index n = 256;
  std::optional<Index> m;
  Index w = 16;
  Index b = 8;
  bool b_sweep = false;
  std::optional<Index> b_start, b_end, b_step;
  std::uint64_t seed = 1;
  std::optional<int> threads;
  int ts = 1;
  bool verify = false;
  std::string v2_mapping = "ts";  ///< "ts" or "all"
  std::string dump_file, load_file, trace_file, dot_file;
  // depgraph mode
  std::string form = "triband";
  Index ratio = 2;
  int iters = 6;
};

struct BenchRecord {
  std::string algo;
  Index m = 0, n = 0, w = 0, b = 0;
  int ts = 0, tp = 0;
  double seconds = 0;
  double gflops = 0;
  std::optional<double> verify_max_dev;
  bool best = false;
};

std::string csv_header();
std::string to_csv(const BenchRecord& r);

/// Runs one configuration (or a block-size sweep) and writes CSV to out and
/// diagnostics to err.  Returns the process exit status: 0 on success, 1 if
/// a verification failed, 2 on a configuration error.
int run_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err);

/// Depgraph mode: prints one feasibility row and optionally writes DOT.
int run_depgraph(const BenchOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace tsr
