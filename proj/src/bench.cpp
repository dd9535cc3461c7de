#include "tsr/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <thread>

#include "tsr/depgraph.hpp"
#include "tsr/oracle.hpp"
#include "tsr/sevp.hpp"
#include "tsr/svd.hpp"

namespace tsr {

Matrix gen_general(Index m, Index n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw DimensionError("gen_general: dimensions must be positive");
  std::mt19937_64 rng(seed);
  Matrix a(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) a(i, j) = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
  return a;
}

Matrix gen_sym(Index n, std::uint64_t seed) {
  const Matrix g = gen_general(n, n, seed);
  Matrix s(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) s(i, j) = (g(i, j) + g(j, i)) * 0.5;
  return s;
}

void write_matrix(std::ostream& os, const Matrix& a) {
  os << a.rows() << ' ' << a.cols() << '\n';
  char buf[64];
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      std::snprintf(buf, sizeof buf, "%.16e\n", a(i, j));
      os << buf;
    }
  }
}

Matrix read_matrix(std::istream& is) {
  Index rows = 0, cols = 0;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0) throw std::runtime_error("read_matrix: bad header");
  Matrix a(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i)
      if (!(is >> a(i, j))) throw std::runtime_error("read_matrix: truncated data");
  return a;
}

std::string csv_header() { return "algo,m,n,w,b,ts,tp,seconds,gflops,verify_max_dev,best"; }

std::string to_csv(const BenchRecord& r) {
  char buf[512];
  char dev[64] = "";
  if (r.verify_max_dev) std::snprintf(dev, sizeof dev, "%.6e", *r.verify_max_dev);
  std::snprintf(buf, sizeof buf, "%s,%td,%td,%td,%td,%d,%d,%.6f,%.4f,%s,%d", r.algo.c_str(), r.m, r.n, r.w,
                r.b, r.ts, r.tp, r.seconds, r.gflops, dev, r.best ? 1 : 0);
  return buf;
}

namespace {

enum class Family { Sevp, TriBand, BandSvd };

struct AlgoSpec {
  Family family;
  SevpVariant sevp = SevpVariant::Reference;
  SvdVariant svd = SvdVariant::Reference;
};

AlgoSpec parse_algo(const std::string& algo) {
  if (algo == "sevp-ref") return {Family::Sevp, SevpVariant::Reference};
  if (algo == "sevp-v1") return {Family::Sevp, SevpVariant::V1};
  if (algo == "sevp-v2") return {Family::Sevp, SevpVariant::V2};
  if (algo == "svd-triband") return {Family::TriBand};
  if (algo == "svd-ref") return {Family::BandSvd, {}, SvdVariant::Reference};
  if (algo == "svd-sim") return {Family::BandSvd, {}, SvdVariant::Simultaneous};
  if (algo == "svd-v1") return {Family::BandSvd, {}, SvdVariant::V1};
  if (algo == "svd-v2") return {Family::BandSvd, {}, SvdVariant::V2};
  throw ConfigError("unknown algorithm: " + algo);
}

std::vector<Index> block_sizes(const BenchOptions& opt, const AlgoSpec& spec) {
  if (!opt.b_sweep) return {opt.b};
  const bool v1 = (spec.family == Family::Sevp && spec.sevp == SevpVariant::V1) ||
                  (spec.family == Family::BandSvd && spec.svd == SvdVariant::V1);
  const Index start = opt.b_start.value_or(16);
  const Index end = opt.b_end.value_or(v1 ? opt.w / 2 : opt.w);
  const Index step = opt.b_step.value_or(16);
  if (start < 1 || step < 1 || end < start) throw ConfigError("empty or invalid block-size sweep");
  std::vector<Index> bs;
  for (Index b = start; b <= end; b += step) bs.push_back(b);
  return bs;
}

struct Reference {
  std::vector<double> values;
  double norm2 = 0;
};

}  // namespace

int run_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const AlgoSpec spec = parse_algo(opt.algo);
    Matrix a;
    if (!opt.load_file.empty()) {
      std::ifstream in(opt.load_file);
      if (!in) throw ConfigError("cannot open " + opt.load_file);
      a = read_matrix(in);
    } else if (spec.family == Family::Sevp) {
      if (opt.m && *opt.m != opt.n) throw ConfigError("--m applies to SVD algorithms only");
      a = gen_sym(opt.n, opt.seed);
    } else {
      a = gen_general(opt.m.value_or(opt.n), opt.n, opt.seed);
    }
    if (a.size() == 0) throw ConfigError("empty input matrix");
    if (spec.family == Family::Sevp && a.rows() != a.cols()) throw ConfigError("SEVP input must be square");
    if (spec.family == Family::TriBand && a.rows() < a.cols())
      throw ConfigError("triangular-band reduction needs m >= n");
    if (opt.verify && std::max(a.rows(), a.cols()) > 256) throw ConfigError("--verify supports dimensions up to 256");

    const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const int threads = opt.threads.value_or(std::max(opt.ts + 1, hw));
    ExecGroups groups{threads, opt.ts};
    try {
      groups.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    if (opt.v2_mapping != "ts" && opt.v2_mapping != "all") throw ConfigError("--v2-mapping must be ts or all");
    const std::vector<Index> bs = block_sizes(opt, spec);

    std::optional<Reference> ref;
    if (opt.verify) {
      ref.emplace();
      ref->values = spec.family == Family::Sevp ? jacobi_eigen(a) : jacobi_svd(a);
      for (double v : ref->values) ref->norm2 = std::max(ref->norm2, std::abs(v));
    }

    std::vector<BenchRecord> rows;
    bool verify_failed = false;
    Matrix last_band;
    EventTrace last_trace;
    for (Index b : bs) {
      Runtime rt(groups);
      Matrix band;
      const auto t0 = std::chrono::steady_clock::now();
      if (spec.family == Family::Sevp) {
        SevpConfig cfg;
        cfg.w = opt.w;
        cfg.b = b;
        cfg.variant = spec.sevp;
        cfg.v2_mapping = opt.v2_mapping == "all" ? SevpV2Mapping::A1OnAll : SevpV2Mapping::A1OnTS;
        cfg.validate();
        band = reduce_sym_band<double>(a, cfg, rt).band;
      } else if (spec.family == Family::TriBand) {
        band = reduce_tri_band<double>(a, opt.w, b, rt).band;
      } else {
        SvdConfig cfg;
        cfg.w = opt.w;
        cfg.b = b;
        cfg.variant = spec.svd;
        cfg.v2_mapping = opt.v2_mapping == "all" ? SvdV2Mapping::B1C1OnAll : SvdV2Mapping::B1C1OnTS;
        cfg.validate();
        band = reduce_band_svd<double>(a, cfg, rt).band;
      }
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

      BenchRecord r;
      r.algo = opt.algo;
      r.m = a.rows();
      r.n = a.cols();
      r.w = opt.w;
      r.b = b;
      r.ts = groups.ts_count;
      r.tp = groups.tp_count();
      r.seconds = secs;
      const double nominal = spec.family == Family::Sevp
                                 ? static_cast<double>(sevp_nominal_flops(static_cast<std::uint64_t>(a.rows())))
                                 : static_cast<double>(svd_nominal_flops(
                                       static_cast<std::uint64_t>(std::max(a.rows(), a.cols())),
                                       static_cast<std::uint64_t>(std::min(a.rows(), a.cols()))));
      r.gflops = secs > 0 ? nominal / secs / 1e9 : 0;
      if (ref) {
        const std::vector<double> got = spec.family == Family::Sevp ? jacobi_eigen(band) : jacobi_svd(band);
        const double tol = 1e-11 * ref->norm2;
        const SpectraMatch sm = spectra_match(ref->values, got, tol);
        const double offband =
            spec.family == Family::TriBand ? band_check(band, 0, opt.w) : band_check(band, opt.w, opt.w);
        r.verify_max_dev = sm.max_dev;
        if (!sm.ok || offband != 0) {
          verify_failed = true;
          err << "verification failed for " << opt.algo << " b=" << b << ": max deviation " << sm.max_dev
              << " (tolerance " << tol << "), off-band max " << offband << '\n';
        }
      }
      rows.push_back(r);
      last_band = std::move(band);
      last_trace = rt.trace();
    }

    out << csv_header() << '\n';
    for (const auto& r : rows) out << to_csv(r) << '\n';
    if (opt.b_sweep) {
      auto best = *std::max_element(rows.begin(), rows.end(),
                                    [](const BenchRecord& x, const BenchRecord& y) { return x.gflops < y.gflops; });
      best.best = true;
      out << to_csv(best) << '\n';
    }
    if (!opt.dump_file.empty()) {
      std::ofstream f(opt.dump_file);
      write_matrix(f, last_band);
    }
    if (!opt.trace_file.empty()) {
      std::ofstream f(opt.trace_file);
      last_trace.dump(f);
    }
    return verify_failed ? 1 : 0;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int run_depgraph(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    SvdForm form;
    if (opt.form == "triband")
      form = SvdForm::TriangularBand;
    else if (opt.form == "band")
      form = SvdForm::Band;
    else
      throw ConfigError("--form must be triband or band");
    if (opt.ratio < 1) throw ConfigError("--ratio must be >= 1");
    const Index w = opt.ratio * opt.b;
    const Index m = opt.m.value_or(opt.n);
    const TaskDag dag = build_dag(enumerate_tasks(m, opt.n, w, opt.b, form, opt.iters));
    const OverlapReport rep = analyze_overlap(dag, w, opt.b, form);
    auto tf = [](bool v) { return v ? "true" : "false"; };
    out << "form,m,n,w,b,left_feasible,right_feasible,both_feasible\n";
    out << opt.form << ',' << m << ',' << opt.n << ',' << w << ',' << opt.b << ',' << tf(rep.left_feasible) << ','
        << tf(rep.right_feasible) << ',' << tf(rep.both_feasible) << '\n';
    if (!opt.dot_file.empty()) {
      std::ofstream f(opt.dot_file);
      f << to_dot(dag);
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace tsr
