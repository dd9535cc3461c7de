#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "tsr/bench.hpp"

using namespace tsr;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(Generators, ReproducibleAndInOpenUnitInterval) {
  const Matrix a = gen_general(30, 20, 7);
  EXPECT_TRUE(a == gen_general(30, 20, 7));
  EXPECT_FALSE(a == gen_general(30, 20, 8));
  EXPECT_GT(a.minCoeff(), 0.0);
  EXPECT_LT(a.maxCoeff(), 1.0);
  const Matrix s = gen_sym(15, 3);
  EXPECT_TRUE(s == s.transpose());
}

TEST(Generators, FirstDrawFollowsMt19937_64) {
  std::mt19937_64 rng(42);
  const double expect = (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
  EXPECT_EQ(gen_general(1, 1, 42)(0, 0), expect);
}

TEST(MatrixIo, RoundTripIsExact) {
  const Matrix a = gen_general(7, 5, 1) * 1e-3;
  std::stringstream ss;
  write_matrix(ss, a);
  EXPECT_EQ(lines(ss.str()).front(), "7 5");
  const Matrix b = read_matrix(ss);
  EXPECT_TRUE(a == b);
  std::istringstream bad("3 3\n1\n2\n");
  EXPECT_THROW(read_matrix(bad), std::runtime_error);
}

TEST(Csv, Formatting) {
  BenchRecord r;
  r.algo = "sevp-v1";
  r.m = r.n = 64;
  r.w = 8;
  r.b = 4;
  r.ts = 1;
  r.tp = 3;
  r.seconds = 0.5;
  r.gflops = 1.23456;
  EXPECT_EQ(to_csv(r), "sevp-v1,64,64,8,4,1,3,0.500000,1.2346,,0");
  r.verify_max_dev = 1.5e-14;
  r.best = true;
  EXPECT_EQ(to_csv(r), "sevp-v1,64,64,8,4,1,3,0.500000,1.2346,1.500000e-14,1");
}

TEST(RunBench, VerifiedRun) {
  BenchOptions o;
  o.algo = "svd-v2";
  o.n = 40;
  o.m = 50;
  o.w = 6;
  o.b = 4;
  o.verify = true;
  o.threads = 2;
  std::ostringstream out, err;
  EXPECT_EQ(run_bench(o, out, err), 0) << err.str();
  const auto ls = lines(out.str());
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], csv_header());
  EXPECT_EQ(ls[1].rfind("svd-v2,50,40,6,4,1,1,", 0), 0u);
}

TEST(RunBench, SweepAddsBestRow) {
  BenchOptions o;
  o.algo = "sevp-ref";
  o.n = 48;
  o.w = 8;
  o.b_sweep = true;
  o.b_start = 2;
  o.b_step = 2;
  o.threads = 2;
  std::ostringstream out, err;
  ASSERT_EQ(run_bench(o, out, err), 0) << err.str();
  const auto ls = lines(out.str());
  ASSERT_EQ(ls.size(), 1u + 4u + 1u);  // b = 2, 4, 6, 8
  EXPECT_EQ(ls.back().back(), '1');
  for (std::size_t i = 1; i + 1 < ls.size(); ++i) EXPECT_EQ(ls[i].back(), '0');
}

TEST(RunBench, V1SweepStopsAtHalfWidth) {
  BenchOptions o;
  o.algo = "sevp-v1";
  o.n = 40;
  o.w = 8;
  o.b_sweep = true;
  o.b_start = 1;
  o.b_step = 1;
  o.threads = 2;
  std::ostringstream out, err;
  ASSERT_EQ(run_bench(o, out, err), 0) << err.str();
  EXPECT_EQ(lines(out.str()).size(), 1u + 4u + 1u);
}

TEST(RunBench, ConfigErrorsExitWithTwo) {
  std::ostringstream out, err;
  BenchOptions o;
  o.algo = "nope";
  EXPECT_EQ(run_bench(o, out, err), 2);
  o.algo = "sevp-v1";
  o.n = 20;
  o.w = 8;
  o.b = 8;
  EXPECT_EQ(run_bench(o, out, err), 2);
  o.algo = "sevp-ref";
  o.n = 300;
  o.verify = true;
  EXPECT_EQ(run_bench(o, out, err), 2);
  o.verify = false;
  o.n = 20;
  o.threads = 1;
  o.ts = 1;
  EXPECT_EQ(run_bench(o, out, err), 2);
}

TEST(RunDepgraph, PrintsFeasibilityRow) {
  BenchOptions o;
  o.form = "band";
  o.n = 24;
  o.b = 2;
  o.ratio = 2;
  std::ostringstream out, err;
  ASSERT_EQ(run_depgraph(o, out, err), 0) << err.str();
  const auto ls = lines(out.str());
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[1], "band,24,24,4,2,true,true,true");
  o.form = "diag";
  EXPECT_EQ(run_depgraph(o, out, err), 2);
}
