// Serial reference vs OpenMP kernels on representative grid sizes.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "nilab/kernels.hpp"

namespace k = nilab::kernels;

namespace {

std::vector<double> field(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::sin(0.001 * double(i)) + 0.1 * std::cos(0.37 * double(i));
  return v;
}

template <bool Parallel>
void BM_radial_diff(benchmark::State& st) {
  const std::size_t nR = st.range(0), nB = 64;
  const auto in = field(nR * nB);
  std::vector<double> out(nR * nB);
  for (auto _ : st) {
    if constexpr (Parallel) k::parallel::radial_diff(in.data(), out.data(), nR, nB, 1e-3);
    else k::serial::radial_diff(in.data(), out.data(), nR, nB, 1e-3);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_beta_diff(benchmark::State& st) {
  const std::size_t nR = st.range(0), nB = 126;
  const auto in = field(nR * nB);
  std::vector<double> out(nR * nB);
  const k::BetaBoundary bc{k::BetaBC::Periodic, 0, 0};
  for (auto _ : st) {
    if constexpr (Parallel) k::parallel::beta_diff(in.data(), out.data(), nR, nB, 0.025, bc);
    else k::serial::beta_diff(in.data(), out.data(), nR, nB, 0.025, bc);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_row_transform(benchmark::State& st) {
  const std::size_t nR = st.range(0), nIn = 64, nOut = 32;
  const auto in = field(nR * nIn), M = field(nIn * nOut);
  std::vector<double> out(nR * nOut);
  for (auto _ : st) {
    if constexpr (Parallel) k::parallel::row_transform(in.data(), out.data(), nR, nIn, nOut, M.data());
    else k::serial::row_transform(in.data(), out.data(), nR, nIn, nOut, M.data());
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_mode_green(benchmark::State& st) {
  const std::size_t nR = st.range(0), nM = 32;
  const auto c = field(nR * nM);
  std::vector<double> out(nR * nM), s(nR), ml(nM), mr(nM), sc(nM, 1.0);
  std::vector<unsigned char> dr(nM, 0);
  for (std::size_t i = 0; i < nR; ++i) s[i] = -4.0 + 6.0 * double(i) / double(nR - 1);
  for (std::size_t m = 0; m < nM; ++m) {
    ml[m] = 2.0 * double(m) / 0.05;
    mr[m] = (2.0 * double(m) + 4.0) / 0.05;
  }
  const k::ModeGreen p{ml.data(), mr.data(), sc.data(), dr.data()};
  for (auto _ : st) {
    if constexpr (Parallel) k::parallel::mode_green_solve(c.data(), out.data(), nR, nM, s.data(), p);
    else k::serial::mode_green_solve(c.data(), out.data(), nR, nM, s.data(), p);
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_transport_rhs(benchmark::State& st) {
  const std::size_t n = st.range(0) * 126;
  const auto a = field(n), b = field(n + 7), c = field(n + 13), d = field(n + 29);
  std::vector<double> out(n);
  for (auto _ : st) {
    if constexpr (Parallel) k::parallel::transport_rhs(n, a.data(), b.data(), c.data(), d.data(), out.data());
    else k::serial::transport_rhs(n, a.data(), b.data(), c.data(), d.data(), out.data());
    benchmark::DoNotOptimize(out.data());
  }
}

}  // namespace

BENCHMARK(BM_radial_diff<false>)->Arg(2048)->Arg(8192);
BENCHMARK(BM_radial_diff<true>)->Arg(2048)->Arg(8192);
BENCHMARK(BM_beta_diff<false>)->Arg(2048)->Arg(8192);
BENCHMARK(BM_beta_diff<true>)->Arg(2048)->Arg(8192);
BENCHMARK(BM_row_transform<false>)->Arg(2048)->Arg(8192);
BENCHMARK(BM_row_transform<true>)->Arg(2048)->Arg(8192);
BENCHMARK(BM_mode_green<false>)->Arg(2048)->Arg(8192);
BENCHMARK(BM_mode_green<true>)->Arg(2048)->Arg(8192);
BENCHMARK(BM_transport_rhs<false>)->Arg(2048)->Arg(8192);
BENCHMARK(BM_transport_rhs<true>)->Arg(2048)->Arg(8192);

BENCHMARK_MAIN();
