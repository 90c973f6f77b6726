// Data-parallel kernels on row-major (nR x nB) arrays.
//
// Every kernel exists twice: nilab::kernels::serial is the reference,
// nilab::kernels::parallel distributes rows (or modes) over OpenMP threads.
// Both run the same arithmetic per element, so results agree bitwise.
#pragma once

#include <cstddef>

namespace nilab::kernels {

enum class BetaBC { Parity, Periodic, OneSided };

struct BetaBoundary {
  BetaBC kind = BetaBC::OneSided;
  int p0 = 0;  // parity at beta = 0
  int p1 = 0;  // parity at the right end (pi/2 for a quarter grid)
};

// Per-mode radial Green solve: coefficient columns c[i * nModes + m].
// For each mode: out = scale * (left(mu_left) + right(mu_right)), and if
// double_root[m] is set, out = scale * left(left(c)) with rate mu_left.
struct ModeGreen {
  const double* mu_left;
  const double* mu_right;
  const double* scale;
  const unsigned char* double_root;
};

#define NILAB_KERNEL_DECLS                                                          \
  void radial_diff(const double* in, double* out, std::size_t nR, std::size_t nB,  \
                   double h);                                                       \
  void beta_diff(const double* in, double* out, std::size_t nR, std::size_t nB,    \
                 double h, BetaBoundary bc);                                        \
  void radial_fourth_diff(const double* in, double* out, std::size_t nR,           \
                          std::size_t nB);                                          \
  void beta_fourth_diff(const double* in, double* out, std::size_t nR,             \
                        std::size_t nB, BetaBoundary bc);                           \
  void row_transform(const double* in, double* out, std::size_t nR,                \
                     std::size_t nIn, std::size_t nOut, const double* M);           \
  void mode_green_solve(const double* c, double* out, std::size_t nR,              \
                        std::size_t nModes, const double* s, ModeGreen p);          \
  void transport_rhs(std::size_t n, const double* Vs, const double* Vb,            \
                     const double* fs, const double* fb, double* out);

namespace serial {
NILAB_KERNEL_DECLS
}
namespace parallel {
NILAB_KERNEL_DECLS
}

#undef NILAB_KERNEL_DECLS

// One-sided exponential convolutions on a (possibly nonuniform) grid s,
// with f interpolated linearly between nodes and the exponential integrated
// exactly.  left:  A_i = int_{s_0}^{s_i} e^{-mu (s_i - t)} f(t) dt
//          right: B_i = int_{s_i}^{s_n} e^{-mu (t - s_i)} f(t) dt
// stride lets f/out be a column of a row-major array.
void exp_conv_left(const double* f, double* out, const double* s, std::size_t n,
                   double mu, std::size_t stride = 1);
void exp_conv_right(const double* f, double* out, const double* s, std::size_t n,
                    double mu, std::size_t stride = 1);

}  // namespace nilab::kernels
