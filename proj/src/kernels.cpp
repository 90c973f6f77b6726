#include "nilab/kernels.hpp"

#include <cmath>
#include <vector>

namespace nilab::kernels {
namespace {

inline double ghost(const double* row, long k, long nB, BetaBoundary bc) {
  if (bc.kind == BetaBC::Periodic) {
    k %= nB;
    if (k < 0) k += nB;
    return row[k];
  }
  long M = nB - 1;
  if (k < 0) return bc.p0 * row[-k];
  if (k > M) return bc.p1 * row[2 * M - k];
  return row[k];
}

template <bool Par>
void radial_diff_impl(const double* in, double* out, std::size_t nR, std::size_t nB, double h) {
  const double c12 = 1.0 / (12.0 * h), c2 = 1.0 / (2.0 * h);
  const long n = static_cast<long>(nR);
#pragma omp parallel for schedule(static) if (Par)
  for (long i = 0; i < n; ++i) {
    double* o = out + i * nB;
    if (i >= 2 && i <= n - 3) {
      const double *a = in + (i - 2) * nB, *b = in + (i - 1) * nB, *c = in + (i + 1) * nB,
                   *d = in + (i + 2) * nB;
      for (std::size_t j = 0; j < nB; ++j) o[j] = (a[j] - 8.0 * b[j] + 8.0 * c[j] - d[j]) * c12;
    } else if (i == 0) {
      const double *a = in, *b = in + nB, *c = in + 2 * nB;
      for (std::size_t j = 0; j < nB; ++j) o[j] = (-3.0 * a[j] + 4.0 * b[j] - c[j]) * c2;
    } else if (i == n - 1) {
      const double *a = in + i * nB, *b = in + (i - 1) * nB, *c = in + (i - 2) * nB;
      for (std::size_t j = 0; j < nB; ++j) o[j] = (3.0 * a[j] - 4.0 * b[j] + c[j]) * c2;
    } else {
      const double *a = in + (i - 1) * nB, *c = in + (i + 1) * nB;
      for (std::size_t j = 0; j < nB; ++j) o[j] = (c[j] - a[j]) * c2;
    }
  }
}

template <bool Par>
void beta_diff_impl(const double* in, double* out, std::size_t nR, std::size_t nB, double h,
                    BetaBoundary bc) {
  const double c12 = 1.0 / (12.0 * h), c2 = 1.0 / (2.0 * h);
  const long nb = static_cast<long>(nB);
  const bool ghosts = bc.kind != BetaBC::OneSided;
#pragma omp parallel for schedule(static) if (Par)
  for (long i = 0; i < static_cast<long>(nR); ++i) {
    const double* f = in + i * nB;
    double* o = out + i * nB;
    for (long j = 0; j < nb; ++j) {
      if (ghosts || (j >= 2 && j <= nb - 3)) {
        o[j] = (ghost(f, j - 2, nb, bc) - 8.0 * ghost(f, j - 1, nb, bc) +
                8.0 * ghost(f, j + 1, nb, bc) - ghost(f, j + 2, nb, bc)) *
               c12;
      } else if (j == 0) {
        o[j] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * c2;
      } else if (j == nb - 1) {
        o[j] = (3.0 * f[j] - 4.0 * f[j - 1] + f[j - 2]) * c2;
      } else {
        o[j] = (f[j + 1] - f[j - 1]) * c2;
      }
    }
  }
}

template <bool Par>
void radial_fourth_impl(const double* in, double* out, std::size_t nR, std::size_t nB) {
  const long n = static_cast<long>(nR);
#pragma omp parallel for schedule(static) if (Par)
  for (long i = 0; i < n; ++i) {
    double* o = out + i * nB;
    if (i < 2 || i > n - 3) {
      for (std::size_t j = 0; j < nB; ++j) o[j] = 0.0;
      continue;
    }
    const double *a = in + (i - 2) * nB, *b = in + (i - 1) * nB, *c = in + i * nB,
                 *d = in + (i + 1) * nB, *e = in + (i + 2) * nB;
    for (std::size_t j = 0; j < nB; ++j) o[j] = a[j] - 4.0 * b[j] + 6.0 * c[j] - 4.0 * d[j] + e[j];
  }
}

template <bool Par>
void beta_fourth_impl(const double* in, double* out, std::size_t nR, std::size_t nB,
                      BetaBoundary bc) {
  const long nb = static_cast<long>(nB);
#pragma omp parallel for schedule(static) if (Par)
  for (long i = 0; i < static_cast<long>(nR); ++i) {
    const double* f = in + i * nB;
    double* o = out + i * nB;
    for (long j = 0; j < nb; ++j) {
      if (bc.kind == BetaBC::OneSided && (j < 2 || j > nb - 3)) {
        o[j] = 0.0;
        continue;
      }
      o[j] = ghost(f, j - 2, nb, bc) - 4.0 * ghost(f, j - 1, nb, bc) + 6.0 * f[j] -
             4.0 * ghost(f, j + 1, nb, bc) + ghost(f, j + 2, nb, bc);
    }
  }
}

template <bool Par>
void row_transform_impl(const double* in, double* out, std::size_t nR, std::size_t nIn,
                        std::size_t nOut, const double* M) {
#pragma omp parallel for schedule(static) if (Par)
  for (long i = 0; i < static_cast<long>(nR); ++i) {
    const double* x = in + i * nIn;
    double* y = out + i * nOut;
    for (std::size_t o = 0; o < nOut; ++o) {
      const double* m = M + o * nIn;
      double acc = 0.0;
      for (std::size_t k = 0; k < nIn; ++k) acc += m[k] * x[k];
      y[o] = acc;
    }
  }
}

template <bool Par>
void mode_green_impl(const double* c, double* out, std::size_t nR, std::size_t nModes,
                     const double* s, ModeGreen p) {
#pragma omp parallel for schedule(dynamic) if (Par)
  for (long m = 0; m < static_cast<long>(nModes); ++m) {
    std::vector<double> col(nR), a(nR), b(nR);
    for (std::size_t i = 0; i < nR; ++i) col[i] = c[i * nModes + m];
    if (p.double_root[m]) {
      exp_conv_left(col.data(), a.data(), s, nR, p.mu_left[m]);
      exp_conv_left(a.data(), b.data(), s, nR, p.mu_left[m]);
      for (std::size_t i = 0; i < nR; ++i) out[i * nModes + m] = p.scale[m] * b[i];
    } else {
      exp_conv_left(col.data(), a.data(), s, nR, p.mu_left[m]);
      exp_conv_right(col.data(), b.data(), s, nR, p.mu_right[m]);
      for (std::size_t i = 0; i < nR; ++i) out[i * nModes + m] = p.scale[m] * (a[i] + b[i]);
    }
  }
}

template <bool Par>
void transport_rhs_impl(std::size_t n, const double* Vs, const double* Vb, const double* fs,
                        const double* fb, double* out) {
#pragma omp parallel for schedule(static) if (Par)
  for (long k = 0; k < static_cast<long>(n); ++k) out[k] = -(Vs[k] * fs[k] + Vb[k] * fb[k]);
}

// Weights of int_0^h e^{-mu (h - t)} [f0 (1 - t/h) + f1 t/h] dt:
// returns {w0, w1} with w1 on the near node.
inline void exp_weights(double h, double mu, double& w_far, double& w_near, double& decay) {
  const double z = mu * h;
  if (std::abs(z) < 1e-4) {
    w_far = h * (0.5 - z / 3.0 + z * z / 8.0);
    w_near = h * (0.5 - z / 6.0 + z * z / 24.0);
    decay = std::exp(-z);
    return;
  }
  const double one_minus_e = -std::expm1(-z);
  decay = 1.0 - one_minus_e;
  w_far = h * (one_minus_e - z * decay) / (z * z);
  w_near = h * one_minus_e / z - w_far;
}

}  // namespace

void exp_conv_left(const double* f, double* out, const double* s, std::size_t n, double mu,
                   std::size_t stride) {
  if (n == 0) return;
  out[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    double wf, wn, e;
    exp_weights(s[i] - s[i - 1], mu, wf, wn, e);
    out[i * stride] = e * out[(i - 1) * stride] + wf * f[(i - 1) * stride] + wn * f[i * stride];
  }
}

void exp_conv_right(const double* f, double* out, const double* s, std::size_t n, double mu,
                    std::size_t stride) {
  if (n == 0) return;
  out[(n - 1) * stride] = 0.0;
  for (std::size_t i = n - 1; i-- > 0;) {
    double wf, wn, e;
    exp_weights(s[i + 1] - s[i], mu, wf, wn, e);
    out[i * stride] = e * out[(i + 1) * stride] + wf * f[(i + 1) * stride] + wn * f[i * stride];
  }
}

#define NILAB_KERNEL_DEFS(PAR)                                                              \
  void radial_diff(const double* in, double* out, std::size_t nR, std::size_t nB, double h) { \
    radial_diff_impl<PAR>(in, out, nR, nB, h);                                               \
  }                                                                                          \
  void beta_diff(const double* in, double* out, std::size_t nR, std::size_t nB, double h,    \
                 BetaBoundary bc) {                                                          \
    beta_diff_impl<PAR>(in, out, nR, nB, h, bc);                                             \
  }                                                                                          \
  void radial_fourth_diff(const double* in, double* out, std::size_t nR, std::size_t nB) {   \
    radial_fourth_impl<PAR>(in, out, nR, nB);                                                \
  }                                                                                          \
  void beta_fourth_diff(const double* in, double* out, std::size_t nR, std::size_t nB,       \
                        BetaBoundary bc) {                                                   \
    beta_fourth_impl<PAR>(in, out, nR, nB, bc);                                              \
  }                                                                                          \
  void row_transform(const double* in, double* out, std::size_t nR, std::size_t nIn,         \
                     std::size_t nOut, const double* M) {                                    \
    row_transform_impl<PAR>(in, out, nR, nIn, nOut, M);                                      \
  }                                                                                          \
  void mode_green_solve(const double* c, double* out, std::size_t nR, std::size_t nModes,    \
                        const double* s, ModeGreen p) {                                      \
    mode_green_impl<PAR>(c, out, nR, nModes, s, p);                                          \
  }                                                                                          \
  void transport_rhs(std::size_t n, const double* Vs, const double* Vb, const double* fs,    \
                     const double* fb, double* out) {                                        \
    transport_rhs_impl<PAR>(n, Vs, Vb, fs, fb, out);                                         \
  }

namespace serial {
NILAB_KERNEL_DEFS(false)
}
namespace parallel {
NILAB_KERNEL_DEFS(true)
}

}  // namespace nilab::kernels
