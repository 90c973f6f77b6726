#include "nilab/elliptic.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nilab/integral_ops.hpp"
#include "nilab/kernels.hpp"
#include "nilab/norms.hpp"

namespace nilab {

namespace {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kPi = std::numbers::pi;

void require_quarter(const ScalarField& f, const char* what) {
  if (f.grid->domain != BetaDomain::Quarter)
    throw std::invalid_argument(std::string(what) + " needs a quarter-period grid");
}

void require_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.25)) throw std::invalid_argument("alpha must lie in (0, 1/4]");
}

struct ModeTable {
  Mat forward;  // nModes x nB
  Mat inverse;  // nB x nModes
  std::vector<double> mu_left, mu_right, scale;
  std::vector<unsigned char> double_root;
};

ScalarField apply_modes(const ScalarField& omega, const ModeTable& t, Parity parity) {
  const auto& g = *omega.grid;
  const std::size_t nR = g.nR(), nB = g.nB(), nM = static_cast<std::size_t>(t.forward.rows());
  std::vector<double> c(nR * nM), psi_c(nR * nM);
  kernels::parallel::row_transform(omega.v.data(), c.data(), nR, nB, nM, t.forward.data());
  const auto s = log_nodes(g);
  kernels::ModeGreen p{t.mu_left.data(), t.mu_right.data(), t.scale.data(), t.double_root.data()};
  kernels::parallel::mode_green_solve(c.data(), psi_c.data(), nR, nM, s.data(), p);
  ScalarField out(omega.grid, parity);
  kernels::parallel::row_transform(psi_c.data(), out.v.data(), nR, nM, nB, t.inverse.data());
  for (double x : out.v)
    if (!std::isfinite(x)) throw std::runtime_error("elliptic solve produced non-finite values");
  return out;
}

// sin(2 n beta) on a quarter grid: DST-I on the M - 1 interior nodes, M = nB - 1.
ModeTable sine_table(const Grid& g) {
  const std::size_t nB = g.nB(), M = nB - 1, nM = M - 1;
  ModeTable t;
  t.forward = Mat::Zero(static_cast<long>(nM), static_cast<long>(nB));
  t.inverse = Mat::Zero(static_cast<long>(nB), static_cast<long>(nM));
  for (std::size_t n = 1; n <= nM; ++n)
    for (std::size_t j = 1; j < M; ++j) {
      const double v = std::sin(kPi * static_cast<double>(n * j) / static_cast<double>(M));
      t.forward(static_cast<long>(n - 1), static_cast<long>(j)) = 2.0 / static_cast<double>(M) * v;
      t.inverse(static_cast<long>(j), static_cast<long>(n - 1)) = v;
    }
  return t;
}

// Dense B on interior nodes and the sine-coefficient map used to build it.
Mat beta_operator_matrix(const Grid& g) {
  const std::size_t nB = g.nB(), M = nB - 1, nI = M - 1;
  const double dM = static_cast<double>(M);
  // S: interior values -> sine coefficients a_n, n = 1..M-1
  Mat S(nI, nI), Sinv(nI, nI);
  for (std::size_t n = 1; n <= nI; ++n)
    for (std::size_t j = 1; j <= nI; ++j) {
      const double v = std::sin(kPi * static_cast<double>(n * j) / dM);
      S(n - 1, j - 1) = 2.0 / dM * v;
      Sinv(j - 1, n - 1) = v;
    }
  // -Psi'' at interior nodes: sum (2n)^2 a_n sin(2 n b_j)
  Mat D2 = Mat::Zero(nI, nI);
  for (std::size_t j = 1; j <= nI; ++j)
    for (std::size_t n = 1; n <= nI; ++n)
      D2(j - 1, n - 1) = 4.0 * static_cast<double>(n * n) * Sinv(j - 1, n - 1);
  // q = tan(b) Psi on all nodes; q(pi/2) is the limit -Psi'(pi/2) = -sum 2n cos(n pi) a_n.
  Mat Q = Mat::Zero(nB, nI);
  for (std::size_t j = 1; j <= nI; ++j) Q(j, j - 1) = std::tan(g.beta[j]);
  for (std::size_t n = 1; n <= nI; ++n) {
    const double sgn = n % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t k = 1; k <= nI; ++k) Q(M, k - 1) += -2.0 * static_cast<double>(n) * sgn * S(n - 1, k - 1);
  }
  // q is even about both ends: cosine series (DCT-I), then q' at interior nodes.
  Mat C = Mat::Zero(nB, nB);  // node values -> cos coefficients b_n, n = 0..M
  for (std::size_t n = 0; n <= M; ++n)
    for (std::size_t j = 0; j <= M; ++j) {
      double w = (j == 0 || j == M) ? 0.5 : 1.0;
      if (n == 0 || n == M) w *= 0.5;
      C(n, j) = 2.0 / dM * w * std::cos(kPi * static_cast<double>(n * j) / dM);
    }
  Mat Dq = Mat::Zero(nI, nB);  // cos coefficients -> q' at interior nodes
  for (std::size_t j = 1; j <= nI; ++j)
    for (std::size_t n = 1; n <= M; ++n)
      Dq(j - 1, n) = -2.0 * static_cast<double>(n) * std::sin(kPi * static_cast<double>(n * j) / dM);
  Mat B = D2 * S + Dq * C * Q;
  B.diagonal().array() -= 6.0;
  return B;
}

struct Eigen3d {
  Mat V, Vinv;
  std::vector<double> lambda;
};

Eigen3d decompose_beta_operator(const Grid& g) {
  const Mat B = beta_operator_matrix(g);
  Eigen::EigenSolver<Mat> es(B);
  if (es.info() != Eigen::Success) throw std::runtime_error("3d beta operator: eigensolver failed");
  const auto ev = es.eigenvalues();
  const double scale = ev.cwiseAbs().maxCoeff();
  for (long k = 0; k < ev.size(); ++k)
    if (std::abs(ev[k].imag()) > 1e-8 * scale)
      throw std::runtime_error("3d beta operator: complex eigenvalue at index " + std::to_string(k));
  Eigen3d d;
  d.V = es.eigenvectors().real();
  d.Vinv = d.V.inverse();
  for (long k = 0; k < ev.size(); ++k) d.lambda.push_back(ev[k].real());
  return d;
}

}  // namespace

ScalarField solve_psi_2d(const ScalarField& omega, double alpha) {
  require_quarter(omega, "solve_psi_2d");
  require_alpha(alpha);
  ModeTable t = sine_table(*omega.grid);
  const std::size_t nM = static_cast<std::size_t>(t.forward.rows());
  for (std::size_t k = 0; k < nM; ++k) {
    const double n = static_cast<double>(k + 1);
    t.mu_left.push_back((2.0 * n + 2.0) / alpha);
    t.mu_right.push_back((2.0 * n - 2.0) / alpha);
    t.scale.push_back(1.0 / (4.0 * n * alpha));
    t.double_root.push_back(0);
  }
  return apply_modes(omega, t, Parity::odd_odd());
}

ScalarField solve_psi_plane(const ScalarField& omega, double alpha) {
  const auto& g = *omega.grid;
  if (g.domain != BetaDomain::HalfPeriod)
    throw std::invalid_argument("solve_psi_plane needs a half-period grid");
  require_alpha(alpha);
  const std::size_t nB = g.nB(), K = nB / 2;
  const double dN = static_cast<double>(nB);
  ModeTable t;
  t.forward = Mat::Zero(static_cast<long>(nB), static_cast<long>(nB));
  t.inverse = Mat::Zero(static_cast<long>(nB), static_cast<long>(nB));
  auto add_mode = [&](double m) {
    if (m == 0.0) {
      t.mu_left.push_back(2.0 / alpha);
      t.mu_right.push_back(0.0);
      t.scale.push_back(-1.0 / (alpha * alpha));
      t.double_root.push_back(1);
    } else {
      t.mu_left.push_back((m + 2.0) / alpha);
      t.mu_right.push_back((m - 2.0) / alpha);
      t.scale.push_back(1.0 / (2.0 * m * alpha));
      t.double_root.push_back(0);
    }
  };
  for (std::size_t j = 0; j < nB; ++j) {
    t.forward(0, static_cast<long>(j)) = 1.0 / dN;
    t.inverse(static_cast<long>(j), 0) = 1.0;
  }
  add_mode(0.0);
  for (std::size_t k = 1; k < K; ++k) {
    const double m = 2.0 * static_cast<double>(k);
    const long qc = static_cast<long>(2 * k - 1), qs = static_cast<long>(2 * k);
    for (std::size_t j = 0; j < nB; ++j) {
      const double c = std::cos(m * g.beta[j]), s = std::sin(m * g.beta[j]);
      t.forward(qc, static_cast<long>(j)) = 2.0 / dN * c;
      t.forward(qs, static_cast<long>(j)) = 2.0 / dN * s;
      t.inverse(static_cast<long>(j), qc) = c;
      t.inverse(static_cast<long>(j), qs) = s;
    }
    add_mode(m);
    add_mode(m);
  }
  for (std::size_t j = 0; j < nB; ++j) {
    const double sgn = j % 2 == 0 ? 1.0 : -1.0;
    t.forward(static_cast<long>(nB - 1), static_cast<long>(j)) = sgn / dN;
    t.inverse(static_cast<long>(j), static_cast<long>(nB - 1)) = sgn;
  }
  add_mode(2.0 * static_cast<double>(K));
  return apply_modes(omega, t, Parity::none());
}

std::vector<double> beta_operator_3d(const Grid& g) {
  if (g.domain != BetaDomain::Quarter) throw std::invalid_argument("beta_operator_3d needs a quarter grid");
  const Mat B = beta_operator_matrix(g);
  return std::vector<double>(B.data(), B.data() + B.size());
}

std::vector<double> beta_operator_3d_spectrum(const Grid& g) {
  auto d = decompose_beta_operator(g);
  std::sort(d.lambda.begin(), d.lambda.end());
  return d.lambda;
}

ScalarField apply_beta_operator_3d(const ScalarField& psi) {
  require_quarter(psi, "apply_beta_operator_3d");
  const auto& g = *psi.grid;
  const std::size_t nB = g.nB(), nI = nB - 2;
  const Mat B = beta_operator_matrix(g);
  Mat E = Mat::Zero(static_cast<long>(nB), static_cast<long>(nB));  // full row -> full row
  E.block(1, 1, static_cast<long>(nI), static_cast<long>(nI)) = B;
  ScalarField out(psi.grid, Parity::none());
  kernels::parallel::row_transform(psi.v.data(), out.v.data(), g.nR(), nB, nB, E.data());
  return out;
}

ScalarField solve_psi_3d(const ScalarField& omega, double alpha) {
  require_quarter(omega, "solve_psi_3d");
  require_alpha(alpha);
  const auto& g = *omega.grid;
  const std::size_t nB = g.nB(), nI = nB - 2;
  const Eigen3d d = decompose_beta_operator(g);
  ModeTable t;
  t.forward = Mat::Zero(static_cast<long>(nI), static_cast<long>(nB));
  t.inverse = Mat::Zero(static_cast<long>(nB), static_cast<long>(nI));
  t.forward.block(0, 1, static_cast<long>(nI), static_cast<long>(nI)) = d.Vinv;
  t.inverse.block(1, 0, static_cast<long>(nI), static_cast<long>(nI)) = d.V;
  for (std::size_t k = 0; k < nI; ++k) {
    const double disc = 25.0 + 4.0 * d.lambda[k];
    if (!(disc > 0.0))
      throw std::runtime_error("solve_psi_3d: mode " + std::to_string(k) +
                               " has no decaying radial Green's function (25 + 4 lambda <= 0)");
    const double r = std::sqrt(disc);
    t.mu_left.push_back((5.0 + r) / (2.0 * alpha));
    t.mu_right.push_back((r - 5.0) / (2.0 * alpha));
    t.scale.push_back(1.0 / (alpha * r));
    t.double_root.push_back(0);
  }
  return apply_modes(omega, t, Parity::odd_odd());
}

double ell2_residual(const ScalarField& omega, const ScalarField& psi, double alpha) {
  const RadialProfile w2 = beta_project(omega, 2);
  const RadialProfile p2 = beta_project(psi, 2);
  const RadialProfile ps = R_dR(p2);
  const RadialProfile pss = R_dR(ps);
  const double scale = w2.max_abs();
  double err = 0.0;
  for (std::size_t i = 3; i + 3 < p2.size(); ++i)
    err = std::max(err, std::abs(alpha * alpha * pss.v[i] + 4.0 * alpha * ps.v[i] + w2.v[i]));
  return scale > 0.0 ? err / scale : err;
}

PsiDecomposition decompose_psi_2d(const ScalarField& omega, const ScalarField& psi, double alpha) {
  require_quarter(omega, "decompose_psi_2d");
  PsiDecomposition d;
  d.psi = psi;
  RadialProfile L = op_L(omega);
  for (double& x : L.v) x /= 4.0 * alpha;
  const RadialProfile Ra = op_Ralpha(omega, alpha);
  auto sin2 = [](double b) { return std::sin(2.0 * b); };
  d.psi_app = ScalarField::separable(L, sin2, Parity::odd_odd());
  d.r_part = ScalarField::separable(Ra, sin2, Parity::odd_odd());
  d.psi_err = psi - d.psi_app - d.r_part;
  d.psi_err.parity = psi.parity;
  d.ell2_residual = ell2_residual(omega, psi, alpha);
  return d;
}

VerificationReport verify_elliptic_estimates(const ScalarField& omega,
                                             const std::vector<double>& alphas,
                                             EllipticCheckOptions opt) {
  VerificationReport rep;
  rep.experiment = "elliptic-check";
  const double wn = l2_norm(omega);
  const char* names[] = {"dbb_psi_err", "a_R_dRb_psi_err", "a_dbb_psi2", "a2_R2_dRR_psi2", "hardy"};
  const char* anchors[] = {"elliptic1-rem", "elliptic1-rem", "crucial", "crucial", "hardy"};
  std::vector<std::vector<double>> ratios(5);
  double mode2_defect = 0.0, poincare_min = std::numeric_limits<double>::infinity();
  for (double a : alphas) {
    if (wn == 0.0) {
      for (auto& r : ratios) r.push_back(0.0);
      continue;
    }
    ScalarField psi = solve_psi_2d(omega, a);
    psi *= opt.psi_scale;
    const PsiDecomposition d = decompose_psi_2d(omega, psi, a);
    const ScalarField psi2 = d.psi_app + d.r_part;
    const ScalarField e_b = d_dbeta(d.psi_err);
    const ScalarField e_bb = d_dbeta(e_b);
    const ScalarField p2_s = R_dR(psi2);
    const ScalarField p2_R2RR = R_dR(p2_s) - p2_s;
    ratios[0].push_back(l2_norm(e_bb) / wn);
    ratios[1].push_back(a * l2_norm(R_dR(e_b)) / wn);
    ratios[2].push_back(a * l2_norm(d_dbeta(d_dbeta(psi2))) / wn);
    ratios[3].push_back(a * a * l2_norm(p2_R2RR) / wn);
    ratios[4].push_back(l2_norm(d.r_part) / wn);
    const double en = l2_norm(d.psi_err);
    if (en > 0.0) {
      mode2_defect = std::max(mode2_defect, l2_norm_dR(beta_project(d.psi_err, 2)) / en);
      poincare_min = std::min(poincare_min, std::pow(l2_norm(e_b) / en, 2));
    }
    rep.metrics["ell2_residual_alpha_" + std::to_string(a)] = d.ell2_residual;
  }
  for (std::size_t k = 0; k < 5; ++k) {
    const auto& r = ratios[k];
    const double mx = r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
    const double mn = r.empty() ? 0.0 : *std::min_element(r.begin(), r.end());
    rep.metrics[std::string("ratio_") + names[k]] = r;
    rep.check_le(std::string(names[k]) + "_cap", anchors[k], "sup over ladder of ratio <= cap", mx,
                 opt.cap);
    if (mx == 0.0) {
      rep.check_true(std::string(names[k]) + "_uniform", anchors[k], "0/0 sentinel", true,
                     "all ratios vanish");
    } else if (k == 4) {
      rep.check_le("hardy_variation", anchors[k], "(max - min) / max over the ladder < 0.5",
                   (mx - mn) / mx, opt.max_variation, -1e-15);
    } else {
      // alphas are expected largest first; growth as alpha decreases is what would break uniformity
      rep.check_le(std::string(names[k]) + "_uniform", anchors[k],
                   "sup over ladder / ratio at largest alpha - 1 < 0.5", mx / r.front() - 1.0,
                   opt.max_growth, -1e-15);
    }
  }
  if (wn > 0.0 && std::isfinite(poincare_min)) {
    rep.check_le("psi_err_mode2_content", "lam:Rest", "|P2 Psi_err| / |Psi_err| <= 1e-6", mode2_defect,
                 1e-6);
    rep.check_ge("psi_err_poincare", "lam:Rest", "|d_b Psi_err|^2 >= 9 |Psi_err|^2", poincare_min,
                 9.0, 0.05);
  }
  rep.metrics["alphas"] = alphas;
  rep.metrics["omega_l2"] = wn;
  return rep;
}

}  // namespace nilab
