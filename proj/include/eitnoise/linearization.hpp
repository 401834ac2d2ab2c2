#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "eitnoise/common.hpp"
#include "eitnoise/model.hpp"
#include "eitnoise/params.hpp"
#include "eitnoise/variables.hpp"

namespace eitnoise {

/// Linearized fluctuation dynamics d(dO)/dt = B dO + G with <G G^T> = D delta.
struct FluctuationSystem {
  static constexpr auto ordering = kOrdering;
  Matrix12 drift = Matrix12::Zero();
  Matrix12 diffusion = Matrix12::Zero();
};

struct LinearizationOptions {
  // Maximum accepted steady-state residual, relative to max(1, N).
  double residual_tolerance = 1e-9;
};

namespace detail {

inline void require_stationary(const SystemParams& p, const SteadyState& s, const LinearizationOptions& opts,
                               const char* who) {
  const double res = steady_state_residual(p, s);
  const double limit = opts.residual_tolerance * std::max(1.0, p.n_atoms);
  if (!(res <= limit))
    throw NonStationaryState(std::string(who) + ": steady-state residual " + std::to_string(res) +
                             " exceeds " + std::to_string(limit));
}

}  // namespace detail

inline Matrix12 build_drift(const SystemParams& p, const SteadyState& s, const LinearizationOptions& opts = {}) {
  detail::require_stationary(p, s, opts, "build_drift");
  return drift_jacobian(p, s.values());
}

/// Diffusion matrix in the normally ordered c-number representation.
///
/// Atomic block: the c-number diffusion coefficients of the Lambda system,
/// mirrored so that D(x, y) == D(y, x). Field block: squeezed-vacuum input
/// correlators with <f* f> = kappa sinh^2 r and <f f> = -kappa cosh r sinh r
/// exp(i theta); the vacuum commutator contribution is not part of the normal
/// ordered representation and is restored when output spectra are formed.
/// Atomic and field reservoirs are uncorrelated.
inline Matrix12 build_diffusion(const SystemParams& p, const SteadyState& s, const LinearizationOptions& opts = {}) {
  using enum Var;
  detail::require_stationary(p, s, opts, "build_diffusion");
  Matrix12 d = Matrix12::Zero();
  auto set = [&](Var a, Var b, Complex value) {
    d(idx(a), idx(b)) = value;
    d(idx(b), idx(a)) = value;
  };
  auto minus_cc = [](Complex z) { return z - std::conj(z); };

  const double gam1 = p.gamma_rad_1, gam2 = p.gamma_rad_2, gam12 = p.gamma_cross;
  const Complex om1 = p.g_1 * s.alpha_1(), om2 = p.g_2 * s.alpha_2();
  const Complex s01 = s.sigma01(), s02 = s.sigma02(), s12 = s.sigma12();
  const Complex s10 = s.sigma10(), s20 = s.sigma20();
  const double p0 = s.population_0(), p1 = s.population_1();
  const double w1 = s.w1(), w2 = s.w2();

  set(W1, W1, (4.0 * gam1 + gam2) * p0 - kI * minus_cc(4.0 * om1 * s01 + om2 * s02));
  set(W2, W2, (gam1 + 4.0 * gam2) * p0 - kI * minus_cc(4.0 * om2 * s02 + om1 * s01));
  set(W1, W2, (2.0 * gam1 + 2.0 * gam2) * p0 - 2.0 * kI * minus_cc(om2 * s02 + om1 * s01));

  const Complex z = kI * om2 * s12;
  set(Sigma12, Sigma21, gam1 * p0 + 2.0 * gam12 * p1 - (z + std::conj(z)));

  const Complex d02_12 = -kI * std::conj(om2) * s12;
  set(Sigma02, Sigma12, d02_12);
  set(Sigma20, Sigma21, std::conj(d02_12));

  const Complex d02_21 = gam12 * s01;
  set(Sigma02, Sigma21, d02_21);
  set(Sigma20, Sigma12, std::conj(d02_21));

  const Complex dw1_10 = kI * om2 * s12;
  set(W1, Sigma10, dw1_10);
  set(W1, Sigma01, std::conj(dw1_10));

  const Complex dw1_21 = -2.0 * kI * std::conj(om1) * s20 + 2.0 * kI * om2 * s01;
  set(W1, Sigma21, dw1_21);
  set(W1, Sigma12, std::conj(dw1_21));

  const Complex dw2_10 = -kI * om2 * s12;
  set(W2, Sigma10, dw2_10);
  set(W2, Sigma01, std::conj(dw2_10));

  const Complex dw2_21 = -kI * std::conj(om1) * s20 + kI * om2 * s01;
  set(W2, Sigma21, dw2_21);
  set(W2, Sigma12, std::conj(dw2_21));

  const Complex d10_10 = 2.0 * kI * om1 * s10;
  set(Sigma10, Sigma10, d10_10);
  set(Sigma01, Sigma01, std::conj(d10_10));

  const Complex d01_02 = -kI * std::conj(om1) * s02 - kI * std::conj(om2) * s01;
  set(Sigma01, Sigma02, d01_02);
  set(Sigma20, Sigma10, std::conj(d01_02));

  const Complex d20_20 = 2.0 * kI * om2 * s20;
  set(Sigma20, Sigma20, d20_20);
  set(Sigma02, Sigma02, std::conj(d20_20));

  const Complex d01_12 = gam12 * s02 + kI * om2 * (w1 - w2) + kI * om1 * s12;
  set(Sigma01, Sigma12, d01_12);
  set(Sigma21, Sigma10, std::conj(d01_12));

  for (auto [spec, kappa, a, ac] : {std::tuple{p.squeeze_1, p.kappa_1, Alpha1, Alpha1Conj},
                                    std::tuple{p.squeeze_2, p.kappa_2, Alpha2, Alpha2Conj}}) {
    const double ch = std::cosh(spec.r), sh = std::sinh(spec.r);
    const Complex ff = -kappa * ch * sh * std::exp(kI * spec.theta);
    set(a, a, ff);
    set(ac, ac, std::conj(ff));
    set(a, ac, kappa * sh * sh);
  }
  return d;
}

inline FluctuationSystem build_fluctuation_system(const SystemParams& p, const SteadyState& s,
                                                  const LinearizationOptions& opts = {}) {
  return {build_drift(p, s, opts), build_diffusion(p, s, opts)};
}

struct StabilityReport {
  std::vector<Complex> eigenvalues;
  double max_real = 0.0;
  double tolerance = 0.0;
  std::vector<int> soft_modes;  // indices into eigenvalues with |Re| <= tolerance
  bool stable = false;
};

/// Eigenvalues of the drift. Real parts within 1e-9 * ||B|| of zero are soft.
template <typename Derived>
StabilityReport stability_check(const Eigen::MatrixBase<Derived>& drift, double relative_tolerance = 1e-9) {
  using MatrixType = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  const MatrixType b = drift.template cast<Complex>();
  Eigen::ComplexEigenSolver<MatrixType> solver(b, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) throw EigenFailure("stability_check: eigensolver did not converge");

  StabilityReport report;
  report.tolerance = relative_tolerance * b.norm();
  report.max_real = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const Complex ev = solver.eigenvalues()(i);
    report.eigenvalues.push_back(ev);
    report.max_real = std::max(report.max_real, ev.real());
  }
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
            [](Complex a, Complex b) { return a.real() != b.real() ? a.real() > b.real() : a.imag() < b.imag(); });
  for (std::size_t i = 0; i < report.eigenvalues.size(); ++i)
    if (std::abs(report.eigenvalues[i].real()) <= report.tolerance) report.soft_modes.push_back(static_cast<int>(i));
  report.stable = report.max_real < -report.tolerance;
  return report;
}

inline StabilityReport stability_check(const FluctuationSystem& fs) { return stability_check(fs.drift); }

/// Stationary covariance X = <dO dO^T> solving B X + X B^T + D = 0, which equals
/// the frequency integral of spectrum_matrix(B, D, w) / (2 pi).
template <typename DerivedB, typename DerivedD>
Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic> lyapunov_covariance(const Eigen::MatrixBase<DerivedB>& drift,
                                                                             const Eigen::MatrixBase<DerivedD>& diffusion,
                                                                             double relative_tolerance = 1e-9) {
  using MatrixType = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  const MatrixType b = drift.template cast<Complex>();
  const MatrixType d = diffusion.template cast<Complex>();
  const Eigen::Index n = b.rows();
  if (b.cols() != n || d.rows() != n || d.cols() != n)
    throw DomainError("lyapunov_covariance: B and D must be square and of equal size");

  Eigen::ComplexEigenSolver<MatrixType> solver(b, false);
  if (solver.info() != Eigen::Success) throw EigenFailure("lyapunov_covariance: eigensolver did not converge");
  const auto& ev = solver.eigenvalues();
  const double tol = relative_tolerance * std::max(1.0, b.norm());
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      if (std::abs(ev(i) + ev(j)) <= tol)
        throw SingularLyapunov("lyapunov_covariance: eigenvalues " + std::to_string(i) + " and " +
                               std::to_string(j) + " sum to zero; no unique covariance");

  // (I kron B + B kron I) vec(X) = -vec(D), column-major vec.
  const MatrixType id = MatrixType::Identity(n, n);
  MatrixType op = MatrixType::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      op.block(i * n, j * n, n, n) += id(i, j) * b;
      op.block(i * n, j * n, n, n) += b(i, j) * id;
    }
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> rhs = -Eigen::Map<const Eigen::Matrix<Complex, Eigen::Dynamic, 1>>(d.data(), n * n);
  Eigen::Matrix<Complex, Eigen::Dynamic, 1> vec = op.partialPivLu().solve(rhs);
  return Eigen::Map<MatrixType>(vec.data(), n, n);
}

inline Matrix12 lyapunov_covariance(const FluctuationSystem& fs) {
  return lyapunov_covariance(fs.drift, fs.diffusion);
}

}  // namespace eitnoise
