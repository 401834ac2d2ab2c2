#pragma once

// Noise-free c-number equations of motion for the two cavity modes and the
// collective Lambda-atom operators, and their steady state.

#include <algorithm>
#include <cmath>
#include <optional>

#include "eitnoise/common.hpp"
#include "eitnoise/params.hpp"
#include "eitnoise/variables.hpp"

namespace eitnoise {

namespace detail {

struct Rates {
  double g1, g2, k1, k2;
  double coherence;  // (Gamma1 + Gamma2) / 2
  double w1_decay;   // (2 Gamma1 + Gamma2) / 3
  double w2_decay;   // (Gamma1 + 2 Gamma2) / 3
  double n;
  Complex drive1, drive2;  // sqrt(kappa_i) <a_i,in>, chosen so that <a_i> = alpha_i
};

inline Rates rates(const SystemParams& p) {
  return {p.g_1,
          p.g_2,
          p.kappa_1,
          p.kappa_2,
          0.5 * (p.gamma_rad_1 + p.gamma_rad_2),
          (2.0 * p.gamma_rad_1 + p.gamma_rad_2) / 3.0,
          (p.gamma_rad_1 + 2.0 * p.gamma_rad_2) / 3.0,
          p.n_atoms,
          0.5 * p.kappa_1 * p.alpha_1,
          0.5 * p.kappa_2 * p.alpha_2};
}

}  // namespace detail

/// Right-hand side of the mean-value equations, evaluated with every variable
/// (including conjugates) treated as independent. The W decay uses
/// (N + W1 + W2) = 3 Sigma00 for N atoms.
inline Vector12 drift_rhs(const SystemParams& p, const Vector12& x) {
  using enum Var;
  const auto r = detail::rates(p);
  auto v = [&](Var var) { return x(idx(var)); };
  const Complex a1 = v(Alpha1), a2 = v(Alpha2), a1c = v(Alpha1Conj), a2c = v(Alpha2Conj);
  const Complex s01 = v(Sigma01), s10 = v(Sigma10), s02 = v(Sigma02), s20 = v(Sigma20);
  const Complex s12 = v(Sigma12), s21 = v(Sigma21), w1 = v(W1), w2 = v(W2);
  const Complex pop = r.n + w1 + w2;

  Vector12 f;
  f(idx(Alpha1)) = -kI * r.g1 * s10 - 0.5 * r.k1 * a1 + r.drive1;
  f(idx(Alpha2)) = -kI * r.g2 * s20 - 0.5 * r.k2 * a2 + r.drive2;
  f(idx(Alpha1Conj)) = kI * r.g1 * s01 - 0.5 * r.k1 * a1c + std::conj(r.drive1);
  f(idx(Alpha2Conj)) = kI * r.g2 * s02 - 0.5 * r.k2 * a2c + std::conj(r.drive2);

  f(idx(Sigma10)) = -r.coherence * s10 + kI * r.g1 * w1 * a1 - kI * r.g2 * s12 * a2;
  f(idx(Sigma20)) = -r.coherence * s20 + kI * r.g2 * w2 * a2 - kI * r.g1 * s21 * a1;
  f(idx(Sigma01)) = -r.coherence * s01 - kI * r.g1 * w1 * a1c + kI * r.g2 * s21 * a2c;
  f(idx(Sigma02)) = -r.coherence * s02 - kI * r.g2 * w2 * a2c + kI * r.g1 * s12 * a1c;

  f(idx(Sigma21)) = -kI * r.g1 * s20 * a1c + kI * r.g2 * s01 * a2;
  f(idx(Sigma12)) = kI * r.g1 * s02 * a1 - kI * r.g2 * s10 * a2c;

  const Complex t1 = -kI * r.g1 * s01 * a1 + kI * r.g1 * s10 * a1c;
  const Complex t2 = -kI * r.g2 * s02 * a2 + kI * r.g2 * s20 * a2c;
  f(idx(W1)) = -r.w1_decay * pop + 2.0 * t1 + t2;
  f(idx(W2)) = -r.w2_decay * pop + t1 + 2.0 * t2;
  return f;
}

/// Analytic Jacobian of drift_rhs. At a stationary point this is the drift
/// matrix of the linearized fluctuations.
inline Matrix12 drift_jacobian(const SystemParams& p, const Vector12& x) {
  using enum Var;
  const auto r = detail::rates(p);
  auto v = [&](Var var) { return x(idx(var)); };
  Matrix12 b = Matrix12::Zero();
  auto add = [&](Var row, Var col, Complex value) { b(idx(row), idx(col)) += value; };

  const Complex a1 = v(Alpha1), a2 = v(Alpha2), a1c = v(Alpha1Conj), a2c = v(Alpha2Conj);
  const Complex s01 = v(Sigma01), s10 = v(Sigma10), s02 = v(Sigma02), s20 = v(Sigma20);
  const Complex s12 = v(Sigma12), s21 = v(Sigma21), w1 = v(W1), w2 = v(W2);

  add(Alpha1, Sigma10, -kI * r.g1);
  add(Alpha1, Alpha1, -0.5 * r.k1);
  add(Alpha2, Sigma20, -kI * r.g2);
  add(Alpha2, Alpha2, -0.5 * r.k2);
  add(Alpha1Conj, Sigma01, kI * r.g1);
  add(Alpha1Conj, Alpha1Conj, -0.5 * r.k1);
  add(Alpha2Conj, Sigma02, kI * r.g2);
  add(Alpha2Conj, Alpha2Conj, -0.5 * r.k2);

  add(Sigma10, Sigma10, -r.coherence);
  add(Sigma10, W1, kI * r.g1 * a1);
  add(Sigma10, Alpha1, kI * r.g1 * w1);
  add(Sigma10, Sigma12, -kI * r.g2 * a2);
  add(Sigma10, Alpha2, -kI * r.g2 * s12);

  add(Sigma20, Sigma20, -r.coherence);
  add(Sigma20, W2, kI * r.g2 * a2);
  add(Sigma20, Alpha2, kI * r.g2 * w2);
  add(Sigma20, Sigma21, -kI * r.g1 * a1);
  add(Sigma20, Alpha1, -kI * r.g1 * s21);

  add(Sigma01, Sigma01, -r.coherence);
  add(Sigma01, W1, -kI * r.g1 * a1c);
  add(Sigma01, Alpha1Conj, -kI * r.g1 * w1);
  add(Sigma01, Sigma21, kI * r.g2 * a2c);
  add(Sigma01, Alpha2Conj, kI * r.g2 * s21);

  add(Sigma02, Sigma02, -r.coherence);
  add(Sigma02, W2, -kI * r.g2 * a2c);
  add(Sigma02, Alpha2Conj, -kI * r.g2 * w2);
  add(Sigma02, Sigma12, kI * r.g1 * a1c);
  add(Sigma02, Alpha1Conj, kI * r.g1 * s12);

  add(Sigma21, Sigma20, -kI * r.g1 * a1c);
  add(Sigma21, Alpha1Conj, -kI * r.g1 * s20);
  add(Sigma21, Sigma01, kI * r.g2 * a2);
  add(Sigma21, Alpha2, kI * r.g2 * s01);

  add(Sigma12, Sigma02, kI * r.g1 * a1);
  add(Sigma12, Alpha1, kI * r.g1 * s02);
  add(Sigma12, Sigma10, -kI * r.g2 * a2c);
  add(Sigma12, Alpha2Conj, -kI * r.g2 * s10);

  // d t1 and d t2 (see drift_rhs), weighted 2:1 into W1 and 1:2 into W2.
  for (auto [row, w_t1, w_t2, decay] :
       {std::tuple{W1, 2.0, 1.0, r.w1_decay}, std::tuple{W2, 1.0, 2.0, r.w2_decay}}) {
    add(row, W1, -decay);
    add(row, W2, -decay);
    add(row, Sigma01, -w_t1 * kI * r.g1 * a1);
    add(row, Alpha1, -w_t1 * kI * r.g1 * s01);
    add(row, Sigma10, w_t1 * kI * r.g1 * a1c);
    add(row, Alpha1Conj, w_t1 * kI * r.g1 * s10);
    add(row, Sigma02, -w_t2 * kI * r.g2 * a2);
    add(row, Alpha2, -w_t2 * kI * r.g2 * s02);
    add(row, Sigma20, w_t2 * kI * r.g2 * a2c);
    add(row, Alpha2Conj, w_t2 * kI * r.g2 * s20);
  }
  return b;
}

/// Zeroth-order mean values around which the fluctuations are linearized.
class SteadyState {
 public:
  SteadyState() = default;

  static SteadyState from_values(const Vector12& values, double n_atoms) {
    SteadyState s;
    s.values_ = values;
    s.n_atoms_ = n_atoms;
    return s;
  }

  const Vector12& values() const { return values_; }
  Complex operator[](Var v) const { return values_(idx(v)); }

  Complex alpha_1() const { return (*this)[Var::Alpha1]; }
  Complex alpha_2() const { return (*this)[Var::Alpha2]; }
  Complex sigma01() const { return (*this)[Var::Sigma01]; }
  Complex sigma02() const { return (*this)[Var::Sigma02]; }
  Complex sigma12() const { return (*this)[Var::Sigma12]; }
  Complex sigma10() const { return (*this)[Var::Sigma10]; }
  Complex sigma20() const { return (*this)[Var::Sigma20]; }
  Complex sigma21() const { return (*this)[Var::Sigma21]; }
  double w1() const { return (*this)[Var::W1].real(); }
  double w2() const { return (*this)[Var::W2].real(); }

  double n_atoms() const { return n_atoms_; }
  double population_0() const { return (n_atoms_ + w1() + w2()) / 3.0; }
  double population_1() const { return population_0() - w1(); }
  double population_2() const { return population_0() - w2(); }

  /// max |x_i - conj(x_conj(i))|; zero for a physical state.
  double conjugate_mismatch() const { return (values_ - conjugate_state(values_)).cwiseAbs().maxCoeff(); }

  double residual = 0.0;
  int iterations = 0;

 private:
  Vector12 values_ = Vector12::Zero();
  double n_atoms_ = 1.0;
};

/// Builds a state vector from populations and coherences; conjugates are filled in.
inline SteadyState make_state(const SystemParams& p, double pop0, double pop1, double pop2,
                              Complex sigma01, Complex sigma02, Complex sigma12) {
  using enum Var;
  Vector12 x;
  x(idx(Alpha1)) = p.alpha_1;
  x(idx(Alpha2)) = p.alpha_2;
  x(idx(Alpha1Conj)) = std::conj(p.alpha_1);
  x(idx(Alpha2Conj)) = std::conj(p.alpha_2);
  x(idx(Sigma01)) = sigma01;
  x(idx(Sigma10)) = std::conj(sigma01);
  x(idx(Sigma02)) = sigma02;
  x(idx(Sigma20)) = std::conj(sigma02);
  x(idx(Sigma12)) = sigma12;
  x(idx(Sigma21)) = std::conj(sigma12);
  x(idx(W1)) = pop0 - pop1;
  x(idx(W2)) = pop0 - pop2;
  return SteadyState::from_values(x, p.n_atoms);
}

/// Euclidean norm of the mean-value right-hand sides at s.
inline double steady_state_residual(const SystemParams& p, const SteadyState& s) {
  return drift_rhs(p, s.values()).norm();
}

/// Dark superposition of the two ground states, decoupled from both fields.
inline SteadyState dark_state(const SystemParams& p) {
  const Complex om1 = p.rabi_1(), om2 = p.rabi_2();
  const double norm = std::norm(om1) + std::norm(om2);
  if (norm == 0.0)
    throw DegenerateSteadyState("solve_steady_state: both Rabi frequencies vanish; the ground-state manifold is stationary");
  const double n = p.n_atoms;
  // |D> ~ om2 |1> - om1 |2>, Sigma_jk = <D|j><k|D>
  return make_state(p, 0.0, n * std::norm(om2) / norm, n * std::norm(om1) / norm, 0.0, 0.0,
                    -n * std::conj(om2) * om1 / norm);
}

struct SteadyStateOptions {
  double tolerance = 1e-12;  // relative to max(1, N)
  int max_iterations = 200;
  std::optional<Vector12> initial_guess;
};

/// Stationary point of the noise-free equations. Symmetric scenarios use the
/// analytic dark state; otherwise a damped Newton iteration is started from
/// the dark state (or the supplied guess).
inline SteadyState solve_steady_state(const SystemParams& p, const SteadyStateOptions& opts = {}) {
  require_valid(p);
  const SteadyState dark = dark_state(p);
  const double scale = std::max(1.0, p.n_atoms);
  const double target = opts.tolerance * scale;

  if (p.is_symmetric() && !opts.initial_guess) {
    SteadyState s = dark;
    s.residual = steady_state_residual(p, s);
    return s;
  }

  Vector12 x = opts.initial_guess ? *opts.initial_guess : dark.values();
  double res = drift_rhs(p, x).norm();
  int it = 0;
  for (; it < opts.max_iterations && res > target; ++it) {
    const Vector12 f = drift_rhs(p, x);
    const Matrix12 jac = drift_jacobian(p, x);
    const Vector12 step = jac.completeOrthogonalDecomposition().solve(-f);
    double lambda = 1.0;
    Vector12 trial = x;
    double trial_res = res;
    while (lambda > 1e-10) {
      trial = x + lambda * step;
      trial = 0.5 * (trial + conjugate_state(trial));
      trial_res = drift_rhs(p, trial).norm();
      if (trial_res < (1.0 - 1e-4 * lambda) * res) break;
      lambda *= 0.5;
    }
    if (!(trial_res < res)) break;
    x = trial;
    res = trial_res;
  }
  if (!(res <= target))
    throw NoConvergence("solve_steady_state: Newton iteration stalled at residual " + std::to_string(res));
  SteadyState s = SteadyState::from_values(x, p.n_atoms);
  s.residual = res;
  s.iterations = it;
  return s;
}

}  // namespace eitnoise
