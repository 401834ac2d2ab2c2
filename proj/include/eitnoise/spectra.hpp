#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/LU>

#include "eitnoise/common.hpp"
#include "eitnoise/linearization.hpp"
#include "eitnoise/model.hpp"
#include "eitnoise/params.hpp"
#include "eitnoise/variables.hpp"

namespace eitnoise {

/// Output channel. Mode 1 is the pump, mode 2 the probe.
enum class Channel { Pump = 1, Probe = 2 };

inline constexpr double kSingularConditionLimit = 1e14;

/// S(w) = (B + i w)^-1 D (B^T - i w)^-1, i.e. <dO(w) dO(w')^T> = S(w) delta(w + w').
/// Two LU solves against D, carried out in long double: near the slow dark-state
/// mode the double-precision result loses about three digits.
template <typename DerivedB, typename DerivedD>
Eigen::Matrix<Complex, DerivedB::RowsAtCompileTime, DerivedB::ColsAtCompileTime> spectrum_matrix(
    const Eigen::MatrixBase<DerivedB>& drift, const Eigen::MatrixBase<DerivedD>& diffusion, double omega) {
  using Wide = std::complex<long double>;
  using WideMatrix = Eigen::Matrix<Wide, DerivedB::RowsAtCompileTime, DerivedB::ColsAtCompileTime>;
  const WideMatrix b = drift.template cast<Complex>().template cast<Wide>();
  const WideMatrix d = diffusion.template cast<Complex>().template cast<Wide>();
  const WideMatrix shift = Wide(0.0L, omega) * WideMatrix::Identity(b.rows(), b.cols());

  Eigen::PartialPivLU<WideMatrix> plus((b + shift).eval());
  if (!(plus.rcond() * kSingularConditionLimit > 1.0))
    throw SingularAtFrequency("spectrum_matrix: B + i w is numerically singular at w = " + std::to_string(omega));
  Eigen::PartialPivLU<WideMatrix> minus((b - shift).eval());
  if (!(minus.rcond() * kSingularConditionLimit > 1.0))
    throw SingularAtFrequency("spectrum_matrix: B - i w is numerically singular at w = " + std::to_string(omega));

  const WideMatrix left = plus.solve(d);
  // left * (B^T - i w)^-1 == ((B - i w)^-1 left^T)^T
  const WideMatrix s = minus.solve(left.transpose()).transpose();
  return s.template cast<Complex>();
}

/// Field-phase and conjugate-phase parts of an output projection:
/// c(w, theta) = exp(i theta) field + exp(-i theta) conj.
struct ProjectionParts {
  Vector12 field = Vector12::Zero();
  Vector12 conj = Vector12::Zero();
};

/// Coefficients of dY_out(w) in terms of dO(w), from the input-output relation
/// da_out(w) = ((kappa/2 + i w) da(w) - i g dSigma_i0(w)) / sqrt(kappa).
inline ProjectionParts projection_parts(const SystemParams& p, Channel channel, double omega) {
  using enum Var;
  const bool pump = channel == Channel::Pump;
  const double kappa = pump ? p.kappa_1 : p.kappa_2;
  const double g = pump ? p.g_1 : p.g_2;
  const double root = std::sqrt(kappa);
  const Complex cavity = (0.5 * kappa + kI * omega) / root;
  ProjectionParts parts;
  parts.field(idx(pump ? Alpha1 : Alpha2)) = cavity;
  parts.field(idx(pump ? Sigma10 : Sigma20)) = -kI * g / root;
  parts.conj(idx(pump ? Alpha1Conj : Alpha2Conj)) = cavity;
  parts.conj(idx(pump ? Sigma01 : Sigma02)) = kI * g / root;
  return parts;
}

inline Vector12 output_projection(const SystemParams& p, Channel channel, double omega, double theta) {
  const auto parts = projection_parts(p, channel, omega);
  const Complex phase = std::exp(kI * theta);
  return phase * parts.field + std::conj(phase) * parts.conj;
}

/// Re <dY_a(w; t1) dY_b(-w; t2)> as a trigonometric polynomial in the angles.
struct QuadratureKernel {
  Complex sum_plus, diff_plus, diff_minus, sum_minus;

  double value(double theta_a, double theta_b) const {
    const Complex s = std::exp(kI * (theta_a + theta_b));
    const Complex d = std::exp(kI * (theta_a - theta_b));
    return (sum_plus * s + diff_plus * d + diff_minus * std::conj(d) + sum_minus * std::conj(s)).real();
  }
};

/// Shared per-frequency spectrum with quadrature projections for any angle.
class SpectrumEvaluator {
 public:
  struct Point {
    double omega = 0.0;
    Matrix12 s;
  };

  SpectrumEvaluator(SystemParams params, FluctuationSystem system)
      : params_(std::move(params)), system_(std::move(system)) {}

  const SystemParams& params() const { return params_; }
  const FluctuationSystem& system() const { return system_; }

  Point at(double omega) const { return {omega, spectrum_matrix(system_.drift, system_.diffusion, omega)}; }

  /// Normally ordered quadrature spectrum plus the vacuum unit (coherent input reads 1).
  double quadrature_noise(const Point& pt, Channel channel, double theta) const {
    const Vector12 c = output_projection(params_, channel, pt.omega, theta);
    const Vector12 c_partner = output_projection(params_, channel, -pt.omega, theta);
    return 1.0 + (c.transpose() * pt.s * c_partner).value().real();
  }

  /// Symmetrized cross spectrum of the pump theta_pump and probe theta_probe
  /// quadratures: Re <dY1(w) dY2(-w)>.
  double cross_correlation(const Point& pt, double theta_pump, double theta_probe) const {
    const Vector12 c1 = output_projection(params_, Channel::Pump, pt.omega, theta_pump);
    const Vector12 c2 = output_projection(params_, Channel::Probe, -pt.omega, theta_probe);
    return (c1.transpose() * pt.s * c2).value().real();
  }

  double quadrature_noise(double omega, Channel channel, double theta) const {
    return quadrature_noise(at(omega), channel, theta);
  }

  QuadratureKernel kernel(const Point& pt, Channel a, Channel b) const {
    const auto pa = projection_parts(params_, a, pt.omega);
    const auto pb = projection_parts(params_, b, -pt.omega);
    const Vector12 s_field = pt.s * pb.field, s_conj = pt.s * pb.conj;
    return {(pa.field.transpose() * s_field).value(),
            (pa.field.transpose() * s_conj).value(), (pa.conj.transpose() * s_field).value(),
            (pa.conj.transpose() * s_conj).value()};
  }

 private:
  SystemParams params_;
  FluctuationSystem system_;
};

/// Steady state, linearization and evaluator in one step.
inline SpectrumEvaluator make_evaluator(const SystemParams& p, const SteadyStateOptions& ss = {},
                                        const LinearizationOptions& lin = {}) {
  const SteadyState s = solve_steady_state(p, ss);
  return SpectrumEvaluator(p, build_fluctuation_system(p, s, lin));
}

inline double output_quadrature_noise(const FluctuationSystem& fs, const SystemParams& p, double omega,
                                      double theta, Channel channel) {
  return SpectrumEvaluator(p, fs).quadrature_noise(omega, channel, theta);
}

/// (1 / 2 pi) * trapezoid integral of spectrum_matrix over [-half_width, half_width].
inline Matrix12 covariance_by_quadrature(const FluctuationSystem& fs, double half_width = 50.0, int points = 20001) {
  if (points < 2 || !(half_width > 0.0)) throw InvalidParameters("covariance_by_quadrature: need >= 2 points");
  const double h = 2.0 * half_width / (points - 1);
  Matrix12 acc = Matrix12::Zero();
  for (int k = 0; k < points; ++k) {
    const double w = -half_width + h * k;
    const double weight = (k == 0 || k == points - 1) ? 0.5 : 1.0;
    acc += weight * spectrum_matrix(fs.drift, fs.diffusion, w);
  }
  return acc * (h / (2.0 * kPi));
}

// ---------------------------------------------------------------------------
// Closed-form spectra of the symmetric regime with a coherent pump and a
// theta=0 squeezed probe, evaluated as printed.

/// f(theta) = e^{-2 r2} cos^2 theta + e^{2 r2} sin^2 theta
inline double squeeze_factor(double r2, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  return std::exp(-2.0 * r2) * c * c + std::exp(2.0 * r2) * s * s;
}

/// f2(theta1, theta2) of the cross spectrum.
inline double squeeze_factor_cross(double r2, double theta1, double theta2) {
  return 0.5 * (std::exp(-2.0 * r2) * std::cos(theta1) * std::cos(theta2) +
                std::exp(2.0 * r2) * std::sin(theta1) * std::sin(theta2) - std::cos(theta1 - theta2));
}

struct ClosedFormInputs {
  double cooperativity, gamma, kappa, rabi_1, rabi_2, r2;
};

inline ClosedFormInputs closed_form_inputs(const SystemParams& p, const char* who) {
  const auto report = validate_params(p);
  if (!report.closed_forms_applicable) {
    std::string msg = std::string(who) + ": closed form not applicable:";
    for (const auto& v : report.violations) msg += " " + v + ";";
    for (const auto& n : report.closed_form_notes) msg += " " + n + ";";
    throw DomainError(msg);
  }
  return {*p.cooperativity(), p.gamma_rad_1, p.kappa_1, p.rabi_1().real(), p.rabi_2().real(), p.squeeze_2.r};
}

namespace detail {

struct ClosedFormTerms {
  double a, b, m;
};

inline ClosedFormTerms closed_form_terms(const ClosedFormInputs& in, double w, const char* who) {
  const double c = in.cooperativity, big = in.gamma, k = in.kappa;
  const double o1 = in.rabi_1 * in.rabi_1, o2 = in.rabi_2 * in.rabi_2;
  const double sum = o1 + o2, diff = o1 - o2;
  const double w2 = w * w, k2 = k * k, lor = k2 + 4.0 * w2;
  ClosedFormTerms t;
  t.a = 4.0 * c * c * big * big * w2 * k2 * (k2 * diff * diff + 4.0 * w2 * sum * sum);
  t.b = lor * sum * sum *
        (4.0 * c * big * w2 * k * (-2.0 * w2 + 2.0 * sum + k * big) +
         lor * (w2 * (big * big + w2) - (2.0 * w2 - sum) * sum));
  t.m = 4.0 * c * c * k2 * big * big * w2 * lor * sum * sum + t.b;
  if (t.m == 0.0 || !std::isfinite(t.m)) throw DomainError(std::string(who) + ": denominator M vanishes");
  return t;
}

}  // namespace detail

inline double closed_form_probe(const SystemParams& p, double omega, double theta) {
  const auto in = closed_form_inputs(p, "closed_form_probe");
  const auto t = detail::closed_form_terms(in, omega, "closed_form_probe");
  const double c = in.cooperativity, big = in.gamma, k = in.kappa;
  const double o1 = in.rabi_1 * in.rabi_1, o2 = in.rabi_2 * in.rabi_2;
  const double w2 = omega * omega, k2 = k * k, lor = k2 + 4.0 * w2;
  const double f = squeeze_factor(in.r2, theta);
  const double excess = 8.0 * c * big * big * w2 * k2 * (2.0 * c * o1 * o2 * k2 + lor * o1 * (o1 + o2));
  const double weighted = -4.0 * c * k2 * big * big * w2 * lor * (o1 + o2) * (o1 - o2) + t.a + t.b;
  return (excess + f * weighted) / t.m;
}

inline double closed_form_pump(const SystemParams& p, double omega, double theta) {
  const auto in = closed_form_inputs(p, "closed_form_pump");
  const auto t = detail::closed_form_terms(in, omega, "closed_form_pump");
  const double c = in.cooperativity, big = in.gamma, k = in.kappa;
  const double o1 = in.rabi_1 * in.rabi_1, o2 = in.rabi_2 * in.rabi_2;
  const double f = squeeze_factor(in.r2, theta);
  return (16.0 * c * c * big * big * omega * omega * o1 * o2 * std::pow(k, 4) * f + t.a + t.b) / t.m;
}

/// theta1 is the pump quadrature angle, theta2 the probe angle.
inline double closed_form_correlation(const SystemParams& p, double omega, double theta1, double theta2) {
  const auto in = closed_form_inputs(p, "closed_form_correlation");
  const auto t = detail::closed_form_terms(in, omega, "closed_form_correlation");
  const double c = in.cooperativity, big = in.gamma, k = in.kappa;
  const double o1 = in.rabi_1 * in.rabi_1, o2 = in.rabi_2 * in.rabi_2;
  const double w2 = omega * omega, k2 = k * k;
  const double f2 = squeeze_factor_cross(in.r2, theta1, theta2);
  return f2 * 8.0 * big * big * k2 * w2 * in.rabi_1 * in.rabi_2 * c *
         ((k2 + 4.0 * w2) * (o1 + o2) - 2.0 * c * k2 * (o1 - o2)) / t.m;
}

// ---------------------------------------------------------------------------
// Grid evaluation.

enum class GridSpacing { Linear, Log };

/// Frequencies on -[lo, hi] and +[lo, hi], `per_side` points each, sorted, 0 excluded.
inline std::vector<double> symmetric_grid(double lo, double hi, int per_side, GridSpacing spacing = GridSpacing::Log) {
  if (!(lo > 0.0) || !(hi > lo) || per_side < 1)
    throw InvalidParameters("symmetric_grid: need 0 < lo < hi and at least one point per side");
  std::vector<double> half(static_cast<std::size_t>(per_side));
  for (int i = 0; i < per_side; ++i) {
    const double t = per_side == 1 ? 0.0 : static_cast<double>(i) / (per_side - 1);
    half[static_cast<std::size_t>(i)] = spacing == GridSpacing::Log ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
  }
  std::vector<double> grid;
  grid.reserve(2 * half.size());
  for (auto it = half.rbegin(); it != half.rend(); ++it) grid.push_back(-*it);
  grid.insert(grid.end(), half.begin(), half.end());
  return grid;
}

/// Runs fn(i) for i in [0, n) on up to `threads` workers; each index is visited once.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  const std::size_t workers = std::clamp<std::size_t>(threads < 1 ? 1 : static_cast<std::size_t>(threads), 1, std::max<std::size_t>(n, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < n; i += workers) fn(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

enum class SpectrumSource { Numeric, ClosedForm, Both };

struct SpectrumRequest {
  std::vector<double> omegas;
  double theta_probe = 0.0;
  double theta_pump = 0.0;
  SpectrumSource source = SpectrumSource::Both;
  int threads = 1;
};

struct SpectrumRow {
  double omega = 0.0;
  std::optional<double> probe_numeric, probe_closed_form;
  std::optional<double> pump_numeric, pump_closed_form;
  std::optional<double> correlation_numeric, correlation_closed_form;
};

struct SpectrumResult {
  std::vector<SpectrumRow> rows;
  bool closed_forms_applicable = false;
};

inline SpectrumResult evaluate_spectrum(const SystemParams& p, const SpectrumRequest& req,
                                        const SteadyStateOptions& ss = {}, const LinearizationOptions& lin = {}) {
  if (req.omegas.empty()) throw InvalidParameters("evaluate_spectrum: empty frequency grid");
  for (double w : req.omegas)
    if (!std::isfinite(w)) throw InvalidParameters("evaluate_spectrum: non-finite frequency");
  require_valid(p);

  SpectrumResult result;
  result.closed_forms_applicable = validate_params(p).closed_forms_applicable;
  const bool numeric = req.source != SpectrumSource::ClosedForm;
  const bool closed = req.source != SpectrumSource::Numeric;
  if (closed && req.source == SpectrumSource::ClosedForm && !result.closed_forms_applicable)
    throw DomainError("evaluate_spectrum: closed forms requested outside the symmetric regime");

  std::optional<SpectrumEvaluator> evaluator;
  if (numeric) evaluator.emplace(make_evaluator(p, ss, lin));

  result.rows.resize(req.omegas.size());
  parallel_for(req.omegas.size(), req.threads, [&](std::size_t i) {
    SpectrumRow row;
    row.omega = req.omegas[i];
    if (evaluator) {
      const auto pt = evaluator->at(row.omega);
      row.probe_numeric = evaluator->quadrature_noise(pt, Channel::Probe, req.theta_probe);
      row.pump_numeric = evaluator->quadrature_noise(pt, Channel::Pump, req.theta_pump);
      row.correlation_numeric = evaluator->cross_correlation(pt, req.theta_pump, req.theta_probe);
    }
    if (closed && result.closed_forms_applicable) {
      row.probe_closed_form = closed_form_probe(p, row.omega, req.theta_probe);
      row.pump_closed_form = closed_form_pump(p, row.omega, req.theta_pump);
      row.correlation_closed_form = closed_form_correlation(p, row.omega, req.theta_pump, req.theta_probe);
    }
    result.rows[i] = row;
  });
  return result;
}

}  // namespace eitnoise
