#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <iterator>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "eitnoise/common.hpp"
#include "eitnoise/params.hpp"
#include "eitnoise/spectra.hpp"

namespace eitnoise {

// ---------------------------------------------------------------------------
// Approximate extremum positions and values of the symmetric regime.

struct SymmetricRegime {
  double cooperativity, gamma, kappa, rabi_1_sq, rabi_2_sq;

  double rabi_sum() const { return rabi_1_sq + rabi_2_sq; }
  double collective() const { return cooperativity * kappa * gamma; }
};

inline std::optional<SymmetricRegime> symmetric_regime(const SystemParams& p) {
  if (!validate_params(p).closed_forms_applicable) return std::nullopt;
  const double o1 = p.rabi_1().real(), o2 = p.rabi_2().real();
  return SymmetricRegime{*p.cooperativity(), p.gamma_rad_1, p.kappa_1, o1 * o1, o2 * o2};
}

namespace approx {

/// Inner extremum position. The radical uses C kappa Gamma.
inline double inner_position(const SymmetricRegime& r) {
  return r.kappa * std::sqrt(r.rabi_sum()) / (2.0 * std::sqrt(r.collective() + r.rabi_sum()));
}

inline double outer_position(const SymmetricRegime& r) { return std::sqrt(r.rabi_sum() + r.collective()); }

/// Fraction of (1 - f) moved between the channels at the inner extremum.
inline double inner_transfer(const SymmetricRegime& r) {
  const double s = r.rabi_sum();
  const double den = s * s * std::pow(2.0 * s + r.collective(), 2);
  return 4.0 * std::pow(r.collective(), 2) * r.rabi_1_sq * r.rabi_2_sq / den;
}

inline double inner_probe(const SymmetricRegime& r, double f) { return f + inner_transfer(r) * (1.0 - f); }
inline double inner_pump(const SymmetricRegime& r, double f) { return 1.0 - inner_transfer(r) * (1.0 - f); }

inline double outer_probe(const SymmetricRegime& r, double f) {
  const double s = r.rabi_sum();
  return f + 2.0 * r.cooperativity * (1.0 - f) * r.kappa * r.kappa * r.rabi_1_sq / (s * (s + r.collective()));
}

inline double outer_pump(const SymmetricRegime& r, double f) {
  const double s = r.rabi_sum();
  return 1.0 - std::pow(r.cooperativity, 2) * (1.0 - f) * std::pow(r.kappa, 4) * r.rabi_1_sq * r.rabi_2_sq /
                   (s * s * std::pow(s + r.collective(), 2));
}

}  // namespace approx

// ---------------------------------------------------------------------------
// Extrema.

enum class ExtremumKind { Inner, Outer };
enum class ExtremumType { Maximum, Minimum };

struct Extremum {
  ExtremumKind kind = ExtremumKind::Inner;
  ExtremumType type = ExtremumType::Maximum;
  double omega = 0.0;
  double value = 0.0;
  // Present for the absorption-type extrema of a closed-form scenario.
  std::optional<double> approx_omega;
  std::optional<double> approx_value;
  std::optional<double> omega_deviation;  // relative, |omega| vs approx
  std::optional<double> value_deviation;  // relative
};

struct ExtremaOptions {
  double omega_min = 1e-3;
  double omega_max = 10.0;
  int points_per_side = 2001;
  double refine_tolerance = 1e-6;
  // Spectra whose total variation on the range is below this are treated as flat.
  double flatness_tolerance = 1e-9;
  SpectrumSource source = SpectrumSource::Numeric;
};

struct ExtremaReport {
  Channel channel = Channel::Probe;
  double theta = 0.0;
  std::vector<Extremum> extrema;

  std::vector<Extremum> of_type(ExtremumType t) const {
    std::vector<Extremum> out;
    std::copy_if(extrema.begin(), extrema.end(), std::back_inserter(out), [t](const Extremum& e) { return e.type == t; });
    return out;
  }
};

/// Type of the extrema where probe squeezing is absorbed (probe) or shows up (pump).
inline ExtremumType absorption_type(Channel channel, double f) {
  const bool below_vacuum = f < 1.0;
  if (channel == Channel::Probe) return below_vacuum ? ExtremumType::Maximum : ExtremumType::Minimum;
  return below_vacuum ? ExtremumType::Minimum : ExtremumType::Maximum;
}

namespace detail {

/// Golden-section search for a maximum of fn on [a, b].
inline double golden_maximum(const std::function<double(double)>& fn, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = fn(c), fd = fn(d);
  while (std::abs(b - a) > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  return 0.5 * (a + b);
}

inline std::function<double(double)> spectrum_function(const SystemParams& p, Channel channel, double theta,
                                                       SpectrumSource source) {
  if (source == SpectrumSource::ClosedForm) {
    if (channel == Channel::Probe) return [p, theta](double w) { return closed_form_probe(p, w, theta); };
    return [p, theta](double w) { return closed_form_pump(p, w, theta); };
  }
  auto ev = std::make_shared<SpectrumEvaluator>(make_evaluator(p));
  return [ev, channel, theta](double w) { return ev->quadrature_noise(w, channel, theta); };
}

}  // namespace detail

/// Local extrema of the channel spectrum on +-[omega_min, omega_max]: coarse
/// log-spaced scan per half-axis, then golden-section refinement.
inline ExtremaReport find_extrema(const SystemParams& p, double theta, Channel channel, const ExtremaOptions& opts = {}) {
  require_valid(p);
  if (!(opts.omega_min > 0.0) || !(opts.omega_max > opts.omega_min) || opts.points_per_side < 3)
    throw InvalidParameters("find_extrema: need 0 < omega_min < omega_max and at least 3 scan points");
  const auto fn = detail::spectrum_function(p, channel, theta, opts.source);
  const auto regime = symmetric_regime(p);
  const double f = squeeze_factor(p.squeeze_2.r, theta);
  const ExtremumType absorbing = absorption_type(channel, f);
  const double rabi_scale = std::sqrt(std::norm(p.rabi_1()) + std::norm(p.rabi_2()));

  ExtremaReport report{channel, normalize_phase(theta), {}};
  const auto half = symmetric_grid(opts.omega_min, opts.omega_max, opts.points_per_side, GridSpacing::Log);
  double lowest = std::numeric_limits<double>::infinity(), highest = -lowest;

  for (double sign : {-1.0, 1.0}) {
    std::vector<double> ws, vs;
    for (double w : half)
      if (w * sign > 0.0) ws.push_back(w);
    if (sign < 0.0) std::reverse(ws.begin(), ws.end());  // increasing |w|
    for (double w : ws) {
      vs.push_back(fn(w));
      lowest = std::min(lowest, vs.back());
      highest = std::max(highest, vs.back());
    }

    // Sign changes of the discrete slope; steps at rounding level keep the previous sign.
    int prev_sign = 0;
    std::size_t prev_index = 0;
    for (std::size_t i = 1; i < vs.size(); ++i) {
      const double dv = vs[i] - vs[i - 1];
      const double noise = 1e-12 * std::max({1.0, std::abs(vs[i]), std::abs(vs[i - 1])});
      const int s = dv > noise ? 1 : (dv < -noise ? -1 : 0);
      if (s == 0) continue;
      if (prev_sign != 0 && s != prev_sign) {
        const bool is_max = prev_sign > 0;
        const double a = std::abs(ws[prev_index > 0 ? prev_index - 1 : 0]);
        const double b = std::abs(ws[i]);
        auto target = [&](double r) { return (is_max ? 1.0 : -1.0) * fn(sign * r); };
        Extremum e;
        e.type = is_max ? ExtremumType::Maximum : ExtremumType::Minimum;
        e.omega = sign * detail::golden_maximum(target, a, b, opts.refine_tolerance);
        e.value = fn(e.omega);
        e.kind = std::abs(e.omega) < rabi_scale ? ExtremumKind::Inner : ExtremumKind::Outer;
        report.extrema.push_back(e);
      }
      prev_sign = s;
      prev_index = i;
    }
  }

  if (!(highest - lowest > opts.flatness_tolerance) || report.extrema.empty())
    throw NoExtrema("find_extrema: spectrum is monotone or flat on the requested range");

  for (auto& e : report.extrema) {
    if (!regime || e.type != absorbing) continue;
    const bool inner = e.kind == ExtremumKind::Inner;
    e.approx_omega = inner ? approx::inner_position(*regime) : approx::outer_position(*regime);
    if (channel == Channel::Probe)
      e.approx_value = inner ? approx::inner_probe(*regime, f) : approx::outer_probe(*regime, f);
    else
      e.approx_value = inner ? approx::inner_pump(*regime, f) : approx::outer_pump(*regime, f);
    e.omega_deviation = std::abs(std::abs(e.omega) - *e.approx_omega) / *e.approx_omega;
    e.value_deviation = std::abs(e.value - *e.approx_value) / std::abs(*e.approx_value);
  }
  std::sort(report.extrema.begin(), report.extrema.end(),
            [](const Extremum& x, const Extremum& y) { return x.omega < y.omega; });
  return report;
}

// ---------------------------------------------------------------------------
// Probe to pump squeezing transfer.

struct TransferReport {
  double omega = 0.0;
  double theta = 0.0;
  double probe = 0.0;
  double pump = 0.0;
  double f = 1.0;
  // (1 - pump) / (1 - f); undefined for an unsqueezed probe.
  std::optional<double> fraction;
  std::optional<double> approx_probe;
  std::optional<double> approx_pump;
  std::optional<double> approx_fraction;
};

inline TransferReport transfer_report(const SystemParams& p, double theta, double omega) {
  const auto ev = make_evaluator(p);
  const auto pt = ev.at(omega);
  TransferReport t;
  t.omega = omega;
  t.theta = normalize_phase(theta);
  t.probe = ev.quadrature_noise(pt, Channel::Probe, theta);
  t.pump = ev.quadrature_noise(pt, Channel::Pump, theta);
  t.f = squeeze_factor(p.squeeze_2.r, theta);
  if (std::abs(1.0 - t.f) > 1e-12) t.fraction = (1.0 - t.pump) / (1.0 - t.f);
  if (const auto regime = symmetric_regime(p)) {
    t.approx_probe = approx::inner_probe(*regime, t.f);
    t.approx_pump = approx::inner_pump(*regime, t.f);
    t.approx_fraction = approx::inner_transfer(*regime);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Two-mode separability (sum-variance form).

inline constexpr double kDgczBound = 4.0;

/// Quadrature spectra at one joint angle: pump, probe, symmetrized cross term.
struct QuadratureTriple {
  double pump = 1.0;
  double probe = 1.0;
  double cross = 0.0;
};

/// V(theta) = Var(Y1_t + Y2_t) + Var(Y1_{t+pi/2} - Y2_{t+pi/2}) on the vacuum = 1
/// scale; separable states satisfy V >= 4.
template <typename Source>
double dgcz_functional(const Source& source, double theta) {
  const QuadratureTriple a = source(theta);
  const QuadratureTriple b = source(theta + 0.5 * kPi);
  return a.pump + a.probe + 2.0 * a.cross + b.pump + b.probe - 2.0 * b.cross;
}

struct DgczPoint {
  double cooperativity = 0.0, rabi_1 = 0.0, rabi_2 = 0.0, omega = 0.0, theta = 0.0;
  double value = std::numeric_limits<double>::infinity();
};

struct DgczGrid {
  std::vector<double> cooperativities;
  std::vector<double> rabi_1;
  std::vector<double> rabi_2;
  std::vector<double> omegas;
  double kappa = 0.15;
  double squeeze_r2 = 3.0;
  double n_atoms = 1000.0;
  int theta_steps = 64;
  SpectrumSource source = SpectrumSource::Numeric;
  int threads = 1;
};

struct DgczReport {
  DgczGrid grid;
  DgczPoint argmin;
  double minimum = std::numeric_limits<double>::infinity();
  double bound = kDgczBound;
  double tolerance = 1e-9;
  bool violation = false;
  std::size_t evaluations = 0;
  std::vector<DgczPoint> cell_minima;  // one per (C, rabi_1, rabi_2), grid order
};

inline DgczReport dgcz_scan(const DgczGrid& grid, double tolerance = 1e-9) {
  if (grid.cooperativities.empty() || grid.rabi_1.empty() || grid.rabi_2.empty() || grid.omegas.empty())
    throw InvalidParameters("dgcz_scan: every grid axis needs at least one value");
  if (grid.theta_steps < 1) throw InvalidParameters("dgcz_scan: theta_steps must be >= 1");
  if (grid.source == SpectrumSource::Both) throw InvalidParameters("dgcz_scan: choose numeric or closed_form");

  struct Cell {
    double c, o1, o2;
  };
  std::vector<Cell> cells;
  for (double c : grid.cooperativities)
    for (double o1 : grid.rabi_1)
      for (double o2 : grid.rabi_2) cells.push_back({c, o1, o2});

  DgczReport report;
  report.grid = grid;
  report.tolerance = tolerance;
  report.cell_minima.resize(cells.size());
  std::mutex guard;

  parallel_for(cells.size(), grid.threads, [&](std::size_t k) {
    const Cell cell = cells[k];
    const SystemParams p = symmetric_scenario(cell.c, grid.kappa, cell.o1, cell.o2, grid.squeeze_r2, grid.n_atoms);
    require_valid(p);
    std::optional<SpectrumEvaluator> ev;
    if (grid.source == SpectrumSource::Numeric) ev.emplace(make_evaluator(p));

    DgczPoint best;
    std::size_t count = 0;
    for (double w : grid.omegas) {
      std::function<QuadratureTriple(double)> source;
      if (ev) {
        const auto pt = ev->at(w);
        const auto k11 = ev->kernel(pt, Channel::Pump, Channel::Pump);
        const auto k22 = ev->kernel(pt, Channel::Probe, Channel::Probe);
        const auto k12 = ev->kernel(pt, Channel::Pump, Channel::Probe);
        source = [k11, k22, k12](double t) {
          return QuadratureTriple{1.0 + k11.value(t, t), 1.0 + k22.value(t, t), k12.value(t, t)};
        };
      } else {
        source = [&p, w](double t) {
          return QuadratureTriple{closed_form_pump(p, w, t), closed_form_probe(p, w, t),
                                  closed_form_correlation(p, w, t, t)};
        };
      }
      for (int j = 0; j < grid.theta_steps; ++j) {
        const double t = kPi * j / grid.theta_steps;
        const double v = dgcz_functional(source, t);
        ++count;
        if (v < best.value) best = {cell.c, cell.o1, cell.o2, w, t, v};
      }
    }
    std::lock_guard lock(guard);
    report.cell_minima[k] = best;
    report.evaluations += count;
    if (best.value < report.minimum) {
      report.minimum = best.value;
      report.argmin = best;
    }
  });
  report.violation = report.minimum < report.bound - tolerance;
  return report;
}

// ---------------------------------------------------------------------------
// Ground-coherence cross-decay sensitivity.

struct GammaCrossRow {
  double gamma_cross = 0.0;
  double probe_max_rel = 0.0;
  double pump_max_rel = 0.0;
  double correlation_max_rel = 0.0;
};

inline double relative_deviation(double value, double reference, double floor = 1e-6) {
  return std::abs(value - reference) / std::max(std::abs(reference), floor);
}

/// Numeric spectra at each cross-decay value against the closed forms of the
/// base scenario (which exclude that noise source).
inline std::vector<GammaCrossRow> gamma_cross_sensitivity(const SystemParams& base, const std::vector<double>& values,
                                                          const std::vector<double>& omegas, double theta_pump = 0.0,
                                                          double theta_probe = 0.0) {
  SystemParams reference = base;
  reference.gamma_cross = 0.0;
  std::vector<GammaCrossRow> rows;
  for (double v : values) {
    SystemParams p = base;
    p.gamma_cross = v;
    const auto ev = make_evaluator(p);
    GammaCrossRow row{v};
    for (double w : omegas) {
      const auto pt = ev.at(w);
      row.probe_max_rel = std::max(row.probe_max_rel, relative_deviation(ev.quadrature_noise(pt, Channel::Probe, theta_probe),
                                                                         closed_form_probe(reference, w, theta_probe)));
      row.pump_max_rel = std::max(row.pump_max_rel, relative_deviation(ev.quadrature_noise(pt, Channel::Pump, theta_pump),
                                                                       closed_form_pump(reference, w, theta_pump)));
      row.correlation_max_rel =
          std::max(row.correlation_max_rel, relative_deviation(ev.cross_correlation(pt, theta_pump, theta_probe),
                                                               closed_form_correlation(reference, w, theta_pump, theta_probe)));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace eitnoise
