#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "eitnoise/common.hpp"

namespace eitnoise {

/// Wraps a phase into [0, 2*pi).
inline double normalize_phase(double theta) {
  double t = std::fmod(theta, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  if (t >= 2.0 * kPi) t = 0.0;
  return t;
}

/// Squeezing of an input field, beta = r exp(i theta).
struct SqueezeSpec {
  double r = 0.0;
  double theta = 0.0;

  static SqueezeSpec make(double r, double theta) { return {r, normalize_phase(theta)}; }
};

/// Physical scenario. All rates are in units of a reference decay rate (1.0 == Gamma).
struct SystemParams {
  double gamma_rad_1 = 1.0;
  double gamma_rad_2 = 1.0;
  // Cross-decay coefficient of the ground-state coherence noise. The drift has
  // no matching damping term, so only 0 gives a fluctuation-dissipation
  // consistent model.
  double gamma_cross = 0.0;
  double kappa_1 = 0.15;
  double kappa_2 = 0.15;
  double g_1 = 0.1;
  double g_2 = 0.1;
  double n_atoms = 1.0;
  Complex alpha_1{0.0, 0.0};
  Complex alpha_2{0.0, 0.0};
  SqueezeSpec squeeze_1{};
  SqueezeSpec squeeze_2{};

  Complex rabi_1() const { return g_1 * alpha_1; }
  Complex rabi_2() const { return g_2 * alpha_2; }

  bool is_symmetric() const {
    auto same = [](double a, double b) {
      return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    return same(gamma_rad_1, gamma_rad_2) && same(g_1, g_2) && same(kappa_1, kappa_2);
  }

  /// C = g^2 N / (Gamma kappa); only defined in the symmetric regime.
  std::optional<double> cooperativity() const {
    if (!is_symmetric()) return std::nullopt;
    return g_1 * g_1 * n_atoms / (gamma_rad_1 * kappa_1);
  }
};

/// Symmetric scenario specified through the dimensionless quantities of the
/// closed-form spectra. g and alpha follow from C and the Rabi frequencies.
inline SystemParams symmetric_scenario(double cooperativity, double kappa, double rabi_1,
                                       double rabi_2, double squeeze_r2,
                                       double n_atoms = 1000.0, double gamma = 1.0) {
  SystemParams p;
  p.gamma_rad_1 = p.gamma_rad_2 = gamma;
  p.kappa_1 = p.kappa_2 = kappa;
  p.n_atoms = n_atoms;
  const double g = std::sqrt(cooperativity * gamma * kappa / n_atoms);
  p.g_1 = p.g_2 = g;
  p.alpha_1 = rabi_1 / g;
  p.alpha_2 = rabi_2 / g;
  p.squeeze_2 = SqueezeSpec::make(squeeze_r2, 0.0);
  return p;
}

struct ValidationReport {
  std::vector<std::string> violations;
  // Reasons the closed-form spectra do not apply; empty when they do.
  std::vector<std::string> closed_form_notes;
  bool closed_forms_applicable = false;

  bool valid() const { return violations.empty(); }
};

inline ValidationReport validate_params(const SystemParams& p) {
  ValidationReport report;
  auto positive = [&](double v, const char* what) {
    if (!std::isfinite(v) || !(v > 0.0))
      report.violations.push_back(std::string(what) + " must be a finite positive number");
  };
  positive(p.gamma_rad_1, "gamma_rad_1");
  positive(p.gamma_rad_2, "gamma_rad_2");
  positive(p.kappa_1, "kappa_1");
  positive(p.kappa_2, "kappa_2");
  positive(p.g_1, "g_1");
  positive(p.g_2, "g_2");
  if (!std::isfinite(p.gamma_cross) || p.gamma_cross < 0.0)
    report.violations.push_back("gamma_cross must be finite and >= 0");
  if (!std::isfinite(p.n_atoms) || p.n_atoms < 1.0)
    report.violations.push_back("n_atoms must be >= 1");
  for (auto [s, what] : {std::pair{p.squeeze_1, "squeeze_1"}, std::pair{p.squeeze_2, "squeeze_2"}}) {
    if (!std::isfinite(s.r) || s.r < 0.0)
      report.violations.push_back(std::string(what) + ".r must be finite and >= 0");
    if (!std::isfinite(s.theta))
      report.violations.push_back(std::string(what) + ".theta must be finite");
  }
  for (auto [a, what] : {std::pair{p.alpha_1, "alpha_1"}, std::pair{p.alpha_2, "alpha_2"}}) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
      report.violations.push_back(std::string(what) + " must be finite");
  }

  auto& notes = report.closed_form_notes;
  if (!p.is_symmetric()) notes.emplace_back("requires gamma_rad_1 == gamma_rad_2, g_1 == g_2, kappa_1 == kappa_2");
  if (p.squeeze_1.r != 0.0) notes.emplace_back("requires an unsqueezed pump input (squeeze_1.r == 0)");
  if (normalize_phase(p.squeeze_2.theta) != 0.0) notes.emplace_back("requires squeeze_2.theta == 0");
  for (Complex a : {p.alpha_1, p.alpha_2}) {
    if (a.imag() != 0.0 || a.real() < 0.0) {
      notes.emplace_back("requires real non-negative intracavity amplitudes");
      break;
    }
  }
  if (p.gamma_cross != 0.0)
    notes.emplace_back("gamma_cross != 0 adds undamped ground-coherence noise absent from the closed forms");
  report.closed_forms_applicable = report.valid() && notes.empty();
  return report;
}

inline void require_valid(const SystemParams& p) {
  const auto report = validate_params(p);
  if (!report.valid()) {
    std::string msg = "invalid parameters:";
    for (const auto& v : report.violations) msg += " " + v + ";";
    throw InvalidParameters(msg);
  }
}

}  // namespace eitnoise
