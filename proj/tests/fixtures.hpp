#pragma once

#include <cmath>

#include "eitnoise/eitnoise.hpp"

namespace fixtures {

using namespace eitnoise;

// C = g^2 N / (Gamma kappa) = 0.01 * 2505 / 0.15 = 167
inline SystemParams fig2(double rabi_2 = 1.0) {
  SystemParams p;
  p.n_atoms = 2505.0;
  p.alpha_1 = 10.0;
  p.alpha_2 = 10.0 * rabi_2;
  p.squeeze_2 = SqueezeSpec::make(3.0, 0.0);
  return p;
}

inline SystemParams with_probe_squeeze(SystemParams p, double r2) {
  p.squeeze_2 = SqueezeSpec::make(r2, 0.0);
  return p;
}

// Probe spectrum written as f + (1 - f) P / M, the form forced by the 1 <-> 2
// label symmetry of the pump result (it must read 1 for an unsqueezed probe).
inline double probe_reference(double C, double kappa, double rabi_1, double rabi_2, double r2, double w,
                              double theta, double Gamma = 1.0) {
  const double o1 = rabi_1 * rabi_1, o2 = rabi_2 * rabi_2, s = o1 + o2;
  const double w2 = w * w, k2 = kappa * kappa, lor = k2 + 4 * w2;
  const double f = std::exp(-2 * r2) * std::pow(std::cos(theta), 2) + std::exp(2 * r2) * std::pow(std::sin(theta), 2);
  const double B = lor * s * s *
                   (4 * C * Gamma * w2 * kappa * (-2 * w2 + 2 * s + kappa * Gamma) +
                    lor * (w2 * (Gamma * Gamma + w2) - (2 * w2 - s) * s));
  const double M = 4 * C * C * k2 * Gamma * Gamma * w2 * lor * s * s + B;
  const double P = 8 * C * Gamma * Gamma * w2 * k2 * (2 * C * o1 * o2 * k2 + lor * o1 * s);
  return f + (1 - f) * P / M;
}

}  // namespace fixtures
