#pragma once

#include <array>
#include <string_view>

#include "eitnoise/common.hpp"

namespace eitnoise {

// Canonical ordering of the fluctuation vector. It coincides with the normal
// order used for the c-number correspondence, leftmost operator first.
enum class Var : int {
  Alpha2Conj = 0,
  Alpha1Conj,
  Sigma02,
  Sigma01,
  Sigma12,
  W1,
  W2,
  Sigma21,
  Sigma10,
  Sigma20,
  Alpha1,
  Alpha2,
};

inline constexpr std::array<Var, kDim> kOrdering = {
    Var::Alpha2Conj, Var::Alpha1Conj, Var::Sigma02, Var::Sigma01,
    Var::Sigma12,    Var::W1,         Var::W2,      Var::Sigma21,
    Var::Sigma10,    Var::Sigma20,    Var::Alpha1,  Var::Alpha2,
};

constexpr int idx(Var v) { return static_cast<int>(v); }

/// Partner of a variable under complex conjugation. W1 and W2 are real.
constexpr Var conjugate(Var v) {
  switch (v) {
    case Var::W1:
    case Var::W2:
      return v;
    default:
      return static_cast<Var>(kDim - 1 - idx(v));
  }
}

constexpr std::string_view name(Var v) {
  constexpr std::array<std::string_view, kDim> names = {
      "alpha2*", "alpha1*", "Sigma02", "Sigma01", "Sigma12", "W1",
      "W2",      "Sigma21", "Sigma10", "Sigma20", "alpha1",  "alpha2",
  };
  return names[static_cast<std::size_t>(idx(v))];
}

/// Permutation P with (P x)_i = x_{conjugate(i)}.
inline Matrix12 conjugation_permutation() {
  Matrix12 p = Matrix12::Zero();
  for (Var v : kOrdering) p(idx(v), idx(conjugate(v))) = 1.0;
  return p;
}

/// Maps a state vector onto itself under conjugation: x -> P conj(x).
inline Vector12 conjugate_state(const Vector12& x) {
  Vector12 out;
  for (Var v : kOrdering) out(idx(v)) = std::conj(x(idx(conjugate(v))));
  return out;
}

}  // namespace eitnoise
