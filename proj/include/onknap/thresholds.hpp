// Copyright 2026 The onknap Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Threshold distributions: an atom at zero followed by closed-form pieces.
//
// Two distributions are provided:
//   f1(x) = (4/7 - x) / (1 - 2x)            on [0, 3/7], 1 above;
//   f2(x) = (1 - c) - (1 - 2c) ln(1 - x) / (1 - 2x)   on [0, q],
//           2(1 - c) - (1 - 2c) / x                   on (q, 1],
// where (q, c) solve the constants problem below. f1 is 3/7-competitive
// against the fractional optimum, f2 is c-competitive against the integer one.

#ifndef ONKNAP_THRESHOLDS_HPP
#define ONKNAP_THRESHOLDS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "onknap/errors.hpp"

namespace onknap {

/// CDF of a random threshold tau on [0, 1].
///
/// Pieces cover (lo, hi] intervals contiguously from 0 to support_max; F is 1
/// above support_max and 0 below 0. A piece may carry a closed-form inverse;
/// otherwise quantiles fall back to bisection.
class ThresholdCdf {
 public:
  struct Piece {
    double lo = 0.0;
    double hi = 0.0;
    std::function<double(double)> cdf;
    std::function<double(double)> inverse;  // optional
  };

  ThresholdCdf(std::string name, double atom_at_zero, std::vector<Piece> pieces)
      : name_(std::move(name)), atom_(atom_at_zero), pieces_(std::move(pieces)) {
    if (!(atom_ >= 0.0 && atom_ <= 1.0)) throw ArgumentError("atom mass must lie in [0, 1]");
    double at = 0.0;
    for (const Piece& p : pieces_) {
      if (p.lo != at || !(p.hi > p.lo) || p.hi > 1.0 || !p.cdf) {
        throw ArgumentError("threshold CDF pieces must tile (0, support_max]");
      }
      at = p.hi;
    }
    support_max_ = pieces_.empty() ? 0.0 : pieces_.back().hi;
  }

  /// Deterministic threshold tau0 (tau0 = 0 is Greedy).
  static ThresholdCdf point_mass(double tau0) {
    if (!(tau0 >= 0.0 && tau0 <= 1.0)) throw ArgumentError("threshold must lie in [0, 1]");
    if (tau0 == 0.0) return ThresholdCdf("greedy", 1.0, {});
    Piece p{0.0, tau0, [tau0](double x) { return x < tau0 ? 0.0 : 1.0; },
            [tau0](double) { return tau0; }};
    return ThresholdCdf("fixed:" + std::to_string(tau0), 0.0, {std::move(p)});
  }

  const std::string& name() const noexcept { return name_; }
  double atom_at_zero() const noexcept { return atom_; }
  double support_max() const noexcept { return support_max_; }
  const std::vector<Piece>& pieces() const noexcept { return pieces_; }

  /// F(x) = P(tau <= x).
  double operator()(double x) const {
    if (x < 0.0) return 0.0;
    if (x == 0.0) return atom_;
    if (x >= support_max_) return 1.0;
    for (const Piece& p : pieces_) {
      if (x <= p.hi) return std::clamp(p.cdf(x), 0.0, 1.0);
    }
    return 1.0;
  }

  /// Left-continuous generalized inverse inf{x : F(x) >= p}.
  double quantile(double p) const {
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("probability must lie in [0, 1]");
    if (p <= atom_) return 0.0;
    for (const Piece& piece : pieces_) {
      if (piece.cdf(piece.hi) < p) continue;
      if (piece.inverse) return std::clamp(piece.inverse(p), piece.lo, piece.hi);
      double lo = piece.lo;
      double hi = piece.hi;
      while (hi - lo > 1e-12) {
        const double mid = std::midpoint(lo, hi);
        (piece.cdf(mid) >= p ? hi : lo) = mid;
      }
      return hi;
    }
    return support_max_;
  }

  /// Inverse-transform draw from a caller-owned engine.
  template <class Rng>
  double sample(Rng& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    return quantile(unit(rng));
  }

 private:
  std::string name_;
  double atom_ = 0.0;
  std::vector<Piece> pieces_;
  double support_max_ = 0.0;
};

inline ThresholdCdf cdf_f1() {
  ThresholdCdf::Piece p{
      0.0, 3.0 / 7.0, [](double x) { return (4.0 / 7.0 - x) / (1.0 - 2.0 * x); },
      [](double u) { return (4.0 / 7.0 - u) / (1.0 - 2.0 * u); }};
  return ThresholdCdf("f1", 4.0 / 7.0, {std::move(p)});
}

/// Root of g(q) = 2q^3 - 7q^2 + 5q - 1 - 2(1-q) q^2 ln(1-q).
inline double constants_residual(double q) {
  return 2.0 * q * q * q - 7.0 * q * q + 5.0 * q - 1.0 -
         2.0 * (1.0 - q) * q * q * std::log1p(-q);
}

/// H(c, x) = (1-2c)/x - (1-2c) ln(1-x)/(1-2x) - (1-c).
inline double h_function(double c, double x) {
  return (1.0 - 2.0 * c) / x - (1.0 - 2.0 * c) * std::log1p(-x) / (1.0 - 2.0 * x) - (1.0 - c);
}

struct SolvedConstants {
  double q_star = 0.0;
  double c_star = 0.0;
  double f2_at_qstar = 0.0;
};

/// Solves for (q*, c*). q* by bisection on g over (0.25, 0.45); c* in closed form
/// since H is affine in c: c = (A - 1) / (2A - 1), A = 1/q - ln(1-q)/(1-2q).
inline SolvedConstants solve_constants(double tol = 1e-12) {
  if (!(tol > 0.0)) throw ArgumentError("tolerance must be positive");
  double lo = 0.25;
  double hi = 0.45;
  double g_lo = constants_residual(lo);
  const double g_hi = constants_residual(hi);
  if (std::signbit(g_lo) == std::signbit(g_hi)) throw SolverError("no sign change in bracket");
  double q = std::midpoint(lo, hi);
  for (int it = 0; it < 200; ++it) {
    q = std::midpoint(lo, hi);
    const double g = constants_residual(q);
    if (std::fabs(g) <= tol || hi - lo <= 2e-16) break;
    if (std::signbit(g) == std::signbit(g_lo)) {
      lo = q;
      g_lo = g;
    } else {
      hi = q;
    }
  }
  if (std::fabs(constants_residual(q)) > tol) throw SolverError("bisection did not reach tolerance");

  SolvedConstants k;
  k.q_star = q;
  const double a = 1.0 / q - std::log1p(-q) / (1.0 - 2.0 * q);
  k.c_star = (a - 1.0) / (2.0 * a - 1.0);
  k.f2_at_qstar = (1.0 - k.c_star) - (1.0 - 2.0 * k.c_star) * std::log1p(-q) / (1.0 - 2.0 * q);
  return k;
}

inline ThresholdCdf cdf_f2(const SolvedConstants& k) {
  const double q = k.q_star;
  const double c = k.c_star;
  if (!(q > 0.0 && q < 0.5) || !(c > 0.0 && c < 0.5)) throw ArgumentError("invalid constants");
  ThresholdCdf::Piece left{
      0.0, q, [c](double x) { return (1.0 - c) - (1.0 - 2.0 * c) * std::log1p(-x) / (1.0 - 2.0 * x); },
      {}};
  ThresholdCdf::Piece right{q, 1.0, [c](double x) { return 2.0 * (1.0 - c) - (1.0 - 2.0 * c) / x; },
                            [c](double u) { return (1.0 - 2.0 * c) / (2.0 * (1.0 - c) - u); }};
  return ThresholdCdf("f2", 1.0 - c, {std::move(left), std::move(right)});
}

inline ThresholdCdf cdf_f2() { return cdf_f2(solve_constants()); }

}  // namespace onknap

#endif  // ONKNAP_THRESHOLDS_HPP
