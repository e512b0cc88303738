#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "maxwalk/errors.hpp"

namespace maxwalk {

inline constexpr double kNormalizationTol = 1e-12;

/// Increment law of a lattice random walk: the step equals k*span with
/// probability probs[k]. Aperiodic means the gcd of support differences is 1,
/// i.e. span is the maximal lattice step and the shift is zero.
struct LatticePmf {
  int span = 1;
  std::map<int, double> probs;

  int min_offset() const { return probs.begin()->first; }
  int max_offset() const { return probs.rbegin()->first; }
};

struct Moments {
  double mean = 0;
  double variance = 0;
  double s_moment_pos = 0;  // truncated s-th moment of the positive part
};

/// A validated increment law together with its drift a = -E[X] >= 0 and
/// variance. tilt_theta records the exponent when the law came from a tilt.
struct DriftWalkSpec {
  LatticePmf pmf;
  double drift_a = 0;
  double sigma2 = 0;
  std::optional<double> tilt_theta;
};

/// Checks all LatticePmf invariants and returns the law with zero-mass
/// entries pruned. Throws Error{NotNormalized|DegenerateSupport|Periodic}.
inline LatticePmf validate(const LatticePmf& pmf) {
  if (pmf.span < 1) throw std::invalid_argument("span must be a positive integer");
  if (pmf.probs.empty()) throw std::invalid_argument("probs must be non-empty");

  double total = 0;
  LatticePmf out;
  out.span = pmf.span;
  for (const auto& [k, p] : pmf.probs) {
    if (p < 0 || !std::isfinite(p))
      raise(errc::not_normalized, "probability at offset " + std::to_string(k) + " is invalid");
    total += p;
    if (p > 0) out.probs.emplace(k, p);
  }
  if (std::abs(total - 1.0) > kNormalizationTol)
    raise(errc::not_normalized, "probabilities sum to " + std::to_string(total));
  if (out.probs.empty()) raise(errc::not_normalized, "all probabilities are zero");

  const int kmin = out.min_offset();
  const int kmax = out.max_offset();
  if (kmax < 1 || kmin > -1)
    raise(errc::degenerate_support, "support needs at least one positive and one negative offset");

  int g = 0;
  for (const auto& [k, p] : out.probs) g = std::gcd(g, k - kmin);
  if (g != 1)
    raise(errc::periodic, "gcd of support differences is " + std::to_string(g));
  return out;
}

/// mean, variance (value units) and sum_{0<k<=cutoff} (k*span)^s * p_k.
inline Moments moments(const LatticePmf& pmf, double s = 2.0, int cutoff = 1 << 30) {
  Moments m;
  double ex = 0, ex2 = 0, pos = 0;
  for (const auto& [k, p] : pmf.probs) {
    const double x = double(k) * pmf.span;
    ex += x * p;
    ex2 += x * x * p;
    if (k > 0 && k <= cutoff) pos += std::pow(x, s) * p;
  }
  m.mean = ex;
  m.variance = ex2 - ex * ex;
  m.s_moment_pos = pos;
  return m;
}

/// Wraps a validated pmf as a walk. The mean must be non-positive.
inline DriftWalkSpec make_walk(const LatticePmf& pmf) {
  DriftWalkSpec w;
  w.pmf = validate(pmf);
  const Moments m = moments(w.pmf);
  if (m.mean > 1e-10) throw std::invalid_argument("walk must have non-positive drift");
  // snap rounding residue to exact zero drift (within the stated 1e-10 slack)
  w.drift_a = (std::abs(m.mean) <= 1e-12) ? 0.0 : -m.mean;
  w.sigma2 = m.variance;
  if (!(w.sigma2 > 0)) throw std::invalid_argument("increment variance must be positive");
  return w;
}

/// Exponential tilt p_k -> p_k * e^{theta k}, renormalized. Support unchanged.
inline LatticePmf exponential_tilt(const LatticePmf& pmf, double theta) {
  const int kmin = pmf.probs.begin()->first;
  LatticePmf out;
  out.span = pmf.span;
  double norm = 0;
  for (const auto& [k, p] : pmf.probs) {
    // anchor the exponent at kmin so all weights stay <= O(1) for theta <= 0
    const double w = p * std::exp(theta * (k - kmin));
    out.probs.emplace(k, w);
    norm += w;
  }
  for (auto& [k, w] : out.probs) w /= norm;
  return out;
}

namespace detail {
inline double tilted_mean(const LatticePmf& base, double theta) {
  const int kmin = base.probs.begin()->first;
  double norm = 0, acc = 0;
  for (const auto& [k, p] : base.probs) {
    const double w = p * std::exp(theta * (k - kmin));
    norm += w;
    acc += w * k;
  }
  return base.span * acc / norm;
}
}  // namespace detail

/// Solves the tilt exponent theta <= 0 so the tilted law has mean -a.
/// Bisection on [-50, 0]; |mean + a| <= 1e-12 at exit.
inline DriftWalkSpec tilt_to_drift(const LatticePmf& base, double a) {
  const LatticePmf checked = validate(base);
  if (a < 0) throw std::invalid_argument("drift must be non-negative");
  if (std::abs(moments(checked).mean) > 1e-10)
    throw std::invalid_argument("tilt base must have zero mean");

  if (a == 0) {
    DriftWalkSpec w = make_walk(checked);
    w.tilt_theta = 0.0;
    return w;
  }

  constexpr double kThetaMin = -50.0;
  const double target = -a;
  // the tilted mean decreases to span*kmin as theta -> -infinity, never below
  const double sup_drift = -double(checked.span) * checked.min_offset();
  if (a >= sup_drift * (1.0 - 1e-12) || detail::tilted_mean(checked, kThetaMin) > target)
    raise(errc::drift_unattainable,
          "requested drift " + std::to_string(a) + " exceeds the attainable range");

  double lo = kThetaMin, hi = 0.0, theta = 0.0;
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    theta = 0.5 * (lo + hi);
    const double m = detail::tilted_mean(checked, theta);
    if (std::abs(m - target) <= 1e-12) {
      converged = true;
      break;
    }
    (m > target ? hi : lo) = theta;  // mean is increasing in theta
  }
  if (!converged) raise(errc::no_convergence, "tilt bisection exhausted 200 iterations");

  DriftWalkSpec w;
  w.pmf = validate(exponential_tilt(checked, theta));
  const Moments m = moments(w.pmf);
  w.drift_a = a;
  w.sigma2 = m.variance;
  w.tilt_theta = theta;
  return w;
}

/// Positive root eta of sum_k p_k e^{eta k} = 1, in per-offset units.
/// Unique for a validated law with negative mean; e^{-eta*m} bounds the
/// probability of ever ascending m lattice levels.
inline double lundberg_exponent(const LatticePmf& pmf) {
  if (moments(pmf).mean >= 0)
    throw std::invalid_argument("Lundberg exponent requires strictly negative drift");
  auto excess = [&](double eta) {
    double s = -1.0;
    for (const auto& [k, p] : pmf.probs) s += p * std::exp(eta * k);
    return s;
  };
  double lo = 1e-4;
  for (int it = 0; excess(lo) >= 0; ++it) {
    lo *= 0.5;
    if (it > 120) raise(errc::no_convergence, "drift too close to zero for a Lundberg root");
  }
  double hi = std::max(1.0, 2 * lo);
  while (excess(hi) <= 0) {
    hi *= 2;
    if (hi > 1e6) raise(errc::no_convergence, "no Lundberg root below 1e6");
  }
  for (int it = 0; it < 200 && (hi - lo) > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0 ? hi : lo) = mid;
  }
  double eta = 0.5 * (lo + hi);
  for (int it = 0; it < 4; ++it) {  // Newton polish
    double f = excess(eta), df = 0;
    for (const auto& [k, p] : pmf.probs) df += p * k * std::exp(eta * k);
    if (df > 0) eta -= f / df;
  }
  return eta;
}

// ---------------------------------------------------------------------------
// Truncated generating functions
// ---------------------------------------------------------------------------

/// f_y(z) = sum_{k=1}^{y} f_k z^k and mu_y(z) = sum_{k=1}^{y} k f_k z^{k-1}
/// for a law on positive offsets, truncated at y.
struct GenFnEval {
  int y = 0;
  double z = 1;
  double f_y = 0;
  double mu_y = 0;
};

namespace detail {

template <class Real>
struct GfPair {
  Real value{};       // f_y(z)
  Real derivative{};  // mu_y(z)
};

/// Horner evaluation of the truncated series and its derivative.
/// mass[k-1] is the probability at offset k.
template <class Real>
GfPair<Real> truncated_gf(std::span<const double> mass, int y, const Real& z) {
  const int top = std::min<int>(y, static_cast<int>(mass.size()));
  // f(z) = z*q(z) with q = sum_{k=1}^{top} c_k z^{k-1};  f' = q + z q'
  Real q{0}, dq{0};
  for (int k = top; k >= 1; --k) {
    dq = dq * z + q;
    q = q * z + Real(mass[k - 1]);
  }
  return {z * q, q + z * dq};
}

}  // namespace detail

inline GenFnEval gen_fn(std::span<const double> mass_from_1, int y, double z) {
  if (y < 1) throw std::invalid_argument("gen_fn requires y >= 1");
  if (z < 1) throw std::invalid_argument("gen_fn requires z >= 1");
  const auto r = detail::truncated_gf<double>(mass_from_1, y, z);
  return GenFnEval{y, z, r.value, r.derivative};
}

// ---------------------------------------------------------------------------
// Discrete convolution on offset-indexed mass arrays
// ---------------------------------------------------------------------------

/// Dense mass array over the offsets lo .. lo + w.size() - 1.
struct OffsetVec {
  int lo = 0;
  std::vector<double> w;

  double mass() const {
    double s = 0;
    for (double v : w) s += v;
    return s;
  }
  double at(int k) const {
    const int i = k - lo;
    return (i >= 0 && i < static_cast<int>(w.size())) ? w[i] : 0.0;
  }
  static OffsetVec unit() { return OffsetVec{0, {1.0}}; }
};

inline OffsetVec convolve(const OffsetVec& p, const OffsetVec& q) {
  if (p.w.empty() || q.w.empty()) return OffsetVec{p.lo + q.lo, {}};
  OffsetVec out;
  out.lo = p.lo + q.lo;
  out.w.assign(p.w.size() + q.w.size() - 1, 0.0);
  for (size_t i = 0; i < p.w.size(); ++i) {
    if (p.w[i] == 0) continue;
    for (size_t j = 0; j < q.w.size(); ++j) out.w[i + j] += p.w[i] * q.w[j];
  }
  return out;
}

}  // namespace maxwalk
