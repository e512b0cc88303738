#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "maxwalk/ladder.hpp"

namespace maxwalk {

/// Weighted renewal masses u(n) = sum_{k>=0} A^k f^{*k}(n) for a step law f
/// on positive offsets. u(0) = 1; the recursion is exact up to rounding.
struct RenewalSequence {
  double A = 1;
  std::vector<double> u;
};

namespace detail {

template <class Real>
std::vector<Real> renewal_masses(std::span<const double> f, const Real& A, int n_max) {
  std::vector<Real> u(n_max + 1);
  u[0] = 1;
  const int kmax = static_cast<int>(f.size());
  for (int n = 1; n <= n_max; ++n) {
    Real acc{0};
    const int top = std::min(n, kmax);
    for (int j = 1; j <= top; ++j) acc += Real(f[j - 1]) * u[n - j];
    u[n] = A * acc;
  }
  return u;
}

}  // namespace detail

inline RenewalSequence renewal_sequence(const ConditionedLadderPmf& z, double A, int n_max) {
  if (!(A > 0) || A > 1) throw std::invalid_argument("A must lie in (0, 1]");
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  RenewalSequence out;
  out.A = A;
  out.u = detail::renewal_masses<double>(z.probs, A, n_max);
  return out;
}

/// Independent oracle: sum_{k=1}^{K} A^k f^{*k}(n) by explicit repeated
/// convolution. Terms with k > n vanish since the step law lives on k >= 1.
inline double brute_force_sum(const ConditionedLadderPmf& z, double A, int n, int K) {
  if (n < 0) return 0.0;
  OffsetVec f;
  f.lo = 1;
  f.w = z.probs;
  OffsetVec power = f;
  double total = 0, weight = A;
  for (int k = 1; k <= std::min(K, n); ++k) {
    total += weight * power.at(n);
    weight *= A;
    if (k < std::min(K, n)) {
      power = convolve(power, f);
      if (static_cast<int>(power.w.size()) + power.lo > n + 1)
        power.w.resize(n + 1 - power.lo);  // offsets above n never contribute
    }
  }
  return total;
}

/// Real root lambda >= 1 of A * f_y(z) = 1 plus derived quantities.
/// h_y = C1 / (mu0 * y) with mu0 the zero-drift ladder mean in lattice units;
/// lemma3_ok records whether lambda < e^{h_y}.
struct RootSolution {
  int y = 0;
  double A = 1;
  double lambda = 1;
  double theta = 0;
  double mu_y_at_lambda = 0;
  double leading_term = 0;
  double h_y = 0;
  bool lemma3_ok = false;
};

namespace detail {

template <class Real>
struct RootImpl {
  Real lambda, mu, leading;
};

/// Bisection on a bracket grown geometrically from [1, e^{2 h_y}], capped at
/// z = 8, then Newton polish. residual_tol is on |A f_y(lambda) - 1|.
template <class Real>
RootImpl<Real> solve_root(std::span<const double> f, int y, const Real& A, double h_y,
                          double bisect_tol, const Real& residual_tol, int newton_iters) {
  using std::abs;
  using std::exp;
  using std::log;
  auto g = [&](const Real& z) { return A * truncated_gf<Real>(f, y, z).value - Real(1); };

  Real lo{1};
  Real hi = exp(Real(2) * Real(h_y));
  while (g(hi) < 0) {
    hi = Real(1) + Real(2) * (hi - Real(1));
    if (hi > 8) raise(errc::no_root, "A*f_y(z) stays below 1 up to z = 8 (y too small for 1-A?)");
  }
  while (hi - lo > Real(bisect_tol)) {
    const Real mid = (lo + hi) / 2;
    (g(mid) > 0 ? hi : lo) = mid;
  }
  Real lambda = (lo + hi) / 2;
  for (int it = 0; it < newton_iters; ++it) {
    const auto e = truncated_gf<Real>(f, y, lambda);
    const Real resid = A * e.value - Real(1);
    if (abs(resid) <= residual_tol) break;
    lambda -= resid / (A * e.derivative);
  }
  const auto e = truncated_gf<Real>(f, y, lambda);
  RootImpl<Real> r;
  r.lambda = lambda;
  r.mu = e.derivative;
  r.leading = exp(Real(-(y + 1)) * log(lambda)) / (A * e.derivative);
  return r;
}

}  // namespace detail

inline RootSolution solve_lambda(const ConditionedLadderPmf& z, int y, double A, double mu0,
                                 double C1) {
  if (y < 1) throw std::invalid_argument("y must be >= 1");
  if (!(A > 0) || A > 1) throw std::invalid_argument("A must lie in (0, 1]");
  if (!(mu0 > 0) || !(C1 > 0)) throw std::invalid_argument("mu0 and C1 must be positive");
  const double h_y = C1 / (mu0 * y);
  const auto r = detail::solve_root<double>(z.probs, y, A, h_y, 1e-10, 1e-13, 5);
  RootSolution out;
  out.y = y;
  out.A = A;
  out.lambda = r.lambda;
  out.theta = std::log(r.lambda);
  out.mu_y_at_lambda = r.mu;
  out.leading_term = r.leading;
  out.h_y = h_y;
  out.lemma3_ok = r.lambda < std::exp(h_y);
  return out;
}

/// One row of the renewal-asymptotics scan at truncation level y:
/// direct mass u(y), the root-based leading term, and the remainder scaled by
/// y^{min(1, s-1)} / ln y.
struct RemainderRow {
  int y = 0;
  double A_y = 0;
  double direct = 0;
  double leading = 0;
  double scaled_remainder = 0;
  bool lemma3_ok = false;
};

/// Direct-vs-leading comparison over a y grid with A_y = 1 - C/y.
///
/// For a step law with bounded support the true remainder decays
/// geometrically in y and sits far below double rounding noise (the direct
/// recursion and the leading term agree to ~1e-16 while the remainder itself
/// can be 1e-200 and smaller). The scan therefore runs its internals in
/// 340-digit floats so the reported remainder is the genuine one, not noise;
/// inputs and outputs stay ordinary doubles.
inline std::vector<RemainderRow> remainder_scan(const ConditionedLadderPmf& z, double mu0,
                                                double C, double C1,
                                                const std::vector<int>& y_grid, double s) {
  using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<340>>;
  if (!(s > 1)) throw std::invalid_argument("remainder scan requires s > 1");
  if (!(C > 0)) throw std::invalid_argument("C must be positive");
  for (size_t i = 1; i < y_grid.size(); ++i)
    if (y_grid[i] <= y_grid[i - 1]) throw std::invalid_argument("y_grid must be increasing");

  std::vector<RemainderRow> rows;
  rows.reserve(y_grid.size());
  const double expo = std::min(1.0, s - 1.0);
  for (int y : y_grid) {
    if (y < 1) throw std::invalid_argument("y_grid entries must be >= 1");
    const double A_y = 1.0 - C / y;
    if (!(A_y > 0))
      throw std::invalid_argument("A_y = 1 - C/y must be positive (y too small for C)");

    const std::vector<Big> u = detail::renewal_masses<Big>(z.probs, Big(A_y), y);
    const double h_y = C1 / (mu0 * y);
    const auto root = detail::solve_root<Big>(z.probs, y, Big(A_y), h_y, 1e-10,
                                              Big("1e-300"), 12);
    const Big diff = abs(u[y] - root.leading);
    const Big scaled = diff * pow(Big(y), Big(expo)) / log(Big(y));

    RemainderRow row;
    row.y = y;
    row.A_y = A_y;
    row.direct = static_cast<double>(u[y]);
    row.leading = static_cast<double>(root.leading);
    row.scaled_remainder = static_cast<double>(scaled);
    row.lemma3_ok = root.lambda < exp(Big(h_y));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace maxwalk
