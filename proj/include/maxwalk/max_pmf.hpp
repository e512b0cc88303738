#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "maxwalk/renewal.hpp"

namespace maxwalk {

enum class Method { geometric_sum, lindley, closed_form, monte_carlo };

inline const char* method_name(Method m) {
  switch (m) {
    case Method::geometric_sum: return "geometric_sum";
    case Method::lindley: return "lindley";
    case Method::closed_form: return "closed_form";
    case Method::monte_carlo: return "monte_carlo";
  }
  return "?";
}

inline std::optional<Method> method_from_name(std::string_view s) {
  if (s == "geometric_sum") return Method::geometric_sum;
  if (s == "lindley") return Method::lindley;
  if (s == "closed_form") return Method::closed_form;
  if (s == "monte_carlo") return Method::monte_carlo;
  return std::nullopt;
}

/// pi[y] = P(M = y*span) for y = 0..y_max. err_bound is a certified per-entry
/// truncation bound for the exact methods and the largest 99% CI half-width
/// for Monte Carlo (per-entry half-widths in ci_halfwidth).
struct MaxPmfResult {
  int y_max = 0;
  std::vector<double> pi;
  Method method = Method::geometric_sum;
  double err_bound = 0;
  std::vector<double> ci_halfwidth;
};

/// P(M = y*span) via the ladder representation: pi(y) = P(tau+ = infty) u(y)
/// with u the weighted renewal masses of the conditioned ladder law and
/// A = P(tau+ < infty) taken from the same ascending-ladder run. The error
/// bound propagates the ladder truncation eps to first order:
/// |delta pi(y)| <= eps * (u(y) + (u*u)(y)).
inline MaxPmfResult pmf_geometric_sum(const DriftWalkSpec& walk, int y_max, double tol,
                                      LadderOptions opt = {}) {
  if (!(walk.drift_a > 0)) throw std::invalid_argument("requires strictly negative mean");
  if (y_max < 0) throw std::invalid_argument("y_max must be >= 0");

  const DefectiveLadderPmf lad = ascending_ladder(walk, tol, opt);
  const ConditionedLadderPmf z = conditioned_ladder(lad);
  const double A = lad.total_A;
  const double p_inf = 1.0 - A;
  const RenewalSequence ren = renewal_sequence(z, A, y_max);

  MaxPmfResult out;
  out.y_max = y_max;
  out.method = Method::geometric_sum;
  out.pi.resize(y_max + 1);
  for (int y = 0; y <= y_max; ++y) out.pi[y] = p_inf * ren.u[y];

  double worst = 0;
  std::vector<double> uu(y_max + 1, 0.0);
  for (int n = 0; n <= y_max; ++n) {
    double acc = 0;
    for (int j = 0; j <= n; ++j) acc += ren.u[j] * ren.u[n - j];
    uu[n] = acc;
    worst = std::max(worst, lad.trunc_error * (ren.u[n] + acc));
  }
  out.err_bound = worst;
  return out;
}

namespace detail {

/// Minimum of the mgf phi(beta) = sum_k p_k e^{beta k} over (0, eta): the
/// Cramer rate. P(S_n >= 1) <= e^{-beta*} phi*^n bounds the chance of late
/// ladder epochs.
inline std::pair<double, double> cramer_min(const LatticePmf& p, double eta) {
  auto dphi = [&](double b) {
    double s = 0;
    for (const auto& [k, pk] : p.probs) s += pk * k * std::exp(b * k);
    return s;
  };
  double lo = 0, hi = eta;
  for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
    const double mid = 0.5 * (lo + hi);
    (dphi(mid) > 0 ? hi : lo) = mid;
  }
  const double beta = 0.5 * (lo + hi);
  double phi = 0;
  for (const auto& [k, pk] : p.probs) phi += pk * std::exp(beta * k);
  return {beta, phi};
}

}  // namespace detail

/// Stationary law of W' = max(0, W + X) on {0..Y}, iterated from unit mass at
/// zero; the n-th iterate is the law of the n-step maximum M_n. Y is sized
/// from the Lundberg tail bound (paths exceeding Y carry < tol/4 mass) and
/// the iteration runs until both the spec'd total-variation change falls
/// below tol/10 and the certified argmax-tail bound
///   P(M != M_n) <= sum_{k>n} P(S_k >= 1) <= e^{-beta*} phi*^{n+1} / (1-phi*)
/// is below tol/4.
inline MaxPmfResult pmf_lindley(const DriftWalkSpec& walk, int y_max, double tol,
                                long max_iterations = 5'000'000) {
  if (!(walk.drift_a > 0)) throw std::invalid_argument("requires strictly negative mean");
  if (y_max < 0) throw std::invalid_argument("y_max must be >= 0");

  const LatticePmf& p = walk.pmf;
  const int u = p.max_offset();
  const int d = -p.min_offset();
  const double eta = lundberg_exponent(p);
  const int Y = std::max<int>(y_max + u + d + 2,
                              static_cast<int>(std::ceil(std::log(4.0 / tol) / eta)) + u + 1);

  const auto [beta, phi] = detail::cramer_min(p, eta);
  if (!(phi < 1)) raise(errc::no_convergence, "Cramer rate degenerate");
  const double n_star =
      std::ceil(std::log(4.0 * std::exp(-beta) / (tol * (1.0 - phi))) / -std::log(phi));

  std::vector<std::pair<int, double>> steps(p.probs.begin(), p.probs.end());
  std::vector<double> pi(Y + 1, 0.0), next(Y + 1, 0.0);
  pi[0] = 1.0;

  for (long it = 1; it <= max_iterations; ++it) {
    std::fill(next.begin(), next.end(), 0.0);
    for (int w = 0; w <= Y; ++w) {
      const double pw = pi[w];
      if (pw == 0) continue;
      for (const auto& [k, pk] : steps) {
        int w2 = w + k;
        if (w2 < 0) w2 = 0;
        if (w2 > Y) w2 = Y;
        next[w2] += pw * pk;
      }
    }
    double tv = 0;
    for (int w = 0; w <= Y; ++w) tv += std::abs(next[w] - pi[w]);
    pi.swap(next);
    if (0.5 * tv < 0.1 * tol && double(it) >= n_star) {
      MaxPmfResult out;
      out.y_max = y_max;
      out.method = Method::lindley;
      out.pi.assign(pi.begin(), pi.begin() + y_max + 1);
      out.err_bound = tol;
      return out;
    }
  }
  raise(errc::no_convergence, "Lindley iteration did not settle within the budget");
}

/// Geometric closed form for skip-free upward walks (support <= +1 offset):
/// pi(y) = (1 - r) r^y where r = P(the walk ever gains one lattice level),
/// the root in (0,1) of r = sum_k p_k r^{1-k}.
inline MaxPmfResult pmf_closed_form_skipfree(const DriftWalkSpec& walk, int y_max) {
  if (!(walk.drift_a > 0)) throw std::invalid_argument("requires strictly negative mean");
  const LatticePmf& p = walk.pmf;
  if (p.max_offset() > 1)
    raise(errc::not_skip_free, "support reaches offset " + std::to_string(p.max_offset()));

  auto hit = [&](double r) {  // sum_k p_k r^{1-k} - r, convex, roots {r*, 1}
    double s = -r;
    for (const auto& [k, pk] : p.probs) s += pk * std::pow(r, 1.0 - k);
    return s;
  };
  double hi = 0.5;
  while (hit(hi) > 0) {
    hi = 0.5 * (1.0 + hi);
    if (1.0 - hi < 1e-15) break;  // drift ~ 0; root indistinguishable from 1
  }
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (hit(mid) > 0 ? lo : hi) = mid;
  }
  double r = 0.5 * (lo + hi);
  for (int it = 0; it < 6; ++it) {  // Newton polish to ~1e-16
    const double f = hit(r);
    double df = -1.0;
    for (const auto& [k, pk] : p.probs) df += pk * (1.0 - k) * std::pow(r, -double(k));
    if (df != 0) r -= f / df;
  }

  MaxPmfResult out;
  out.y_max = y_max;
  out.method = Method::closed_form;
  out.pi.resize(y_max + 1);
  double geo = 1.0 - r;
  for (int y = 0; y <= y_max; ++y) {
    out.pi[y] = geo;
    geo *= r;
  }
  out.err_bound = 1e-13;
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo with counter-based substreams
// ---------------------------------------------------------------------------

namespace detail {

/// Counter-based generator: a SplitMix64 stream whose state is derived from
/// (seed, stream index), so path i draws the same numbers regardless of
/// scheduling or evaluation order.
struct CounterRng {
  std::uint64_t key;
  std::uint64_t ctr = 0;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key(mix(seed + 0x9E3779B97F4A7C15ull) ^ mix(stream * 0xD1B54A32D192ED03ull + 1)) {}

  double uniform01() {
    const std::uint64_t z = mix(key + (++ctr) * 0x9E3779B97F4A7C15ull);
    return double(z >> 11) * 0x1.0p-53;
  }
};

}  // namespace detail

/// Empirical pmf of the all-time maximum from n_paths independent walks.
/// Each path runs until it has dropped K levels below its running maximum,
/// where the Lundberg bound gives rho^K < tol for the chance of a later new
/// record; the recorded maximum is then exact up to that bias. Deterministic
/// for a fixed seed. ci_halfwidth holds per-entry 99% half-widths.
inline MaxPmfResult simulate_max(const DriftWalkSpec& walk, long n_paths, std::uint64_t seed,
                                 double tol, int y_max = -1) {
  if (!(walk.drift_a > 0)) throw std::invalid_argument("requires strictly negative mean");
  if (n_paths <= 0) throw std::invalid_argument("n_paths must be positive");
  const LatticePmf& p = walk.pmf;
  const double eta = lundberg_exponent(p);
  const int K = std::max(1, static_cast<int>(std::ceil(std::log(1.0 / tol) / eta)));

  std::vector<int> offs;
  std::vector<double> cdf;
  double acc = 0;
  for (const auto& [k, pk] : p.probs) {
    offs.push_back(k);
    acc += pk;
    cdf.push_back(acc);
  }
  cdf.back() = 1.0;

  std::vector<long> counts;
  counts.reserve(256);
  for (long i = 0; i < n_paths; ++i) {
    detail::CounterRng rng(seed, static_cast<std::uint64_t>(i));
    long s = 0, mx = 0;
    while (mx - s < K) {
      const double v = rng.uniform01();
      size_t j = 0;
      while (v > cdf[j]) ++j;
      s += offs[j];
      if (s > mx) mx = s;
    }
    if (mx >= static_cast<long>(counts.size())) counts.resize(mx + 1, 0);
    ++counts[mx];
  }

  const int top = (y_max >= 0) ? y_max : static_cast<int>(counts.size()) - 1;
  constexpr double z99 = 2.5758293035489004;  // two-sided 99% normal quantile
  MaxPmfResult out;
  out.y_max = top;
  out.method = Method::monte_carlo;
  out.pi.resize(top + 1, 0.0);
  out.ci_halfwidth.resize(top + 1, 0.0);
  const double n = static_cast<double>(n_paths);
  for (int y = 0; y <= top; ++y) {
    const double phat = (y < static_cast<int>(counts.size())) ? counts[y] / n : 0.0;
    out.pi[y] = phat;
    out.ci_halfwidth[y] = z99 * std::sqrt(std::max(0.0, phat * (1.0 - phat)) / n);
    out.err_bound = std::max(out.err_bound, out.ci_halfwidth[y]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Heavy-traffic asymptotics
// ---------------------------------------------------------------------------

/// Local form: (2 a span / sigma2) * exp(-2 a y span / sigma2) ~ P(M = y*span).
inline double asymptotic_local(double a, double sigma2, int span, long y) {
  if (!(a > 0) || !(sigma2 > 0)) throw std::invalid_argument("requires a > 0 and sigma2 > 0");
  return (2.0 * a * span / sigma2) * std::exp(-2.0 * a * y * span / sigma2);
}

/// Tail form: exp(-2 a y span / sigma2) ~ P(M > y*span) for fixed y.
inline double asymptotic_tail(double a, double sigma2, int span, long y) {
  if (!(a > 0)) throw std::invalid_argument("requires a > 0");
  return std::exp(-2.0 * a * y * span / sigma2);
}

/// The local form summed over x >= y as a geometric series; its ratio to
/// asymptotic_tail tends to 1 as a -> 0.
inline double asymptotic_tail_summed(double a, double sigma2, int span, long y) {
  if (!(a > 0) || !(sigma2 > 0)) throw std::invalid_argument("requires a > 0 and sigma2 > 0");
  const double q = std::exp(-2.0 * a * span / sigma2);
  return (2.0 * a * span / sigma2) * std::exp(-2.0 * a * y * span / sigma2) / (1.0 - q);
}

}  // namespace maxwalk
