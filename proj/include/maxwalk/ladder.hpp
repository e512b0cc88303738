#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "maxwalk/lattice.hpp"

namespace maxwalk {

/// Sub-probability law of the first strict ascending ladder height:
/// heights[k-1] = P(S_{tau+} = k*span, tau+ < infty). total_A = P(tau+ < infty)
/// up to trunc_error, a certified bound on the ladder mass not yet captured.
struct DefectiveLadderPmf {
  int span = 1;
  std::vector<double> heights;
  double total_A = 0;
  double trunc_error = 0;
};

/// Ladder height conditioned on tau+ < infty; proper up to trunc_error/total_A.
/// mu is the mean in value units (>= span).
struct ConditionedLadderPmf {
  int span = 1;
  std::vector<double> probs;
  double mu = 0;

  double mean_offsets() const { return mu / span; }
};

/// First weak descending ladder epoch statistics. mean_tau_minus is +infinity
/// at zero drift. The reported values undercount by at most err_tau / err_s:
/// the true values lie in [mean_tau_minus, mean_tau_minus + err_tau] and
/// [mean_S_tau_minus - err_s, mean_S_tau_minus].
struct DescendingLadderStats {
  double mean_tau_minus = 0;
  double mean_S_tau_minus = 0;
  double err_tau = 0;
  double err_s = 0;
};

struct LadderOptions {
  long max_steps = 4'000'000;
  int initial_width = 64;   // starting spatial window; doubled on restart
  int max_restarts = 16;
};

/// Ladder height law by forward dynamic programming on
/// g_n(j) = P(S_n = j*span, max_{l<=n} S_l <= 0), j <= 0. Entry mass into
/// j >= 1 accrues as height mass. Mass stepping below the spatial floor -L is
/// charged to the certificate at its Lundberg ascent bound e^{-eta(1-j)};
/// the run stops once (alive ascent bound + leak bound) < tol. At zero drift
/// the ascent bound is 1, so the certificate reduces to alive + leaked mass.
inline DefectiveLadderPmf ascending_ladder(const DriftWalkSpec& walk, double tol = 1e-10,
                                           LadderOptions opt = {}) {
  if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
  const LatticePmf& p = walk.pmf;
  const int kmax = p.max_offset();
  const bool drifted = walk.drift_a > 0;
  const double eta = drifted ? lundberg_exponent(p) : 0.0;
  const double rho = std::exp(-eta);

  std::vector<std::pair<int, double>> steps(p.probs.begin(), p.probs.end());

  int L = opt.initial_width;
  if (drifted) L = std::max<int>(L, static_cast<int>(std::ceil(std::log(4.0 / tol) / eta)) + 1);

  for (int attempt = 0; attempt <= opt.max_restarts; ++attempt, L *= 2) {
    if (L > (1 << 26)) break;  // memory guard; fall through to NoConvergence
    std::vector<double> g(L + 1, 0.0), ng(L + 1, 0.0);  // index i <-> state j = -i
    g[0] = 1.0;
    std::vector<double> ascent(L + 1);  // ascent[i] = rho^{1+i} bounds P_{-i}(tau+ < infty)
    for (int i = 0; i <= L; ++i) ascent[i] = std::pow(rho, 1.0 + i);

    std::vector<double> m(kmax + 1, 0.0);
    double leak_bound = 0;
    bool leak_restart = false;

    for (long n = 0; n < opt.max_steps; ++n) {
      std::fill(ng.begin(), ng.end(), 0.0);
      for (int i = 0; i <= L; ++i) {
        const double gi = g[i];
        if (gi == 0) continue;
        for (const auto& [k, pk] : steps) {
          const int j2 = -i + k;
          if (j2 >= 1) {
            m[j2] += gi * pk;
          } else if (j2 >= -L) {
            ng[-j2] += gi * pk;
          } else {
            leak_bound += gi * pk * std::pow(rho, 1.0 - j2);
          }
        }
      }
      g.swap(ng);

      double bound = leak_bound;
      for (int i = 0; i <= L; ++i)
        if (g[i] != 0) bound += g[i] * ascent[i];
      if (bound < tol) {
        DefectiveLadderPmf out;
        out.span = p.span;
        out.heights.assign(m.begin() + 1, m.end());
        for (double h : out.heights) out.total_A += h;
        out.trunc_error = bound;
        return out;
      }
      if (leak_bound > 0.5 * tol) {  // floor too shallow; certificate can't recover
        leak_restart = true;
        break;
      }
    }
    if (!leak_restart) break;  // budget, not the floor, is the binding constraint
  }
  raise(errc::no_convergence,
        "ascending ladder did not certify tol=" + std::to_string(tol) +
            " within the step budget (drift too close to zero?)");
}

inline ConditionedLadderPmf conditioned_ladder(const DefectiveLadderPmf& d) {
  if (!(d.total_A > 0)) throw std::invalid_argument("total_A must be positive");
  ConditionedLadderPmf z;
  z.span = d.span;
  z.probs.resize(d.heights.size());
  double mean = 0;
  for (size_t i = 0; i < d.heights.size(); ++i) {
    z.probs[i] = d.heights[i] / d.total_A;
    mean += double(i + 1) * z.probs[i];
  }
  z.mu = d.span * mean;
  return z;
}

/// E[tau-] and E[S_{tau-}] for the first weak descending ladder epoch, by
/// forward DP over paths staying strictly positive. Certificates:
///   remaining tau mass  <= sum_i g(i) * (i + d) * span / a        (Wald)
///   remaining |S| mass  <= (d-1) * span * (alive above 0) + d * span * g(0)
/// where d is the deepest downward jump in offsets. At zero drift only the
/// S-statistic is certified and E[tau-] is reported as +infinity.
inline DescendingLadderStats descending_stats(const DriftWalkSpec& walk, double tol = 1e-10,
                                              LadderOptions opt = {}) {
  if (!(tol > 0)) throw std::invalid_argument("tol must be positive");
  const LatticePmf& p = walk.pmf;
  const int d = -p.min_offset();
  const int u = p.max_offset();
  const bool drifted = walk.drift_a > 0;
  const double a = walk.drift_a;
  const double span = p.span;
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<std::pair<int, double>> steps(p.probs.begin(), p.probs.end());

  int H = opt.initial_width;
  if (drifted) {
    const double eta = lundberg_exponent(p);
    H = std::max<int>(H, static_cast<int>(std::ceil(std::log(4.0 / tol) / eta)) + u + 1);
  }

  for (int attempt = 0; attempt <= opt.max_restarts; ++attempt, H *= 2) {
    if (H > (1 << 26)) break;
    std::vector<double> g(H + 1, 0.0), ng(H + 1, 0.0);
    g[0] = 1.0;
    double tau_acc = 0, s_acc = 0;
    double dropped_mass = 0, dropped_tau = 0;
    bool restart = false;

    for (long n = 0; n < opt.max_steps; ++n) {
      double alive = 0, wald = 0;
      for (int i = 0; i <= H; ++i) {
        if (g[i] == 0) continue;
        alive += g[i];
        wald += g[i] * (i + d);
      }
      const double rem_tau = drifted ? wald * span / a + dropped_tau : inf;
      const double rem_s =
          (d - 1) * span * (alive - g[0] + dropped_mass) + d * span * g[0];
      const bool tau_ok = !drifted || rem_tau < tol;
      if (tau_ok && rem_s < tol) {
        DescendingLadderStats st;
        st.mean_tau_minus = drifted ? tau_acc : inf;
        st.err_tau = drifted ? rem_tau : inf;
        st.mean_S_tau_minus = s_acc;
        st.err_s = rem_s;
        return st;
      }
      if (dropped_tau > 0.5 * tol || (d - 1) * span * dropped_mass > 0.5 * tol) {
        restart = true;  // ceiling too low for the requested certificate
        break;
      }

      tau_acc += alive;  // counts P(tau- > n)
      std::fill(ng.begin(), ng.end(), 0.0);
      for (int i = 0; i <= H; ++i) {
        const double gi = g[i];
        if (gi == 0) continue;
        for (const auto& [k, pk] : steps) {
          const int i2 = i + k;
          if (i2 <= 0) {
            s_acc += gi * pk * i2 * span;
          } else if (i2 <= H) {
            ng[i2] += gi * pk;
          } else {
            dropped_mass += gi * pk;
            if (drifted) dropped_tau += gi * pk * (i2 + d) * span / a;
          }
        }
      }
      g.swap(ng);  // landings at level 0 were absorbed above, so g[0] stays 0
    }
    if (!restart) break;
  }
  raise(errc::no_convergence,
        "descending ladder did not certify tol=" + std::to_string(tol) +
            " within the step budget (drift too close to zero?)");
}

/// P(tau+ = infty) = 1 / E[tau-], cross-checked against 1 - total_A from the
/// ascending route. The two intervals must overlap within twice their summed
/// certified errors, otherwise the truncation accounting is broken.
inline double prob_tau_plus_infinite(const DriftWalkSpec& walk, double tol = 1e-10,
                                     LadderOptions opt = {}) {
  if (!(walk.drift_a > 0)) throw std::invalid_argument("requires strictly negative mean");
  const DescendingLadderStats st = descending_stats(walk, tol, opt);
  // true E[tau-] in [acc, acc + err]
  const double p1_hi = 1.0 / st.mean_tau_minus;
  const double p1_lo = 1.0 / (st.mean_tau_minus + st.err_tau);
  const double p1 = 0.5 * (p1_lo + p1_hi);
  const double e1 = 0.5 * (p1_hi - p1_lo);

  const DefectiveLadderPmf asc = ascending_ladder(walk, tol, opt);
  // true A in [total_A, total_A + trunc_error]
  const double p2 = 1.0 - asc.total_A - 0.5 * asc.trunc_error;
  const double e2 = 0.5 * asc.trunc_error;

  if (std::abs(p1 - p2) > 2.0 * (e1 + e2) + 1e-14)
    raise(errc::inconsistent,
          "dual-route mismatch: 1/E[tau-]=" + std::to_string(p1) +
              " vs 1-A=" + std::to_string(p2));
  return p1;
}

inline GenFnEval gen_fn(const ConditionedLadderPmf& z, int y, double zarg) {
  return gen_fn(std::span<const double>(z.probs), y, zarg);
}

}  // namespace maxwalk
