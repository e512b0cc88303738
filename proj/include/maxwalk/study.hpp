#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxwalk/max_pmf.hpp"

namespace maxwalk {

/// Heavy-traffic sweep along the ray a*y = c (or the slow-growth ray
/// y = ceil(a^{-1/2})): one row per (drift, method) comparing the exact
/// maximum pmf at y with the local asymptotic.
struct SweepConfig {
  LatticePmf base_pmf;  // zero mean
  std::vector<double> a_grid;  // strictly decreasing
  double c = 1.0;
  std::vector<Method> methods{Method::geometric_sum};
  double tol = 1e-8;
  std::uint64_t seed = 1;
  long n_paths = 100'000;
  std::string ray = "fixed_c";  // or "slow_growth"
  // remainder-scan knobs carried in the same config file
  double C = 1.0;
  double C1 = 1.5;
  double s = 2.0;
};

struct StudyRow {
  double a = 0;
  int y = 0;
  double c = 0;  // recomputed as a*y so rows are self-consistent
  Method method = Method::geometric_sum;
  double exact = 0;
  double asymptotic = 0;
  double ratio = 0;
  double err_bound = 0;
};

inline void validate_sweep_config(const SweepConfig& cfg) {
  for (size_t i = 1; i < cfg.a_grid.size(); ++i)
    if (!(cfg.a_grid[i] < cfg.a_grid[i - 1]))
      raise(errc::bad_config, "a_grid must be strictly decreasing");
  for (double a : cfg.a_grid)
    if (!(a > 0)) raise(errc::bad_config, "a_grid entries must be positive");
  if (!(cfg.c > 0)) raise(errc::bad_config, "c must be positive");
  if (cfg.ray != "fixed_c" && cfg.ray != "slow_growth")
    raise(errc::bad_config, "ray must be fixed_c or slow_growth");
  if (cfg.ray == "fixed_c")
    for (double a : cfg.a_grid)
      if (static_cast<long>(std::floor(cfg.c / a + 0.5)) < 1)
        raise(errc::bad_config, "y = round(c/a) must be >= 1 for every a");
}

inline std::vector<StudyRow> run_sweep(const SweepConfig& cfg) {
  validate_sweep_config(cfg);
  const LatticePmf base = validate(cfg.base_pmf);
  const double sigma2 = moments(base).variance;  // zero-drift variance

  std::vector<StudyRow> rows;
  int row_index = 0;
  for (double a : cfg.a_grid) {
    const int y = (cfg.ray == "fixed_c")
                      ? static_cast<int>(std::floor(cfg.c / a + 0.5))
                      : static_cast<int>(std::ceil(1.0 / std::sqrt(a)));
    try {
      const DriftWalkSpec walk = tilt_to_drift(base, a);
      const double asym = asymptotic_local(a, sigma2, base.span, y);
      for (Method m : cfg.methods) {
        StudyRow row;
        row.a = a;
        row.y = y;
        row.c = a * y;
        row.method = m;
        row.asymptotic = asym;
        switch (m) {
          case Method::geometric_sum: {
            const MaxPmfResult r = pmf_geometric_sum(walk, y, cfg.tol);
            row.exact = r.pi[y];
            row.err_bound = r.err_bound;
            break;
          }
          case Method::lindley: {
            const MaxPmfResult r = pmf_lindley(walk, y, cfg.tol);
            row.exact = r.pi[y];
            row.err_bound = r.err_bound;
            break;
          }
          case Method::closed_form: {
            const MaxPmfResult r = pmf_closed_form_skipfree(walk, y);
            row.exact = r.pi[y];
            row.err_bound = r.err_bound;
            break;
          }
          case Method::monte_carlo: {
            const MaxPmfResult r =
                simulate_max(walk, cfg.n_paths, cfg.seed + row_index, cfg.tol, y);
            row.exact = r.pi[y];
            row.err_bound = (y < static_cast<int>(r.ci_halfwidth.size()))
                                ? r.ci_halfwidth[y]
                                : r.err_bound;
            break;
          }
        }
        row.ratio = row.exact / row.asymptotic;
        rows.push_back(row);
        ++row_index;
      }
    } catch (const Error& e) {
      raise(e.code(), "sweep row a=" + std::to_string(a) + " failed: " + e.what());
    }
  }
  std::sort(rows.begin(), rows.end(), [](const StudyRow& x, const StudyRow& y2) {
    if (x.a != y2.a) return x.a < y2.a;
    return std::string(method_name(x.method)) < method_name(y2.method);
  });
  return rows;
}

/// Remainder-scan driver: Z is either supplied directly or computed as the
/// conditioned zero-drift ladder law of base_pmf at ladder_tol.
struct RemainderScanConfig {
  std::optional<ConditionedLadderPmf> z;
  std::optional<LatticePmf> base_pmf;
  double ladder_tol = 1e-2;
  std::vector<int> y_grid;
  double C = 1.0;
  double C1 = 1.5;
  double s = 2.0;
  std::optional<double> mu0;  // lattice units; defaults to the mean of Z
};

inline std::vector<RemainderRow> run_remainder_scan(const RemainderScanConfig& cfg) {
  if (!(cfg.s > 1)) raise(errc::bad_config, "remainder scan requires s > 1");
  if (cfg.y_grid.empty()) raise(errc::bad_config, "y_grid must be non-empty");
  ConditionedLadderPmf z;
  if (cfg.z) {
    z = *cfg.z;
  } else if (cfg.base_pmf) {
    const DriftWalkSpec walk = make_walk(*cfg.base_pmf);
    if (walk.drift_a > 0) raise(errc::bad_config, "base_pmf must have zero mean");
    z = conditioned_ladder(ascending_ladder(walk, cfg.ladder_tol));
  } else {
    raise(errc::bad_config, "remainder scan needs z_pmf or base_pmf");
  }
  const double mu0 = cfg.mu0 ? *cfg.mu0 : z.mean_offsets();
  try {
    return remainder_scan(z, mu0, cfg.C, cfg.C1, cfg.y_grid, cfg.s);
  } catch (const std::invalid_argument& e) {
    raise(errc::bad_config, e.what());
  }
}

// ---------------------------------------------------------------------------
// JSON input formats
// ---------------------------------------------------------------------------

/// Distribution document: {"span": int, "probs": {"<offset>": float, ...}}
/// with offsets as decimal-integer strings.
inline LatticePmf pmf_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("span") || !j.contains("probs"))
    raise(errc::bad_config, "distribution JSON needs span and probs");
  LatticePmf pmf;
  pmf.span = j.at("span").get<int>();
  const auto& probs = j.at("probs");
  if (!probs.is_object()) raise(errc::bad_config, "probs must be an object");
  for (auto it = probs.begin(); it != probs.end(); ++it) {
    size_t pos = 0;
    int k = 0;
    try {
      k = std::stoi(it.key(), &pos);
    } catch (const std::exception&) {
      raise(errc::bad_config, "offset key '" + it.key() + "' is not an integer");
    }
    if (pos != it.key().size())
      raise(errc::bad_config, "offset key '" + it.key() + "' is not an integer");
    pmf.probs[k] = it.value().get<double>();
  }
  return pmf;
}

inline nlohmann::json pmf_to_json(const LatticePmf& pmf) {
  nlohmann::json probs = nlohmann::json::object();
  for (const auto& [k, p] : pmf.probs) probs[std::to_string(k)] = p;
  return nlohmann::json{{"span", pmf.span}, {"probs", probs}};
}

/// A distribution document on strictly positive offsets, normalized to 1.
inline ConditionedLadderPmf positive_pmf_from_json(const nlohmann::json& j) {
  const LatticePmf raw = pmf_from_json(j);
  ConditionedLadderPmf z;
  z.span = raw.span;
  double total = 0, mean = 0;
  int kmax = 0;
  for (const auto& [k, p] : raw.probs) {
    if (p < 0) raise(errc::bad_config, "negative probability");
    if (p == 0) continue;
    if (k < 1) raise(errc::bad_config, "ladder-law offsets must be >= 1");
    kmax = std::max(kmax, k);
    total += p;
    mean += double(k) * p;
  }
  if (std::abs(total - 1.0) > kNormalizationTol)
    raise(errc::bad_config, "ladder-law probabilities must sum to 1");
  z.probs.assign(kmax, 0.0);
  for (const auto& [k, p] : raw.probs)
    if (p > 0) z.probs[k - 1] = p;
  z.mu = raw.span * mean;
  return z;
}

inline nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) raise(errc::bad_config, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    raise(errc::bad_config, std::string("JSON parse error: ") + e.what());
  }
  return j;
}

inline SweepConfig sweep_config_from_json(const nlohmann::json& j) {
  SweepConfig cfg;
  if (!j.contains("base_pmf")) raise(errc::bad_config, "sweep config needs base_pmf");
  cfg.base_pmf = pmf_from_json(j.at("base_pmf"));
  if (!j.contains("a_grid")) raise(errc::bad_config, "sweep config needs a_grid");
  cfg.a_grid = j.at("a_grid").get<std::vector<double>>();
  if (j.contains("c")) cfg.c = j.at("c").get<double>();
  if (j.contains("methods")) {
    cfg.methods.clear();
    for (const auto& name : j.at("methods")) {
      const auto m = method_from_name(name.get<std::string>());
      if (!m) raise(errc::bad_config, "unknown method " + name.get<std::string>());
      cfg.methods.push_back(*m);
    }
  }
  if (j.contains("tol")) cfg.tol = j.at("tol").get<double>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("n_paths")) cfg.n_paths = j.at("n_paths").get<long>();
  if (j.contains("ray")) cfg.ray = j.at("ray").get<std::string>();
  if (j.contains("C")) cfg.C = j.at("C").get<double>();
  if (j.contains("C1")) cfg.C1 = j.at("C1").get<double>();
  if (j.contains("s")) cfg.s = j.at("s").get<double>();
  return cfg;
}

inline RemainderScanConfig remainder_config_from_json(const nlohmann::json& j) {
  RemainderScanConfig cfg;
  if (j.contains("z_pmf")) cfg.z = positive_pmf_from_json(j.at("z_pmf"));
  if (j.contains("base_pmf")) cfg.base_pmf = pmf_from_json(j.at("base_pmf"));
  if (j.contains("ladder_tol")) cfg.ladder_tol = j.at("ladder_tol").get<double>();
  if (!j.contains("y_grid")) raise(errc::bad_config, "remainder config needs y_grid");
  cfg.y_grid = j.at("y_grid").get<std::vector<int>>();
  if (j.contains("C")) cfg.C = j.at("C").get<double>();
  if (j.contains("C1")) cfg.C1 = j.at("C1").get<double>();
  if (j.contains("s")) cfg.s = j.at("s").get<double>();
  if (j.contains("mu0")) cfg.mu0 = j.at("mu0").get<double>();
  return cfg;
}

// ---------------------------------------------------------------------------
// CSV output (lossless double round-trip via 17 significant digits)
// ---------------------------------------------------------------------------

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_csv(const std::vector<StudyRow>& rows) {
  std::string out = "a,y,c,method,exact,asymptotic,ratio,err_bound\n";
  for (const StudyRow& r : rows) {
    out += fmt17(r.a) + ',' + std::to_string(r.y) + ',' + fmt17(r.c) + ',' +
           method_name(r.method) + ',' + fmt17(r.exact) + ',' + fmt17(r.asymptotic) + ',' +
           fmt17(r.ratio) + ',' + fmt17(r.err_bound) + '\n';
  }
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline std::vector<StudyRow> parse_study_csv(const std::string& csv) {
  std::vector<StudyRow> rows;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line)) return rows;
  if (line != "a,y,c,method,exact,asymptotic,ratio,err_bound")
    raise(errc::bad_config, "unexpected sweep CSV header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 8) raise(errc::bad_config, "sweep CSV row needs 8 fields");
    StudyRow r;
    r.a = std::strtod(f[0].c_str(), nullptr);
    r.y = std::atoi(f[1].c_str());
    r.c = std::strtod(f[2].c_str(), nullptr);
    const auto m = method_from_name(f[3]);
    if (!m) raise(errc::bad_config, "unknown method " + f[3]);
    r.method = *m;
    r.exact = std::strtod(f[4].c_str(), nullptr);
    r.asymptotic = std::strtod(f[5].c_str(), nullptr);
    r.ratio = std::strtod(f[6].c_str(), nullptr);
    r.err_bound = std::strtod(f[7].c_str(), nullptr);
    rows.push_back(r);
  }
  return rows;
}

inline std::string to_csv(const std::vector<RemainderRow>& rows) {
  std::string out = "y,A_y,direct,leading,scaled_remainder,lemma3_ok\n";
  for (const RemainderRow& r : rows) {
    out += std::to_string(r.y) + ',' + fmt17(r.A_y) + ',' + fmt17(r.direct) + ',' +
           fmt17(r.leading) + ',' + fmt17(r.scaled_remainder) + ',' +
           (r.lemma3_ok ? "1" : "0") + '\n';
  }
  return out;
}

inline std::string to_csv(const MaxPmfResult& r) {
  std::string out = "y,p\n";
  for (int y = 0; y <= r.y_max; ++y)
    out += std::to_string(y) + ',' + fmt17(r.pi[y]) + '\n';
  return out;
}

}  // namespace maxwalk
