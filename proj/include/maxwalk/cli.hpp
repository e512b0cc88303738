#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "maxwalk/study.hpp"

namespace maxwalk {

namespace detail {

inline int emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return 0;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) raise(errc::bad_config, "cannot write " + out_path);
  out << text;
  return 0;
}

inline int exit_code_for(const Error& e) {
  switch (e.code()) {
    case errc::no_convergence:
    case errc::no_root:
    case errc::inconsistent:
      return 2;
    default:
      return 1;
  }
}

}  // namespace detail

/// Entry point behind the maxwalk binary. Exit codes: 0 success, 1 config or
/// input error, 2 numerical failure; one-line diagnostics go to stderr.
inline int cli_main(const std::vector<std::string>& args) {
  CLI::App app{"maxwalk: distribution of the all-time maximum of a negative-drift "
               "lattice random walk"};
  app.require_subcommand(1);

  std::string dist_path, config_path, out_path, method_name_arg = "geometric_sum";
  int ymax = 50;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  long n_paths = 1'000'000;

  auto add_common = [&](CLI::App* sub, bool needs_dist) {
    if (needs_dist) sub->add_option("--dist", dist_path, "distribution JSON")->required();
    sub->add_option("--out", out_path, "output path (default stdout)");
  };

  CLI::App* validate_cmd = app.add_subcommand("validate", "check a distribution document");
  add_common(validate_cmd, true);

  CLI::App* ladder_cmd = app.add_subcommand("ladder", "ascending ladder height law");
  add_common(ladder_cmd, true);
  ladder_cmd->add_option("--tol", tol, "certified truncation tolerance");

  CLI::App* maxdist_cmd = app.add_subcommand("maxdist", "pmf of the all-time maximum");
  add_common(maxdist_cmd, true);
  maxdist_cmd->add_option("--ymax", ymax, "largest lattice level");
  maxdist_cmd->add_option("--method", method_name_arg,
                          "geometric_sum|lindley|closed_form|monte_carlo");
  maxdist_cmd->add_option("--tol", tol, "tolerance / certified bound");
  maxdist_cmd->add_option("--seed", seed, "Monte Carlo seed");
  maxdist_cmd->add_option("--paths", n_paths, "Monte Carlo path count");

  CLI::App* asym_cmd = app.add_subcommand("asymptotic", "heavy-traffic asymptotics");
  add_common(asym_cmd, true);
  asym_cmd->add_option("--ymax", ymax, "largest lattice level");

  CLI::App* renewal_cmd = app.add_subcommand("renewal", "weighted renewal masses");
  renewal_cmd->add_option("--config", config_path, "renewal config JSON")->required();
  renewal_cmd->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "heavy-traffic ratio sweep");
  sweep_cmd->add_option("--config", config_path, "sweep config JSON")->required();
  sweep_cmd->add_option("--out", out_path, "output path (default stdout)");

  CLI::App* rem_cmd = app.add_subcommand("remainder", "renewal remainder scan");
  rem_cmd->add_option("--config", config_path, "remainder config JSON")->required();
  rem_cmd->add_option("--out", out_path, "output path (default stdout)");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (validate_cmd->parsed()) {
      const LatticePmf pmf = validate(pmf_from_json(load_json_file(dist_path)));
      const Moments m = moments(pmf);
      std::string text = "field,value\n";
      text += "span," + std::to_string(pmf.span) + '\n';
      text += "support_size," + std::to_string(pmf.probs.size()) + '\n';
      text += "mean," + fmt17(m.mean) + '\n';
      text += "variance," + fmt17(m.variance) + '\n';
      text += "drift_a," + fmt17(-m.mean) + '\n';
      return detail::emit(text, out_path);
    }

    if (ladder_cmd->parsed()) {
      const DriftWalkSpec walk = make_walk(pmf_from_json(load_json_file(dist_path)));
      const DefectiveLadderPmf lad = ascending_ladder(walk, tol);
      const ConditionedLadderPmf z = conditioned_ladder(lad);
      std::string text = "quantity,value\n";
      text += "total_A," + fmt17(lad.total_A) + '\n';
      text += "trunc_error," + fmt17(lad.trunc_error) + '\n';
      text += "mu," + fmt17(z.mu) + '\n';
      for (size_t i = 0; i < lad.heights.size(); ++i)
        text += "height_" + std::to_string(i + 1) + ',' + fmt17(lad.heights[i]) + '\n';
      if (walk.drift_a > 0) {
        const DescendingLadderStats st = descending_stats(walk, tol);
        text += "mean_tau_minus," + fmt17(st.mean_tau_minus) + '\n';
        text += "mean_S_tau_minus," + fmt17(st.mean_S_tau_minus) + '\n';
        text += "p_tau_plus_infinite," + fmt17(1.0 / st.mean_tau_minus) + '\n';
      }
      return detail::emit(text, out_path);
    }

    if (maxdist_cmd->parsed()) {
      const DriftWalkSpec walk = make_walk(pmf_from_json(load_json_file(dist_path)));
      const auto m = method_from_name(method_name_arg);
      if (!m) raise(errc::bad_config, "unknown method " + method_name_arg);
      MaxPmfResult r;
      switch (*m) {
        case Method::geometric_sum: r = pmf_geometric_sum(walk, ymax, tol); break;
        case Method::lindley: r = pmf_lindley(walk, ymax, tol); break;
        case Method::closed_form: r = pmf_closed_form_skipfree(walk, ymax); break;
        case Method::monte_carlo: r = simulate_max(walk, n_paths, seed, tol, ymax); break;
      }
      return detail::emit(to_csv(r), out_path);
    }

    if (asym_cmd->parsed()) {
      const DriftWalkSpec walk = make_walk(pmf_from_json(load_json_file(dist_path)));
      if (!(walk.drift_a > 0)) raise(errc::bad_config, "asymptotics need negative mean");
      std::string text = "y,local,tail,tail_summed\n";
      for (int y = 0; y <= ymax; ++y) {
        text += std::to_string(y) + ',' +
                fmt17(asymptotic_local(walk.drift_a, walk.sigma2, walk.pmf.span, y)) + ',' +
                fmt17(asymptotic_tail(walk.drift_a, walk.sigma2, walk.pmf.span, y)) + ',' +
                fmt17(asymptotic_tail_summed(walk.drift_a, walk.sigma2, walk.pmf.span, y)) +
                '\n';
      }
      return detail::emit(text, out_path);
    }

    if (renewal_cmd->parsed()) {
      const nlohmann::json j = load_json_file(config_path);
      if (!j.contains("z_pmf") || !j.contains("A") || !j.contains("n_max"))
        raise(errc::bad_config, "renewal config needs z_pmf, A, n_max");
      const ConditionedLadderPmf z = positive_pmf_from_json(j.at("z_pmf"));
      const double A = j.at("A").get<double>();
      const int n_max = j.at("n_max").get<int>();
      RenewalSequence seq;
      try {
        seq = renewal_sequence(z, A, n_max);
      } catch (const std::invalid_argument& e) {
        raise(errc::bad_config, e.what());
      }
      std::string text = "n,u\n";
      for (int n = 0; n <= n_max; ++n)
        text += std::to_string(n) + ',' + fmt17(seq.u[n]) + '\n';
      return detail::emit(text, out_path);
    }

    if (sweep_cmd->parsed()) {
      const SweepConfig cfg = sweep_config_from_json(load_json_file(config_path));
      return detail::emit(to_csv(run_sweep(cfg)), out_path);
    }

    if (rem_cmd->parsed()) {
      const RemainderScanConfig cfg = remainder_config_from_json(load_json_file(config_path));
      return detail::emit(to_csv(run_remainder_scan(cfg)), out_path);
    }
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return detail::exit_code_for(e);
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }
  return 1;
}

inline int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args);
}

}  // namespace maxwalk
