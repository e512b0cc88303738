#pragma once

#include <stdexcept>
#include <string>

namespace maxwalk {

enum class errc {
  not_normalized,
  periodic,
  degenerate_support,
  drift_unattainable,
  no_convergence,
  no_root,
  not_skip_free,
  inconsistent,
  bad_config,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::not_normalized: return "NotNormalized";
    case errc::periodic: return "Periodic";
    case errc::degenerate_support: return "DegenerateSupport";
    case errc::drift_unattainable: return "DriftUnattainable";
    case errc::no_convergence: return "NoConvergence";
    case errc::no_root: return "NoRoot";
    case errc::not_skip_free: return "NotSkipFree";
    case errc::inconsistent: return "Inconsistent";
    case errc::bad_config: return "BadConfig";
  }
  return "Unknown";
}

/// Domain error with a machine-checkable code. Plain precondition misuse
/// (negative tolerances, zero-drift walk passed to a drifted-only routine)
/// throws std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& msg) { throw Error(code, msg); }

}  // namespace maxwalk
