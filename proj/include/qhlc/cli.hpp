#pragma once

// Command-line front end. Every subcommand writes one artifact (CSV or JSON)
// to stdout or --output; diagnostics go to the error stream.
//
// Exit codes: 0 success, 1 usage error, 2 domain error, 3 numerical failure.

#include <iosfwd>
#include <string>

namespace qhlc::cli {

enum class Format { automatic, csv, json };

/// Shared settings. Precedence: flags > QHLC_* environment > these defaults.
struct RunConfig {
  double rtol = 1e-11;        // --rtol, QHLC_RTOL
  double atol = 1e-13;        // --atol, QHLC_ATOL
  double z_seed = 1e-3;       // --z-seed, QHLC_Z_SEED
  double r_max = 1e6;         // --r-max, QHLC_R_MAX (escape radius, both charts)
  double band = 1e-12;        // --band, QHLC_BAND (K-curve band)
  std::string output;         // --output, QHLC_OUTPUT; empty = stdout
  Format format = Format::automatic;  // --format, QHLC_FORMAT
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitNumerical = 3;

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Shortest decimal with 17 significant digits, '.' separator, no locale.
std::string format_number(double x);

}  // namespace qhlc::cli
