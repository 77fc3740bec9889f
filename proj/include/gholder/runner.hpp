#ifndef GHOLDER_RUNNER_HPP
#define GHOLDER_RUNNER_HPP

#include <optional>
#include <string>

#include "gholder/config.hpp"

namespace gholder::cli {

struct Overrides {
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

/// Dispatch a parsed config to the matching engine. The returned report always
/// carries "verdict" and "exit_code" (0 pass/info, 1 violation, 2 invalid input).
json run_check_json(const json& config, const Overrides& overrides = {});

/// File front end: reads the config, writes the report (out_path empty -> stdout),
/// returns the exit code. Never throws; malformed input yields an exit-2 report.
int run_check_file(const std::string& config_path, const std::string& out_path,
                   const Overrides& overrides = {});

/// CSV rows "c1,c2,norm,member" over a grid x grid sweep of [0,1]^2, row-major.
std::string emit_region_plotdata(double t, int grid);

}  // namespace gholder::cli

#endif
