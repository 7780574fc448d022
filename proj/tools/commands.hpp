#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "config.hpp"

namespace relpend::cli {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int verify_failed = 1;
inline constexpr int inadmissible = 2;
inline constexpr int no_convergence = 3;
inline constexpr int usage = 64;
}  // namespace exit_code

/// Flags that override the config file.
struct Overrides {
    std::optional<std::string> out;
    /// Shuffles sweep evaluation order; rows are sorted before writing either way.
    std::optional<unsigned long long> seed;
};

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

int cmd_check(const RunConfig& cfg, Streams io);
int cmd_simulate(const RunConfig& cfg, const Overrides& ov, Streams io);
int cmd_poincare_grid(const RunConfig& cfg, const Overrides& ov, Streams io);
int cmd_find_periodic(const RunConfig& cfg, const Overrides& ov, Streams io);
int cmd_twist_map(const RunConfig& cfg, const Overrides& ov, Streams io);
int cmd_autonomous(const RunConfig& cfg, const Overrides& ov, Streams io);
int cmd_sweep(const RunConfig& cfg, const Overrides& ov, Streams io);

/// Parses argv, dispatches, and maps library errors onto the exit-code contract.
int run_cli(int argc, const char* const* argv, Streams io);

}  // namespace relpend::cli
