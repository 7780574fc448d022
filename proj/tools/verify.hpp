#pragma once

#include <string>
#include <vector>

#include "commands.hpp"
#include "config.hpp"

namespace relpend::cli {

/// One invariant evaluated at desk scale: passes when observed < limit
/// (observed <= limit for counts, whose limit is usually 0).
struct CheckResult {
    std::string name;
    double observed = 0.0;
    double limit = 0.0;
    bool inclusive = false;
    bool passed = false;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;
    /// Set when the suite threw before finishing.
    std::string error;

    [[nodiscard]] bool passed() const noexcept;
    /// The failing check, else the one closest to its limit.
    [[nodiscard]] const CheckResult* worst() const noexcept;
};

[[nodiscard]] const std::vector<std::string>& suite_names();

/// Runs one suite against the configured parameters and integrator.
[[nodiscard]] SuiteResult run_suite(const std::string& name, const RunConfig& cfg);

/// Prints one line per suite; exit 0 iff every selected suite passes.
int cmd_verify(const RunConfig& cfg, Streams io);

}  // namespace relpend::cli
