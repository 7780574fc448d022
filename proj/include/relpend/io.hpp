#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "relpend/autonomous.hpp"
#include "relpend/integrate.hpp"
#include "relpend/model.hpp"
#include "relpend/poincare.hpp"
#include "relpend/solver.hpp"

namespace relpend::io {

using nlohmann::json;

/// Every float is printed with 17 significant digits.
[[nodiscard]] std::string format_double(double v);

/// json::dump with floats through format_double; indent < 0 gives one line.
[[nodiscard]] std::string dump(const json& j, int indent = -1);

/// {"a": real, "T": real, "N": int, "forcing": {"cos": [...], "sin": [...]}}.
/// Missing "forcing" means f = 0. Unknown keys raise ParameterError.
[[nodiscard]] PendulumParams params_from_json(const json& j);
[[nodiscard]] json params_to_json(const PendulumParams& p);

/// FNV-1a over the canonical JSON dump of the parameters, as 16 hex digits.
[[nodiscard]] std::string params_hash(const PendulumParams& p);

void write_trajectory_csv(std::ostream& os, const std::vector<TrajectorySample>& rows);

/// Curve samples as CSV rows "q,p"; an optional header line "q,p" is skipped.
[[nodiscard]] std::vector<CylinderState> read_curve_csv(std::istream& is);

[[nodiscard]] json orbit_to_json(const PeriodicOrbit& o);
[[nodiscard]] json continuum_to_json(const DegenerateContinuum& c);

/// One JSON object per line; a continuum is a single line.
void write_fixed_points_jsonl(std::ostream& os, const FixedPointSet& set);

[[nodiscard]] json twist_report_json(const TwistReport& rep, const PendulumParams& p);
[[nodiscard]] json boundary_report_json(const BoundaryTwist& rep, const StripBound& bound, const PendulumParams& p);

/// Writes `content` to a sibling temporary file and renames it over `path`,
/// so a failed run never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace relpend::io
