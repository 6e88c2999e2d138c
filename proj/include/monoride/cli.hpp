#pragma once

#include "monoride/config.hpp"
#include "monoride/simulate.hpp"
#include "monoride/trajectory_io.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace monoride::cli {

/// Runs the command line `args` (args[0] is the program name) and returns the exit status.
/// Library errors map to their exit codes; usage errors exit with 2.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Trajectory columns plus a terminal-voltage column `v` when `ecm` is given.
[[nodiscard]] Table trajectory_table(const Trajectory& traj, const std::optional<EcmParams>& ecm);

/// Consecutive runs of identical phase names: (phase, first index, last index).
struct PhaseSpan {
    std::string phase;
    std::size_t first = 0;
    std::size_t last = 0;
};
[[nodiscard]] std::vector<PhaseSpan> phase_spans(const ConstraintSet& set,
                                                 const std::vector<std::vector<std::size_t>>& profile);

}  // namespace monoride::cli
