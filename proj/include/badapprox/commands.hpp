#pragma once

// The four CLI commands as library calls. Each writes its artifacts and a
// report (<command>-report.json / .txt) under cfg.out and returns the bundle.
// Errors propagate as exceptions: InvalidParams for rejected input,
// FormatError for unreadable files, other badapprox::Error for failed runs.

#include "badapprox/io.hpp"

#include <string>

namespace badapprox::io {

/// params with maxStage = cfg.depth; writes checkpoint.json. Nothing is
/// written when the build fails.
ReportBundle cmd_build(const RunConfig& cfg);

/// Suites: simplex, avoidance, measure, retention, leading, qapprox.
/// cfg.which empty runs all of them.
ReportBundle cmd_verify(const RunConfig& cfg, const std::string& checkpoint_path);

/// Builds the Cantor subtree from the seed ball; writes tree.json and deepest.csv.
ReportBundle cmd_subset(const RunConfig& cfg, const std::string& checkpoint_path);

/// Box counts of the deepest-layer centers; writes boxcount.csv.
ReportBundle cmd_dimension(const RunConfig& cfg, const std::string& tree_path);

/// 0 when every check passed or was skipped, 1 otherwise.
int exit_status(const ReportBundle& r);

}  // namespace badapprox::io
