#pragma once

#include "config.hpp"
#include "report.hpp"

namespace ripkit::cli {

/// Runs the configured command and returns its records. Side outputs (plot
/// data) are written here; the report itself is not.
Payload execute(const ExperimentConfig& config);

/// execute() wrapped with version, configuration echo and timestamp.
ReportEnvelope run(const ExperimentConfig& config);

}  // namespace ripkit::cli
