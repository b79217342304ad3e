#pragma once

#include "flapkit/config.hpp"
#include "flapkit/plant.hpp"

namespace flapkit::cfg {

// Builds a simulation scenario from a parsed config, validating every module
// invariant (throws ValidationError naming the violated bound).
plant::ScenarioConfig scenario_from_config(const Config& config);

// Runs the configured pipeline, writes its outputs plus manifest.json under
// run.out_dir, and returns kExitOk.  Module faults propagate as exceptions;
// the CLI maps them to exit codes.
int dispatch(const RunConfig& run);

}  // namespace flapkit::cfg
