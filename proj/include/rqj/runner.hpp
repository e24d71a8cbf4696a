#pragma once

#include "rqj/config.hpp"

namespace rqj {

struct RunOutcome {
    int exit_code = 0;
    std::string message;
};

// Dispatches a validated configuration to the module pipelines and writes
// all outputs plus run_meta.json under cfg.output_dir. Never throws; failures
// are reported via the exit code and an `incomplete` marker in the metadata.
RunOutcome run(const RunConfig& cfg);

}  // namespace rqj
