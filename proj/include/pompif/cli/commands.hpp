#pragma once

#include "pompif/cli/config.hpp"

namespace pompif::cli {

/// data.csv and states.csv in the output directory.
void cmd_simulate(const RunConfig& config);
/// pfilter_result.csv and pfilter_conditional.csv; one ledger row.
void cmd_pfilter(const RunConfig& config);
/// traces.csv and candidates.csv; one ledger row per candidate.
void cmd_mif2(const RunConfig& config);
/// profile_<param>.csv and mcap_<param>.csv; one ledger row per profile point.
void cmd_profile(const RunConfig& config);

/// Process exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

}  // namespace pompif::cli
