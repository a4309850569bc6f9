#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ipp {

// Dispatches one of the subcommands {expect, semigroup, simulate, superhedge,
// coherence, renewal, oracle}, writing the report (JSON, or CSV where
// requested) to `out` and diagnostics to `err`. Returns 0 on success, 2 on
// validation errors, 3 on resource/budget errors.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ipp
