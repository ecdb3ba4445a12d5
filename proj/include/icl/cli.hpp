#pragma once

#include <iosfwd>

namespace icl {

/// Entry point of the icl-mt command. Returns 0 on success, 1 on usage errors and 2 on
/// runtime errors. Results go to `out`; logs and diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace icl
