#pragma once

#include <iosfwd>

namespace netid {

/// Entry point of the `netid` command-line tool. Results go to `out` unless
/// redirected to files; failures print a JSON error object to `err` and
/// return a nonzero status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace netid
