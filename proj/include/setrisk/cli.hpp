#pragma once

#include <iosfwd>

namespace setrisk {

// Exit codes: 0 success, 1 acceptance failure, 2 config or IO error,
// 3 modeling pathology.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace setrisk
