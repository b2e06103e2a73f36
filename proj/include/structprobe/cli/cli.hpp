#pragma once

#include <iosfwd>

namespace structprobe::cli {

/// Exit codes: 0 success, 1 internal failure, 2 usage or data error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace structprobe::cli
