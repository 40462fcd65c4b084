#pragma once

#include <ostream>

namespace escher::cli {

// Exit codes: 0 success, 1 domain error (error name on the first stdout
// line), 2 usage or IO error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace escher::cli
