#pragma once

#include <iosfwd>

namespace fundim::cli {

// Exit codes: 0 success, 1 usage or input error, 2 analysis error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fundim::cli
