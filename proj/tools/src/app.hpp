#pragma once

#include <iosfwd>

namespace bvs::cli {

// Exit codes: 0 success, 1 usage or configuration, 2 data, 3 numerical.
int run_app(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bvs::cli
