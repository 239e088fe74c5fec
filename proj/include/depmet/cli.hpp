#pragma once

#include <iosfwd>

namespace depmet {

inline constexpr const char* kVersion = "0.1.0";

/// The `depmet` command line. Returns 0 on success, 1 on usage or
/// configuration errors, 2 on runtime errors; messages go to `err`.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace depmet
