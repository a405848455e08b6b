#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vulrg::cli {

// Exit codes: 0 success, 1 domain or validation failure, 2 I/O or
// configuration failure (unreadable paths, bad flags).
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitConfig = 2;

// Full command dispatch, in-process; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vulrg::cli
