#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ewfrag::cli {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  // a verification suite failed
inline constexpr int kExitUsage = 2;   // bad flags, bad values, unwritable output

// `args` excludes the program name. Normal output goes to `out` unless --out
// is given; diagnostics and usage text go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace ewfrag::cli
