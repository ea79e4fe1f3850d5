#pragma once

#include <iosfwd>

namespace testscope {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitThreats = 1;       // report --fail-on threat
inline constexpr int kExitInvalidInput = 2;  // missing root, bad config, schema violation, port in use
inline constexpr int kExitUnknownFocus = 3;
inline constexpr int kExitInternal = 4;

/// Command-line entry point: extract, analyze, view, report, serve.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace testscope
