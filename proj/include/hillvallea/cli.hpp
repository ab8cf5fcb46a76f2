#pragma once

#include "hillvallea/sweep.hpp"

#include <iosfwd>
#include <optional>

namespace hillvallea {

/// Parses command-line flags (and an optional `--config` key=value file)
/// into a RunConfig. Returns std::nullopt after printing help or a
/// diagnostic; `exit_code` then holds the process status.
std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
                                            int& exit_code);

/// Entry point of the `hillvallea` tool.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hillvallea
