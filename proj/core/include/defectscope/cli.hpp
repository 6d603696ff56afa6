#pragma once

#include <optional>
#include <string>
#include <vector>

#include "defectscope/pipeline.hpp"

namespace dscope {

enum class CliVerb { run, extract, reason };

struct CliInvocation {
  CliVerb verb = CliVerb::run;
  RunConfig config;
  ReasonInputs reason;
};

struct CliParseResult {
  std::optional<CliInvocation> invocation;  // empty on help or usage error
  int exit_code = 0;                        // 0 ok/help, 2 usage error
  std::string message;                      // help or error text
};

// Parses arguments (program name excluded). Never throws.
CliParseResult parse_cli(const std::vector<std::string>& args);

// Full CLI entry point: parse, dispatch, map errors to exit codes.
int cli_main(int argc, char** argv);

}  // namespace dscope
