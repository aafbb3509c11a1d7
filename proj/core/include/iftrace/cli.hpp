#pragma once

#include <string>
#include <vector>

namespace iftrace {

// Exit codes: 0 analyzed, no leakage (or subcommand success); 1 analyzed,
// leakage found; 2 usage/parse/config error; 3 backend failure; 4 report
// validation failure.
int cli_main(const std::vector<std::string>& args);

}  // namespace iftrace
