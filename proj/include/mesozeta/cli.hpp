#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mesozeta::cli {

// Runs one command line (without the program name). Returns the exit code:
// 0 success, 1 usage/domain/config error, 2 missing resource or I/O error.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Help of the top-level command followed by every subcommand, in order.
std::string full_help();

}  // namespace mesozeta::cli
