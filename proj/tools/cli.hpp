#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace infovel::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInternal = 3;

// Runs the tool with argv-style arguments (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Parses "0.25" or "1/48".
double parse_probability(const std::string& text);

}  // namespace infovel::cli
