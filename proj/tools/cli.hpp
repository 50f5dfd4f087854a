#pragma once

// `vecmag` command-line front end. Kept as a library so tests can drive it
// in-process with captured streams.

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace vecmag::cli {

enum ExitCode : int {
  kOk = 0,
  kBadFlags = 2,
  kNumerical = 3,
  kOutOfRegime = 4,
};

/// Parses and runs one invocation; argv[0] is the program name.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

/// "bx,by,bz" (each entry may be an angle literal such as 0.5pi).
std::array<double, 3> parse_triple(const std::string& text);
/// "start:stop:points", inclusive of both ends.
std::vector<double> parse_grid(const std::string& text);
/// Integers from "a:b:step" or a comma list.
std::vector<int> parse_int_range(const std::string& text);
/// Plain number, "pi", "0.06pi", "pi/4" or "0.5pi/3".
double parse_angle(const std::string& text);
/// Comma-separated angle literals.
std::vector<double> parse_angle_list(const std::string& text);

/// --workers if positive, else VECMAG_WORKERS, else the hardware concurrency.
unsigned resolve_workers(int flag);

}  // namespace vecmag::cli
