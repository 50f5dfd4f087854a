#pragma once

// The ten acceptance criteria, shared by `vecmag validate` and the acceptance test binary.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace vecmag::acceptance {

struct Options {
  std::uint64_t seed = 1;
  unsigned workers = 1;
  /// Names, ids or tags; empty runs everything.
  std::vector<std::string> only;
};

struct Result {
  int id = 0;
  std::string name;
  std::vector<std::string> tags;
  bool passed = false;
  std::string detail;
  nlohmann::json metrics = nlohmann::json::object();
};

struct Criterion {
  int id;
  std::string name;
  std::vector<std::string> tags;
  std::function<Result(const Options&)> run;

  bool selected_by(const std::vector<std::string>& filters) const;
};

const std::vector<Criterion>& criteria();

std::vector<Result> run(const Options& options);

nlohmann::json to_json(const std::vector<Result>& results, const Options& options);

/// One line per criterion: "PASS  3 qfi-oracle: ...".
std::string to_text(const std::vector<Result>& results);

}  // namespace vecmag::acceptance
