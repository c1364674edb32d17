#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gurevic/group.hpp"
#include "gurevic/shift.hpp"

namespace gurevic {

struct Options {
  int oracle_ceiling = kDefaultOracleCeiling;
  double tol = 1e-10;
  double perron_tol = 1e-12;
  std::size_t budget_entries = kDefaultEntryBudget;
  int n_min = 0;
  int n_max = 0;
  std::vector<int> n_list;
  double epsilon = 0.2;
  std::optional<int> cylinder;  // 0-based
  std::optional<BasePoint> base_point;
  std::optional<std::string> target;  // group word
  int quadrature = 0;                 // 0 selects the Nyquist minimum
  std::uint64_t seed = 20240611;
};

struct TestFunction {
  std::string name;
  Potential values;
};

struct FamilySpec {
  std::string name;
  double beta = 2.0;
  std::vector<int> sizes;
};

struct SystemConfig {
  ShiftSystem shift;
  Potential potential;
  Cocycle cocycle;
  std::optional<TestFunction> test_function;
  std::optional<FamilySpec> family;
  Options options;
  // key=value echo of every setting, section-qualified, in file order.
  std::vector<std::pair<std::string, std::string>> echo;
};

// Line-oriented config: sections [shift], [potential], [cocycle], [test],
// [options], [family]; '#' comments. State indices are 1-based.
// Throws ConfigError (with line/column) or ValidationError.
SystemConfig parse_system(std::string_view text);
SystemConfig load_system(const std::filesystem::path& path);

}  // namespace gurevic
