#include "gurevic/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gurevic/bip.hpp"
#include "gurevic/error.hpp"

namespace gurevic {

namespace {

struct Line {
  int number;
  std::string text;
  std::size_t offset;  // column of text start, 0-based
};

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in{std::string(s)};
  while (std::getline(in, item, sep)) {
    auto t = trim(item);
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::vector<std::string> tokens(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view text) { split_lines(text); }

  SystemConfig run();

 private:
  [[noreturn]] void fail(const Line& line, const std::string& message, std::size_t col = 0) const {
    throw ConfigError(message, line.number, static_cast<int>(line.offset + col + 1));
  }

  void split_lines(std::string_view text) {
    int number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view raw = text.substr(pos, end - pos);
      ++number;
      if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
      auto first = raw.find_first_not_of(" \t\r");
      if (first != std::string_view::npos)
        lines_.push_back(Line{number, trim(raw), first});
      if (end == text.size()) break;
      pos = end + 1;
    }
  }

  int parse_int(const Line& line, const std::string& s) const {
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
      fail(line, "expected an integer, got '" + s + "'", line.text.find(s));
    return v;
  }

  double parse_double(const Line& line, const std::string& s) const {
    try {
      std::size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      fail(line, "expected a number, got '" + s + "'", line.text.find(s));
    }
  }

  int parse_state(const Line& line, const std::string& s, int states) const {
    int v = parse_int(line, s);
    if (v < 1 || v > states)
      fail(line, "state index " + s + " out of range 1.." + std::to_string(states), line.text.find(s));
    return v - 1;
  }

  std::vector<int> parse_int_list(const Line& line, const std::string& s) const {
    std::vector<int> out;
    for (const auto& item : split(s, ',')) out.push_back(parse_int(line, item));
    return out;
  }

  Word parse_word(const Line& line, const std::string& s, int states) const {
    Word w;
    for (const auto& t : tokens(s)) w.push_back(parse_state(line, t, states));
    return w;
  }

  std::vector<Line> lines_;
};

SystemConfig Parser::run() {
  using Section = std::vector<std::pair<Line, std::pair<std::string, std::string>>>;
  std::map<std::string, Section> sections;
  std::vector<std::pair<std::string, std::string>> echo;
  std::string current;
  static const std::vector<std::string> known = {"shift", "potential", "cocycle",
                                                 "test",  "options",   "family"};
  for (const auto& line : lines_) {
    if (line.text.front() == '[') {
      if (line.text.back() != ']') fail(line, "unterminated section header");
      current = trim(line.text.substr(1, line.text.size() - 2));
      if (std::find(known.begin(), known.end(), current) == known.end())
        fail(line, "unknown section [" + current + "]", 1);
      if (sections.count(current)) fail(line, "duplicate section [" + current + "]");
      sections[current];
      continue;
    }
    if (current.empty()) fail(line, "setting outside of any section");
    auto eq = line.text.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value'");
    auto key = trim(line.text.substr(0, eq));
    auto value = trim(line.text.substr(eq + 1));
    if (key.empty()) fail(line, "missing key");
    sections[current].push_back({line, {key, value}});
    echo.emplace_back(current + "." + key, value);
  }

  // [family] alone describes a system: its truncation.
  std::optional<FamilySpec> family;
  if (auto it = sections.find("family"); it != sections.end()) {
    FamilySpec spec;
    for (const auto& [line, kv] : it->second) {
      const auto& [key, value] = kv;
      if (key == "name")
        spec.name = value;
      else if (key == "beta")
        spec.beta = parse_double(line, value);
      else if (key == "sizes" || key == "n_list")
        spec.sizes = parse_int_list(line, value);
      else
        fail(line, "unknown [family] key '" + key + "'");
    }
    if (spec.name != "zeta") throw ValidationError("unknown truncation family '" + spec.name + "'");
    if (!(spec.beta > 1.0)) throw ValidationError("zeta family needs beta > 1");
    if (spec.sizes.empty()) spec.sizes = {64, 128, 256, 512, 1024, 2048, 4096};
    family = spec;
  }

  std::optional<ShiftSystem> shift;
  std::optional<Potential> potential;
  std::optional<Cocycle> cocycle;

  if (auto it = sections.find("shift"); it != sections.end()) {
    int states = 0;
    bool full = false;
    std::optional<std::pair<Line, std::string>> edges, matrix;
    std::vector<std::string> labels;
    for (const auto& [line, kv] : it->second) {
      const auto& [key, value] = kv;
      if (key == "states") {
        states = parse_int(line, value);
        if (states < 1) fail(line, "states must be positive");
      } else if (key == "full") {
        full = value == "true" || value == "1" || value == "yes";
      } else if (key == "edges") {
        edges = {line, value};
      } else if (key == "matrix") {
        matrix = {line, value};
      } else if (key == "labels") {
        labels = split(value, ',');
      } else {
        fail(line, "unknown [shift] key '" + key + "'");
      }
    }
    std::vector<std::uint8_t> adjacency;
    if (matrix) {
      auto rows = split(matrix->second, ';');
      if (states == 0) states = static_cast<int>(rows.size());
      if (static_cast<int>(rows.size()) != states)
        throw ValidationError("transition matrix is not square: " + std::to_string(rows.size()) +
                              " rows for " + std::to_string(states) + " states");
      for (const auto& row : rows) {
        auto entries = tokens(row);
        if (static_cast<int>(entries.size()) != states)
          throw ValidationError("transition matrix is not square: row '" + row + "' has " +
                                std::to_string(entries.size()) + " entries");
        for (const auto& e : entries) {
          if (e != "0" && e != "1") fail(matrix->first, "matrix entries must be 0 or 1");
          adjacency.push_back(e == "1");
        }
      }
    } else {
      if (states == 0) throw ValidationError("[shift] needs 'states'");
      adjacency.assign(static_cast<std::size_t>(states) * states, full ? 1 : 0);
      if (edges) {
        for (const auto& item : split(edges->second, ',')) {
          auto arrow = item.find("->");
          if (arrow == std::string::npos) fail(edges->first, "edge '" + item + "' is not i->j");
          int from = parse_state(edges->first, trim(item.substr(0, arrow)), states);
          int to = parse_state(edges->first, trim(item.substr(arrow + 2)), states);
          adjacency[static_cast<std::size_t>(from) * states + to] = 1;
        }
      } else if (!full) {
        throw ValidationError("[shift] needs 'edges', 'matrix' or 'full = true'");
      }
    }
    shift.emplace(states, std::move(adjacency), std::move(labels));
    if (!shift->connected()) {
      std::vector<bool> seen(states, false);
      std::vector<int> stack{0};
      seen[0] = true;
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < states; ++v)
          if (!seen[v] && (shift->allowed(u, v) || shift->allowed(v, u))) {
            seen[v] = true;
            stack.push_back(v);
          }
      }
      int lost = static_cast<int>(std::find(seen.begin(), seen.end(), false) - seen.begin());
      throw ValidationError("disconnected system: state " + shift->labels()[lost] +
                            " is not connected to state " + shift->labels()[0]);
    }
  } else if (family) {
    auto truncated = truncate(TruncationFamily::zeta(family->beta), family->sizes.front());
    shift = truncated.shift;
    potential = truncated.potential;
    cocycle = truncated.cocycle;
  } else {
    throw ValidationError("config needs a [shift] or [family] section");
  }
  const int states = shift->size();

  if (auto it = sections.find("potential"); it != sections.end()) {
    int depth = 0;
    for (const auto& [line, kv] : it->second)
      if (kv.first == "depth") {
        depth = parse_int(line, kv.second);
        if (depth != 1 && depth != 2) fail(line, "depth must be 1 or 2");
      }
    if (depth == 0) {
      depth = 1;
      for (const auto& [line, kv] : it->second)
        if (tokens(kv.first).size() == 3) depth = 2;
    }
    std::vector<double> values(depth == 1 ? states : static_cast<std::size_t>(states) * states, 0.0);
    for (const auto& [line, kv] : it->second) {
      const auto& [key, value] = kv;
      if (key == "depth") continue;
      auto parts = tokens(key);
      if (parts.empty() || parts[0] != "phi") fail(line, "unknown [potential] key '" + key + "'");
      if (static_cast<int>(parts.size()) != depth + 1)
        fail(line, "depth-" + std::to_string(depth) + " potential line needs " +
                       std::to_string(depth) + " state index(es)");
      int i = parse_state(line, parts[1], states);
      double v = parse_double(line, value);
      if (depth == 1) {
        values[i] = v;
      } else {
        int j = parse_state(line, parts[2], states);
        if (!shift->allowed(i, j))
          throw ValidationError("potential value given for forbidden edge " + parts[1] + "->" +
                                parts[2]);
        values[static_cast<std::size_t>(i) * states + j] = v;
      }
    }
    potential = depth == 1 ? Potential::per_state(*shift, values) : Potential::per_edge(*shift, values);
  } else if (!potential) {
    potential = Potential::zero(*shift);
  }

  if (auto it = sections.find("cocycle"); it != sections.end()) {
    std::optional<Group> group;
    for (const auto& [line, kv] : it->second) {
      if (kv.first != "group") continue;
      auto parts = tokens(kv.second);
      if (parts.empty()) fail(line, "empty group name");
      auto arg = [&](std::size_t k) {
        if (parts.size() <= k) fail(line, "group '" + parts[0] + "' needs a parameter");
        return parse_int(line, parts[k]);
      };
      if (parts[0] == "zd")
        group = Group::lattice(arg(1));
      else if (parts[0] == "free")
        group = Group::free(arg(1));
      else if (parts[0] == "heisenberg")
        group = Group::heisenberg();
      else if (parts[0] == "cyclic")
        group = Group::cyclic(arg(1));
      else
        throw ValidationError("unknown group name '" + parts[0] + "'");
    }
    if (!group) throw ValidationError("[cocycle] needs 'group'");
    Cocycle c{*group, std::vector<GroupElement>(states, group->identity())};
    for (const auto& [line, kv] : it->second) {
      const auto& [key, value] = kv;
      if (key == "group") continue;
      auto parts = tokens(key);
      if (parts.size() != 2 || parts[0] != "psi") fail(line, "unknown [cocycle] key '" + key + "'");
      c.values[parse_state(line, parts[1], states)] = group->parse(value);
    }
    cocycle = c;
  } else if (!cocycle) {
    cocycle = Cocycle::trivial(states);
  }

  std::optional<TestFunction> test;
  if (auto it = sections.find("test"); it != sections.end()) {
    int depth = 0;
    std::string name = "g";
    for (const auto& [line, kv] : it->second) {
      if (kv.first == "depth") depth = parse_int(line, kv.second);
      if (kv.first == "name") name = kv.second;
    }
    if (depth == 0) {
      depth = 1;
      for (const auto& [line, kv] : it->second)
        if (tokens(kv.first).size() == 3) depth = 2;
    }
    std::vector<double> values(depth == 1 ? states : static_cast<std::size_t>(states) * states, 0.0);
    for (const auto& [line, kv] : it->second) {
      const auto& [key, value] = kv;
      if (key == "depth" || key == "name") continue;
      auto parts = tokens(key);
      if (parts.empty() || parts[0] != "g" || static_cast<int>(parts.size()) != depth + 1)
        fail(line, "unknown [test] key '" + key + "'");
      int i = parse_state(line, parts[1], states);
      double v = parse_double(line, value);
      if (depth == 1) {
        values[i] = v;
      } else {
        int j = parse_state(line, parts[2], states);
        if (!shift->allowed(i, j))
          throw ValidationError("test function value given for forbidden edge " + parts[1] + "->" +
                                parts[2]);
        values[static_cast<std::size_t>(i) * states + j] = v;
      }
    }
    test = TestFunction{name, depth == 1 ? Potential::per_state(*shift, values)
                                         : Potential::per_edge(*shift, values)};
  }

  Options options;
  if (auto it = sections.find("options"); it != sections.end()) {
    for (const auto& [line, kv] : it->second) {
      const auto& [key, value] = kv;
      if (key == "oracle_ceiling")
        options.oracle_ceiling = parse_int(line, value);
      else if (key == "tol")
        options.tol = parse_double(line, value);
      else if (key == "perron_tol")
        options.perron_tol = parse_double(line, value);
      else if (key == "budget_entries")
        options.budget_entries = static_cast<std::size_t>(parse_double(line, value));
      else if (key == "n_min")
        options.n_min = parse_int(line, value);
      else if (key == "n_max")
        options.n_max = parse_int(line, value);
      else if (key == "n_list")
        options.n_list = parse_int_list(line, value);
      else if (key == "epsilon")
        options.epsilon = parse_double(line, value);
      else if (key == "cylinder")
        options.cylinder = parse_state(line, value, states);
      else if (key == "base_point") {
        // "prefix ; period" or just "period"
        BasePoint o;
        if (auto semi = value.find(';'); semi != std::string::npos) {
          o.prefix = parse_word(line, value.substr(0, semi), states);
          o.period = parse_word(line, value.substr(semi + 1), states);
        } else {
          o.period = parse_word(line, value, states);
        }
        o.validate(*shift);
        options.base_point = o;
      } else if (key == "target")
        options.target = value;
      else if (key == "quadrature")
        options.quadrature = parse_int(line, value);
      else if (key == "seed")
        options.seed = static_cast<std::uint64_t>(parse_double(line, value));
      else
        fail(line, "unknown [options] key '" + key + "'");
    }
  }

  cocycle->validate(states);
  return SystemConfig{*shift, *potential, *cocycle, test, family, options, echo};
}

}  // namespace

SystemConfig parse_system(std::string_view text) { return Parser(text).run(); }

SystemConfig load_system(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_system(buffer.str());
}

}  // namespace gurevic
