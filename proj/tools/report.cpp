#include "report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "gurevic/error.hpp"

namespace gurevic::cli {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ordered_json num(double v) {
  if (!std::isfinite(v)) return fmt(v);
  // parse back the 12-digit text so JSON prints the same digits
  return std::stod(fmt(v));
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ordered_json Manifest::to_json() const {
  ordered_json j;
  j["subcommand"] = subcommand;
  j["config"] = config_path;
  j["config_hash"] = config_hash;
  j["version"] = version;
  ordered_json p = ordered_json::object();
  for (const auto& [k, v] : parameters) p[k] = v;
  j["parameters"] = p;
  ordered_json t = ordered_json::object();
  for (const auto& [k, v] : timings) t[k] = num(v);
  j["timings"] = t;
  return j;
}

std::vector<std::string> Manifest::lines() const {
  std::vector<std::string> out{"subcommand " + subcommand, "config " + config_path,
                               "config_hash " + config_hash, "version " + version};
  for (const auto& [k, v] : parameters) out.push_back("param " + k + " = " + v);
  for (const auto& [k, v] : timings) out.push_back("timing " + k + " " + fmt(v) + " s");
  return out;
}

Writer::Writer(std::filesystem::path dir, bool plot_data) : dir_(std::move(dir)), plot_(plot_data) {
  if (dir_.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir_.string() + ": " + ec.message());
}

namespace {

std::ofstream open(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

}  // namespace

void Writer::json(const std::string& name, const Manifest& m, ordered_json body) const {
  if (!enabled()) return;
  ordered_json doc;
  doc["manifest"] = m.to_json();
  for (auto& [k, v] : body.items()) doc[k] = v;
  auto out = open(dir_ / (name + ".json"));
  out << doc.dump(2) << '\n';
}

void Writer::csv(const std::string& name, const Manifest& m, const Table& t) const {
  if (!enabled()) return;
  auto out = open(dir_ / (name + ".csv"));
  for (const auto& line : m.lines()) out << "# " << line << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void Writer::plot(const std::string& name, const Manifest& m,
                  const std::vector<std::pair<double, double>>& xy) const {
  if (!enabled() || !plot_) return;
  auto out = open(dir_ / (name + ".dat"));
  for (const auto& line : m.lines()) out << "# " << line << '\n';
  for (const auto& [x, y] : xy)
    if (std::isfinite(y)) out << fmt(x) << ' ' << fmt(y) << '\n';
}

}  // namespace gurevic::cli
