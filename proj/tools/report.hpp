#pragma once

// Output plumbing for the CLI: a run manifest embedded in every artifact,
// numbers at 12 significant digits, CSV with '# ' manifest lines, JSON with
// a "manifest" key, gnuplot two-column files.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace gurevic::cli {

using nlohmann::ordered_json;

// 12 significant digits; non-finite values become "nan", "inf", "-inf".
std::string fmt(double v);
// Same rounding as a JSON value (strings for non-finite values).
ordered_json num(double v);

std::uint64_t fnv1a(const std::string& bytes);

struct Manifest {
  std::string subcommand;
  std::string config_path;
  std::string config_hash;  // FNV-1a 64 of the file bytes, hex
  std::string version;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<std::pair<std::string, double>> timings;  // seconds

  ordered_json to_json() const;
  // Lines for CSV headers, without the leading "# ". Timings come last and
  // start with "timing".
  std::vector<std::string> lines() const;
};

// Wall time of a scoped operation, appended to the manifest on destruction.
class Timer {
 public:
  Timer(Manifest& m, std::string name) : m_(m), name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}
  ~Timer() {
    m_.timings.emplace_back(name_, std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
  }
  Timer(const Timer&) = delete;
  Timer& operator=(const Timer&) = delete;

 private:
  Manifest& m_;
  std::string name_;
  std::chrono::steady_clock::time_point start_;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

class Writer {
 public:
  // Empty directory: nothing is written.
  Writer(std::filesystem::path dir, bool plot_data);

  bool enabled() const { return !dir_.empty(); }
  void json(const std::string& name, const Manifest& m, ordered_json body) const;
  void csv(const std::string& name, const Manifest& m, const Table& t) const;
  // Two columns x y, one pair per line; skipped unless --plot-data.
  void plot(const std::string& name, const Manifest& m, const std::vector<std::pair<double, double>>& xy) const;

 private:
  std::filesystem::path dir_;
  bool plot_;
};

}  // namespace gurevic::cli
