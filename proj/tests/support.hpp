#pragma once

#include <filesystem>
#include <string>

#include "gurevic/config.hpp"
#include "gurevic/skewprod.hpp"

#ifndef GUREVIC_CONFIG_DIR
#define GUREVIC_CONFIG_DIR "configs"
#endif

namespace gurevic::testing {

inline std::filesystem::path config_path(const std::string& name) {
  return std::filesystem::path(GUREVIC_CONFIG_DIR) / name;
}

inline SystemConfig load_config(const std::string& name) { return load_system(config_path(name)); }

inline SkewSystem load_skew(const std::string& name) {
  auto c = load_config(name);
  return SkewSystem(c.shift, c.potential, c.cocycle);
}

inline SkewSystem make_skew(const ShiftSystem& shift, const Potential& phi, const Cocycle& psi) {
  return SkewSystem(shift, phi, psi);
}

inline Cocycle z1(std::initializer_list<std::int64_t> values) {
  Cocycle c{Group::lattice(1), {}};
  for (auto v : values) c.values.push_back(LatticeElement{{v}});
  return c;
}

}  // namespace gurevic::testing
