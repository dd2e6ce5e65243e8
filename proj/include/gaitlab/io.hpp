#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "gaitlab/core.hpp"
#include "gaitlab/morphology.hpp"

namespace gaitlab {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

template <typename T>
inline T require(const json& j, const std::string& path, const std::string& key) {
  if (!j.contains(key)) throw ConfigError(path + "/" + key + ": missing required field");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path + "/" + key + ": wrong type");
  }
}

template <typename T>
inline T optional_field(const json& j, const std::string& key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace detail

/// Robot spec from JSON. Angles are degrees in files, radians internally.
/// The first invariant violation is reported with its JSON path.
inline RobotSpec robot_spec_from_json(const json& j, const std::string& path = "") {
  RobotSpec spec;
  spec.name = detail::optional_field<std::string>(j, "name", "");
  spec.n_leg_pairs = detail::require<int>(j, path, "n_leg_pairs");
  spec.n_body_joints = detail::require<int>(j, path, "n_body_joints");
  spec.link_lengths = detail::require<std::vector<double>>(j, path, "link_lengths");
  spec.link_masses = detail::optional_field<std::vector<double>>(
      j, "link_masses",
      std::vector<double>(spec.link_lengths.size(),
                          spec.link_lengths.empty() ? 1.0 : 1.0 / spec.link_lengths.size()));
  spec.leg_masses = detail::optional_field<std::vector<double>>(j, "leg_masses", {});

  const std::string mode = detail::require<std::string>(j, path, "mode");
  if (mode == "legged")
    spec.mode = MorphologyMode::legged;
  else if (mode == "sidewinder")
    spec.mode = MorphologyMode::sidewinder;
  else
    throw ConfigError(path + "/mode: must be 'legged' or 'sidewinder'");

  if (spec.mode == MorphologyMode::legged) {
    spec.leg_lengths = detail::require<std::vector<double>>(j, path, "leg_lengths");
    spec.leg_attach_offsets = detail::require<std::vector<double>>(j, path, "leg_attach_offsets");
  }

  if (!j.contains("amplitudes")) throw ConfigError(path + "/amplitudes: missing required field");
  const json& amps = j.at("amplitudes");
  spec.amplitude_theta = deg2rad(detail::require<double>(amps, path + "/amplitudes", "A_theta"));
  spec.amplitude_alpha = deg2rad(detail::require<double>(amps, path + "/amplitudes", "A_alpha"));

  if (!j.contains("friction")) throw ConfigError(path + "/friction: missing required field");
  const json& fr = j.at("friction");
  const std::string kind = detail::require<std::string>(fr, path + "/friction", "kind");
  if (kind == "isotropic_coulomb")
    spec.friction.kind = FrictionKind::isotropic_coulomb;
  else if (kind == "anisotropic_coulomb")
    spec.friction.kind = FrictionKind::anisotropic_coulomb;
  else
    throw ConfigError(path + "/friction/kind: unknown friction kind '" + kind + "'");
  spec.friction.mu = detail::optional_field<double>(fr, "mu", 1.0);
  spec.friction.anisotropy_ratio = detail::optional_field<double>(fr, "anisotropy_ratio", 2.0);
  spec.friction.epsilon_v = detail::optional_field<double>(fr, "epsilon_v", 1e-3);

  try {
    spec.normalize();
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return spec;
}

inline json robot_spec_to_json(const RobotSpec& spec) {
  json j;
  if (!spec.name.empty()) j["name"] = spec.name;
  j["n_leg_pairs"] = spec.n_leg_pairs;
  j["n_body_joints"] = spec.n_body_joints;
  j["link_lengths"] = spec.link_lengths;
  j["link_masses"] = spec.link_masses;
  if (!spec.leg_masses.empty()) j["leg_masses"] = spec.leg_masses;
  j["mode"] = spec.mode == MorphologyMode::legged ? "legged" : "sidewinder";
  if (spec.mode == MorphologyMode::legged) {
    j["leg_lengths"] = spec.leg_lengths;
    j["leg_attach_offsets"] = spec.leg_attach_offsets;
  }
  j["amplitudes"] = {{"A_theta", rad2deg(spec.amplitude_theta)},
                     {"A_alpha", rad2deg(spec.amplitude_alpha)}};
  j["friction"] = {
      {"kind", spec.friction.kind == FrictionKind::isotropic_coulomb ? "isotropic_coulomb"
                                                                     : "anisotropic_coulomb"},
      {"mu", spec.friction.mu},
      {"anisotropy_ratio", spec.friction.anisotropy_ratio},
      {"epsilon_v", spec.friction.epsilon_v}};
  return j;
}

/// Resolve a robot argument: a reference robot name or a JSON file path.
inline RobotSpec load_robot(const std::string& arg) {
  for (const char* name : {"quadruped", "hexapod", "myriapod", "sidewinder"})
    if (arg == name) return make_reference_robot(arg);
  std::ifstream in(arg);
  if (!in) throw ConfigError(arg + ": cannot open robot spec file");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(arg + ": invalid JSON: " + e.what());
  }
  return robot_spec_from_json(j, arg);
}

/// Fixed-precision number formatting shared by all emitters, so identical
/// configs produce byte-identical files.
inline std::string format_number(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

/// Minimal RFC-4180 CSV emitter: header row, quoted fields when needed.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) { row(std::move(header)); }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << escape(fields[i]);
    }
    out_ << "\r\n";
  }

  std::string str() const { return out_.str(); }

 private:
  static std::string escape(const std::string& f) {
    if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
    std::string q = "\"";
    for (char c : f) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }
  std::ostringstream out_;
};

/// Write a file atomically: temp file in the same directory, then rename.
inline void atomic_write(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
    out << contents;
  }
  fs::rename(tmp, path);
}

/// FNV-1a, used for config hashes and output checksums in run manifests.
inline std::uint64_t fnv1a(const std::string& data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::string fnv1a_hex(const std::string& data) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(data)));
  return buf;
}

}  // namespace gaitlab
