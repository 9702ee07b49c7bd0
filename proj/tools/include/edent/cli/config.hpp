#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "edent/analysis.hpp"

namespace edent::cli {

using json = nlohmann::json;

/// Parsed and validated run configuration.
///
/// The text format is key = value lines grouped under [section] headers
/// (geometry, model, sector, target, entangle, sweep); top-level keys come
/// before the first header. A file whose first non-blank character is '{'
/// is read as JSON with the same structure.
struct RunConfig {
  std::string task;  ///< solve, entangle, sector-table, histogram, profile, sweep, dos
  std::filesystem::path output_dir;
  std::filesystem::path base_dir;  ///< relative paths resolve against this

  // [geometry]
  std::string geometry_kind = "chain";  ///< chain, icosahedron, file
  int sites = 0;
  double bond_length = kDefaultBondLength;
  std::filesystem::path geometry_path;

  // [model]
  ModelSpec model;

  // [sector]; empty means half filling (electrons) and lowest 2M_S
  std::optional<int> n_electrons;
  std::optional<int> twice_ms;

  // [target]
  std::vector<TargetState> targets;
  int k = 0;  ///< 0: all states when dense, else 1
  std::string method = "auto";  ///< auto, dense, lanczos
  double tol = 1e-10;
  std::uint64_t seed = 1;
  C2Convention c2_convention = C2Convention::fermionic;
  std::filesystem::path archive;  ///< reuse stored eigenpairs instead of solving

  // [entangle]
  std::vector<int> left_sites;  ///< 0-based; empty means the half cut
  Smoothing smoothing;
  double bin_width = 0.5;
  std::optional<std::string> subspace;  ///< label of a dense symmetry subspace

  // [sweep]
  std::string sweep_kind = "ground";  ///< ground, block, excited
  std::vector<int> lengths;
  std::vector<int> blocks;

  json echo;  ///< normalized config, re-parseable by parse_config_json
};

/// Converts the key = value text format to the equivalent JSON object.
/// Values become integers, floats, booleans, comma lists or strings.
json parse_config_text(const std::string& text);

RunConfig parse_config_json(const json& j, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

Geometry build_geometry(const RunConfig& cfg);
Sector resolve_sector(const RunConfig& cfg, const Geometry& g);
/// Half cut unless left sites are given.
Bipartition resolve_cut(const RunConfig& cfg, const Geometry& g);

json model_to_json(const ModelSpec& m);
ModelSpec model_from_json(const json& j);

}  // namespace edent::cli
