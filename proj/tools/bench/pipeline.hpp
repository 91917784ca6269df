#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "lienc/image.hpp"

namespace lienc::bench {

inline constexpr const char* kVersion = "0.1.0";

/// Plain train/test images after cropping. Test crops come from source
/// images that contributed nothing to the training crops.
struct DeskData {
  Dataset train;
  Dataset test;
};

DeskData load_desk_data(const DatasetConfig& cfg);

/// Layout of one cell's working directory.
struct CellDir {
  std::filesystem::path root;

  std::filesystem::path plain(Role r) const { return root / "plain" / role_name(r); }
  std::filesystem::path encrypted(Role r) const { return root / "encrypted" / role_name(r); }
  std::filesystem::path reconstructed() const { return root / "reconstructed" / "test"; }
  std::filesystem::path reconstructed_alt() const { return root / "reconstructed_alt" / "test"; }
  std::filesystem::path keys() const { return root / "keys.json"; }
  std::filesystem::path attack() const { return root / "attack"; }
  static const char* role_name(Role r) { return r == Role::Train ? "train" : "test"; }
};

void write_dataset_dir(const std::filesystem::path& dir, const Dataset& ds, Role role);
/// Reads every <id>.ppm in `dir`, sorted by id. Missing directory -> empty set.
Dataset read_dataset_dir(const std::filesystem::path& dir, Role role);

/// Writes plain and encrypted images plus keys.json.
void run_encrypt(const ExperimentConfig& cfg, const Cell& cell, const CellDir& dir);
/// Writes reconstructed test images and attack/meta.json (+ checkpoint, loss
/// CSV); returns the metadata.
nlohmann::json run_attack(const ExperimentConfig& cfg, const Cell& cell, const CellDir& dir);
/// Writes metrics.csv and report.json; returns the report.
nlohmann::json run_evaluate(const ExperimentConfig& cfg, const Cell& cell, const CellDir& dir);

/// All three stages for every grid cell under out_dir/cells/<name>, then the
/// Table-shaped summary (report.json, table.csv, table.md).
nlohmann::json run_report(const ExperimentConfig& cfg);

/// Deterministic JSON text (2-space indent, trailing newline).
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
std::string fnv1a64_hex(std::span<const std::uint8_t> bytes);

}  // namespace lienc::bench
