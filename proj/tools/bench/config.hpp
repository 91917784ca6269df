#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lienc::bench {

/// Bad configuration; `where` is a field path ("attack.itn.ridge") or a
/// "line N" location for parse errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string where, const std::string& what)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

struct DatasetConfig {
  std::string source = "stl10";  // stl10 | ppm-dir
  std::filesystem::path path;
  std::size_t count = 0;  // stl10 records to read; 0 = whole file
  int image_size = 32;    // crop side; 0 keeps the source size
  std::size_t train_count = 64;
  std::size_t test_count = 50;
};

struct SchemeConfig {
  std::string kind = "pixelwise";  // pixelwise | blockwise
  std::string key_policy = "same";  // same | different (pixelwise only)

  std::string label() const;
};

struct FrConfig {
  int bits = 8;
  std::string leading_bit = "both";  // "0" | "1" | "both"
};

struct ItnConfig {
  std::string solver = "closed";  // closed | sgd
  double ridge = 1e-6;
  int epochs = 70;
  std::size_t batch_size = 128;
  double lr = 0.1;
  double momentum = 0.9;
  double weight_decay = 0.0005;
  std::vector<int> milestones{40, 60};
  double gamma = 0.1;
  int layers = 3;
  bool self_test = false;
};

struct GanCellConfig {
  int epochs = 100;
  double lr = 0.0002;
  double beta1 = 0.5;
  double beta2 = 0.999;
  std::size_t batch_size = 64;
};

struct AttackConfig {
  std::string kind = "none";  // fr | itn | gan | none
  FrConfig fr;
  ItnConfig itn;
  GanCellConfig gan;
};

struct Seeds {
  std::uint64_t cipher = 1;
  std::uint64_t split = 2;
  std::uint64_t training = 3;
};

struct Cell {
  SchemeConfig scheme;
  AttackConfig attack;

  std::string name() const;
};

struct ExperimentConfig {
  DatasetConfig dataset;
  SchemeConfig scheme;
  AttackConfig attack;
  Seeds seeds;
  std::filesystem::path out_dir = "out";
  std::vector<Cell> grid;  // report only; empty = default grid
  std::optional<double> robust_threshold;  // report only, heuristic label
};

/// Parses and validates. Relative paths resolve against `base_dir`.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& file);

/// "cipher=5", "seeds.split=9".
void apply_seed_override(ExperimentConfig& cfg, const std::string& assignment);

/// Fully populated echo of the configuration, used in reports.
nlohmann::json to_json(const ExperimentConfig& cfg);
nlohmann::json to_json(const Cell& cell);

/// Pixel-wise same/different and block-wise rows crossed with fr, itn, gan.
std::vector<Cell> default_grid();

}  // namespace lienc::bench
