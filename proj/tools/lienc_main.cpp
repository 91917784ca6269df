// lienc: encrypt / attack / evaluate / keyspace / report.
//
// Exit codes: 0 ok, 1 configuration error, 2 data error, 3 numerical divergence.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bench/config.hpp"
#include "bench/pipeline.hpp"
#include "lienc/error.hpp"
#include "lienc/keyspace.hpp"

namespace {

using namespace lienc;
using namespace lienc::bench;

enum Exit { kOk = 0, kConfig = 1, kData = 2, kDivergence = 3 };

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Config:
    case ErrorCode::MissingN:
    case ErrorCode::InvalidParams:
      return kConfig;
    case ErrorCode::NumericalDivergence:
      return kDivergence;
    default:
      return kData;
  }
}

int keyspace_command(const std::optional<std::string>& scheme, const std::optional<std::uint64_t>& n) {
  const std::string s = scheme.value_or("blockwise");
  const auto cross = keyspace_crossover();
  if (s == "blockwise") {
    const auto ks = keyspace_blockwise();
    std::cout << "scheme: blockwise (4x4 blocks, 96 nibble positions)\n"
              << "exact: " << ks.exact_decimal() << "\n";
    std::printf("log2: %.6f\n", ks.log2_bits);
  } else if (s == "pixelwise") {
    if (!n) throw Error(ErrorCode::MissingN, "pixelwise key space needs --n <pixels>");
    const auto ks = keyspace_pixelwise(*n);
    std::cout << "scheme: pixelwise (n = " << *n << " pixels)\n"
              << "exact: " << ks.exact_decimal() << "\n";
    std::printf("log2: %.6f\n", ks.log2_bits);
  } else {
    throw Error(ErrorCode::Config, "unknown scheme '" + s + "' (blockwise, pixelwise)");
  }
  std::printf("crossover: pixelwise exceeds blockwise at n = %.4f (smallest integer n = %llu)\n", cross.real_n,
              static_cast<unsigned long long>(cross.smallest_int));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perceptual image encryption attack harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::vector<std::string> seed_overrides;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "JSON experiment config");
    if (config_required) opt->required();
    sub->add_option("--out", out_override, "Output directory (overrides out_dir)");
    sub->add_option("--seed-override", seed_overrides, "Seed assignment key=value (cipher, split, training)");
  };

  auto* encrypt = app.add_subcommand("encrypt", "Encrypt the desk dataset and record keys");
  auto* attack = app.add_subcommand("attack", "Run the configured attack on encrypted test images");
  auto* evaluate = app.add_subcommand("evaluate", "Score reconstructions against plaintexts");
  auto* report = app.add_subcommand("report", "Run every grid cell end to end and tabulate mean SSIM");
  auto* keyspace = app.add_subcommand("keyspace", "Print exact and log2 key-space sizes");
  for (auto* sub : {encrypt, attack, evaluate, report}) add_common(sub, true);
  add_common(keyspace, false);
  std::optional<std::string> ks_scheme;
  std::optional<std::uint64_t> ks_n;
  keyspace->add_option("--scheme", ks_scheme, "blockwise | pixelwise");
  keyspace->add_option("--n", ks_n, "Pixel count for the pixelwise scheme");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (keyspace->parsed()) {
      if (!config_path.empty()) {
        const auto cfg = load_config(config_path);
        if (!ks_scheme) ks_scheme = cfg.scheme.kind;
      }
      return keyspace_command(ks_scheme, ks_n);
    }

    ExperimentConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    for (const auto& s : seed_overrides) apply_seed_override(cfg, s);

    if (report->parsed()) {
      const auto rep = run_report(cfg);
      for (const auto& c : rep["cells"]) {
        std::printf("%-36s mean SSIM %.4f\n", c["name"].get<std::string>().c_str(), c["mean_ssim"].get<double>());
      }
      std::cout << "report: " << (cfg.out_dir / "report.json").string() << "\n";
      return kOk;
    }
    const Cell cell{cfg.scheme, cfg.attack};
    const CellDir dir{cfg.out_dir};
    if (encrypt->parsed()) {
      run_encrypt(cfg, cell, dir);
      std::cout << "encrypted: " << dir.encrypted(Role::Test).string() << "\n";
    } else if (attack->parsed()) {
      const auto meta = run_attack(cfg, cell, dir);
      std::cout << "reconstructed: " << dir.reconstructed().string() << "\n";
      if (meta.contains("self_test")) {
        const auto& st = meta["self_test"];
        std::cout << "self-test: " << st["exact"].get<std::size_t>() << "/" << st["checked"].get<std::size_t>()
                  << " exact vs known-key decryption\n";
        if (!st["passed"].get<bool>()) return kData;
      }
    } else if (evaluate->parsed()) {
      const auto rep = run_evaluate(cfg, cell, dir);
      std::printf("%s mean SSIM %.4f  mean MSE %.2f over %zu images\n", cell.name().c_str(),
                  rep["aggregate"]["ssim"].get<double>(), rep["aggregate"]["mse"].get<double>(),
                  rep["test_images"].get<std::size_t>());
    }
    return kOk;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kData;
  }
}
