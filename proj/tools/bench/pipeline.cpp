#include "pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "lienc/blockwise.hpp"
#include "lienc/error.hpp"
#include "lienc/fr_attack.hpp"
#include "lienc/gan_attack.hpp"
#include "lienc/itn_attack.hpp"
#include "lienc/keystream.hpp"
#include "lienc/metrics.hpp"
#include "lienc/nn/checkpoint.hpp"
#include "lienc/pixelwise.hpp"

namespace lienc::bench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string image_name(std::size_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%06zu.ppm", id);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return json::parse(in);
}

/// Shortest round-trip text for a double.
std::string num(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

PixelwiseKey same_pixel_key(std::uint64_t seed) {
  KeyStream ks(seed);
  PixelwiseKey k;
  k.seed_r = ks.next_u64();
  k.seed_g = ks.next_u64();
  k.seed_b = ks.next_u64();
  k.seed_cs = ks.next_u64();
  return k;
}

BlockwiseKey block_key(std::uint64_t seed) {
  KeyStream ks(seed);
  BlockwiseKey k;
  k.seed_inv = ks.next_u64();
  k.seed_shf = ks.next_u64();
  return k;
}

KeyPolicy pixel_policy(const Cell& cell, const Seeds& seeds) {
  if (cell.scheme.key_policy == "different") return KeyPolicy(DifferentKeys{seeds.cipher});
  return KeyPolicy(SameKey{same_pixel_key(seeds.cipher)});
}

json pixel_key_json(const PixelwiseKey& k) {
  return {{"seed_r", k.seed_r}, {"seed_g", k.seed_g}, {"seed_b", k.seed_b}, {"seed_cs", k.seed_cs}};
}

Image encrypt_one(const Cell& cell, const Seeds& seeds, const Image& img, std::size_t id) {
  if (cell.scheme.kind == "blockwise") return encrypt_blockwise(img, block_key(seeds.cipher));
  return encrypt_pixelwise(img, pixel_policy(cell, seeds).key_for(id));
}

Image decrypt_one(const Cell& cell, const Seeds& seeds, const Image& img, std::size_t id) {
  if (cell.scheme.kind == "blockwise") return decrypt_blockwise(img, block_key(seeds.cipher));
  return decrypt_pixelwise(img, pixel_policy(cell, seeds).key_for(id));
}

std::vector<Image> sources_for(const DatasetConfig& cfg) {
  if (cfg.source == "stl10") {
    const auto bytes = read_file_bytes(cfg.path);
    const std::size_t n = cfg.count == 0 ? bytes.size() / kStl10RecordBytes : cfg.count;
    return load_stl10(bytes, n);
  }
  if (!fs::is_directory(cfg.path)) throw Error(ErrorCode::Io, "not a directory: " + cfg.path.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(cfg.path)) {
    if (e.is_regular_file() && e.path().extension() == ".ppm") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Image> out;
  for (const auto& f : files) out.push_back(read_ppm_file(f));
  return out;
}

void dump_image_set(const fs::path& dir, const Dataset& ds) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (std::size_t i = 0; i < ds.size(); ++i) write_ppm_file(dir / image_name(ds.ids[i]), ds.images[i]);
}

struct Stopwatch {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

void record_timing(const CellDir& dir, const char* stage, double seconds) {
  const fs::path path = dir.root / "timing.json";
  json t = fs::exists(path) ? read_json(path) : json::object();
  t[stage] = seconds;
  write_json(path, t);
}

}  // namespace

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string fnv1a64_hex(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

DeskData load_desk_data(const DatasetConfig& cfg) {
  const auto sources = sources_for(cfg);
  if (sources.empty()) throw Error(ErrorCode::EmptyDataset, "no source images in " + cfg.path.string());
  const int sw = sources.front().width();
  const int sh = sources.front().height();
  const int side_w = cfg.image_size == 0 ? sw : cfg.image_size;
  const int side_h = cfg.image_size == 0 ? sh : cfg.image_size;
  if (side_w > sw || side_h > sh) {
    throw Error(ErrorCode::DimensionMismatch, "image_size " + std::to_string(cfg.image_size) +
                                                  " exceeds source size " + std::to_string(sw) + "x" +
                                                  std::to_string(sh));
  }
  const int per_row = sw / side_w;
  const int per_col = sh / side_h;

  DeskData data;
  std::size_t source = 0;
  std::size_t next_id = 0;
  auto fill = [&](Dataset& ds, std::size_t count, Role role) {
    while (ds.size() < count) {
      if (source >= sources.size()) {
        throw Error(ErrorCode::EmptyDataset, "dataset too small for " + std::to_string(cfg.train_count) +
                                                 " train + " + std::to_string(cfg.test_count) + " test crops");
      }
      const Image& img = sources[source];
      for (int k = 0; k < per_row * per_col && ds.size() < count; ++k) {
        ds.add(crop(img, (k % per_row) * side_w, (k / per_row) * side_h, side_w, side_h), role, next_id++);
      }
      ++source;
    }
  };
  fill(data.train, cfg.train_count, Role::Train);
  fill(data.test, cfg.test_count, Role::Test);
  return data;
}

void write_dataset_dir(const fs::path& dir, const Dataset& ds, Role) { dump_image_set(dir, ds); }

Dataset read_dataset_dir(const fs::path& dir, Role role) {
  Dataset ds;
  if (!fs::is_directory(dir)) return ds;
  std::vector<std::pair<std::size_t, fs::path>> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".ppm") continue;
    files.emplace_back(std::stoull(e.path().stem().string()), e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& [id, path] : files) ds.add(read_ppm_file(path), role, id);
  return ds;
}

void run_encrypt(const ExperimentConfig& cfg, const Cell& cell, const CellDir& dir) {
  const Stopwatch sw;
  const DeskData data = load_desk_data(cfg.dataset);
  json keys = {{"scheme", cell.scheme.kind}, {"key_policy", cell.scheme.key_policy}, {"cipher_seed", cfg.seeds.cipher}};
  if (cell.scheme.kind == "blockwise") {
    const auto k = block_key(cfg.seeds.cipher);
    keys["key"] = {{"seed_inv", k.seed_inv}, {"seed_shf", k.seed_shf}};
  } else if (cell.scheme.key_policy == "same") {
    keys["key"] = pixel_key_json(same_pixel_key(cfg.seeds.cipher));
  } else {
    const KeyPolicy policy = pixel_policy(cell, cfg.seeds);
    keys["keys"] = json::array();
    for (const Dataset* ds : {&data.train, &data.test}) {
      for (std::size_t id : ds->ids) {
        json k = pixel_key_json(policy.key_for(id));
        k["image_id"] = id;
        keys["keys"].push_back(k);
      }
    }
  }
  for (Role role : {Role::Train, Role::Test}) {
    const Dataset& plain = role == Role::Train ? data.train : data.test;
    Dataset enc;
    for (std::size_t i = 0; i < plain.size(); ++i) {
      enc.add(encrypt_one(cell, cfg.seeds, plain.images[i], plain.ids[i]), role, plain.ids[i]);
    }
    write_dataset_dir(dir.plain(role), plain, role);
    write_dataset_dir(dir.encrypted(role), enc, role);
  }
  write_json(dir.keys(), keys);
  record_timing(dir, "encrypt_seconds", sw.seconds());
}

json run_attack(const ExperimentConfig& cfg, const Cell& cell, const CellDir& dir) {
  const Stopwatch sw;
  const Dataset enc_test = read_dataset_dir(dir.encrypted(Role::Test), Role::Test);
  if (enc_test.empty()) throw Error(ErrorCode::MissingPairs, "no encrypted test images; run encrypt first");
  const auto& a = cell.attack;
  fs::remove_all(dir.reconstructed().parent_path());
  fs::remove_all(dir.reconstructed_alt().parent_path());
  fs::remove_all(dir.attack());
  fs::create_directories(dir.attack());

  json meta = {{"attack", a.kind}, {"cell", cell.name()}};
  Dataset rec;
  Dataset rec_alt;

  if (a.kind == "none") {
    rec = enc_test;
    meta["note"] = "ciphertext baseline: reconstruction is the ciphertext itself";
  } else if (a.kind == "fr") {
    const bool both = a.fr.leading_bit == "both";
    const int b = both ? 1 : std::stoi(a.fr.leading_bit);
    for (std::size_t i = 0; i < enc_test.size(); ++i) {
      rec.add(fr_attack(enc_test.images[i], {a.fr.bits, b}), Role::Test, enc_test.ids[i]);
      if (both) rec_alt.add(fr_attack(enc_test.images[i], {a.fr.bits, 0}), Role::Test, enc_test.ids[i]);
    }
    meta["fr"] = {{"bits", a.fr.bits}, {"leading_bit", a.fr.leading_bit}};
    if (both) meta["note"] = "best-of-b: evaluation keeps, per image, the leading-bit variant with higher SSIM";
  } else if (a.kind == "itn") {
    const Dataset enc_train = read_dataset_dir(dir.encrypted(Role::Train), Role::Train);
    const Dataset plain_train = read_dataset_dir(dir.plain(Role::Train), Role::Train);
    if (plain_train.empty() || plain_train.ids != enc_train.ids) {
      throw Error(ErrorCode::MissingPairs, "ITN needs exact plaintext/ciphertext training pairs");
    }
    PairedSet pairs;
    for (std::size_t i = 0; i < enc_train.size(); ++i) pairs.add(enc_train.images[i], plain_train.images[i]);
    std::vector<std::uint8_t> ckpt;
    if (cell.scheme.kind == "blockwise") {
      const auto model = fit_itn_blockwise_nibble(pairs, a.itn.ridge);
      rec.images = apply_itn(model, enc_test.images);
      ckpt = nn::save_checkpoint(to_network(model), nn::Codec::NibbleBlock);
      meta["itn"] = {{"model", "nibble-affine 96x96, pooled over all blocks"}, {"ridge", a.itn.ridge}};
    } else if (a.itn.solver == "closed") {
      const auto model = fit_itn_pixelwise_closed(pairs, a.itn.ridge);
      rec.images = apply_itn(model, enc_test.images);
      ckpt = nn::save_checkpoint(to_network(model));
      meta["itn"] = {{"model", "per-pixel affine, closed form"},
                     {"ridge", a.itn.ridge},
                     {"singular_pixels", model.singular_pixels.size()}};
    } else {
      nn::SgdSpec spec{a.itn.lr, a.itn.momentum, a.itn.weight_decay, {}};
      for (int m : a.itn.milestones) spec.schedule.emplace_back(m, a.itn.gamma);
      const auto res = fit_itn_pixelwise_sgd(pairs, spec, {a.itn.epochs, a.itn.batch_size, cfg.seeds.training,
                                                           a.itn.layers, 3});
      rec.images = apply_itn(res.model, enc_test.images);
      ckpt = nn::save_checkpoint(res.net);
      std::string csv = "epoch,loss\n";
      for (std::size_t e = 0; e < res.epoch_loss.size(); ++e) csv += std::to_string(e) + "," + num(res.epoch_loss[e]) + "\n";
      write_text(dir.attack() / "loss.csv", csv);
      meta["itn"] = {{"model", "stack of 1x1 locally-connected layers, SGD"},
                     {"layers", a.itn.layers},
                     {"final_loss", res.epoch_loss.empty() ? 0.0 : res.epoch_loss.back()}};
    }
    rec.ids = enc_test.ids;
    rec.roles = enc_test.roles;
    write_text(dir.attack() / "model.lien", std::string(ckpt.begin(), ckpt.end()));
    meta["model_checksum"] = fnv1a64_hex(ckpt);
    meta["train_pairs"] = pairs.size();
    if (a.itn.self_test) {
      std::size_t exact = 0;
      for (std::size_t i = 0; i < enc_test.size(); ++i) {
        exact += rec.images[i] == decrypt_one(cell, cfg.seeds, enc_test.images[i], enc_test.ids[i]);
      }
      meta["self_test"] = {{"oracle", "decrypt with the known key"},
                           {"checked", enc_test.size()},
                           {"exact", exact},
                           {"passed", exact == enc_test.size()}};
    }
  } else if (a.kind == "gan") {
    const Dataset enc_train = read_dataset_dir(dir.encrypted(Role::Train), Role::Train);
    const Dataset plain_train = read_dataset_dir(dir.plain(Role::Train), Role::Train);
    if (plain_train.size() < 2) throw Error(ErrorCode::EmptyDataset, "GAN needs at least 2 training images");
    const auto [t1, t2] = split_halves(plain_train, cfg.seeds.split);
    const std::set<std::size_t> t1_ids(t1.ids.begin(), t1.ids.end());
    Dataset enc_t1;
    for (std::size_t i = 0; i < enc_train.size(); ++i) {
      if (t1_ids.count(enc_train.ids[i])) enc_t1.add(enc_train.images[i], Role::Train, enc_train.ids[i]);
    }
    GanConfig g;
    g.epochs = a.gan.epochs;
    g.lr = a.gan.lr;
    g.beta1 = a.gan.beta1;
    g.beta2 = a.gan.beta2;
    g.batch_size = std::min({a.gan.batch_size, enc_t1.size(), t2.size()});
    g.seed = cfg.seeds.training;
    const auto model = train_gan_attack(enc_t1, t2, g);
    rec = gan_reconstruct(model, enc_test);
    const auto ckpt = nn::save_checkpoint(model.generator);
    write_text(dir.attack() / "model.lien", std::string(ckpt.begin(), ckpt.end()));
    std::string csv = "epoch,d_loss,g_loss,d_real_mean,d_fake_mean\n";
    for (const auto& c : model.curves) {
      csv += std::to_string(c.epoch) + "," + num(c.d_loss) + "," + num(c.g_loss) + "," + num(c.d_real_mean) + "," +
             num(c.d_fake_mean) + "\n";
    }
    write_text(dir.attack() / "loss.csv", csv);
    meta["model_checksum"] = fnv1a64_hex(ckpt);
    meta["gan"] = {{"generator", "LocallyConnected1x1 3->3, Tanh; N(0, 0.02) init"},
                   {"discriminator", "Conv 3->8 k4 s2, LReLU 0.2, Conv 8->16 k4 s2, LReLU 0.2, Dense, Sigmoid"},
                   {"loss", "BCE, non-saturating generator loss, 1:1 updates"},
                   {"t1", enc_t1.size()},
                   {"t2", t2.size()},
                   {"batch_size_requested", a.gan.batch_size},
                   {"batch_size_effective", g.batch_size}};
  }

  dump_image_set(dir.reconstructed(), rec);
  if (!rec_alt.empty()) dump_image_set(dir.reconstructed_alt(), rec_alt);
  write_json(dir.attack() / "meta.json", meta);
  record_timing(dir, "attack_seconds", sw.seconds());
  return meta;
}

json run_evaluate(const ExperimentConfig& cfg, const Cell& cell, const CellDir& dir) {
  const Stopwatch sw;
  const Dataset plain = read_dataset_dir(dir.plain(Role::Test), Role::Test);
  const Dataset rec = read_dataset_dir(dir.reconstructed(), Role::Test);
  const Dataset alt = read_dataset_dir(dir.reconstructed_alt(), Role::Test);
  if (plain.empty() || rec.empty()) throw Error(ErrorCode::MissingPairs, "nothing to evaluate; run attack first");
  if (plain.ids != rec.ids || (!alt.empty() && alt.ids != rec.ids)) {
    throw Error(ErrorCode::DimensionMismatch, "reconstructed and reference sets hold different images");
  }

  std::vector<double> ssims, mses;
  json rows = json::array();
  std::string csv = "scheme,key_policy,attack,image_id,ssim,mse\n";
  const std::string prefix = cell.scheme.kind + "," + cell.scheme.key_policy + "," + cell.attack.kind + ",";
  for (std::size_t i = 0; i < plain.size(); ++i) {
    if (!plain.images[i].same_shape(rec.images[i])) throw Error(ErrorCode::DimensionMismatch, "image size differs");
    double s = ssim(rec.images[i], plain.images[i]);
    double m = mse(rec.images[i], plain.images[i]);
    int variant = 1;
    if (!alt.empty()) {
      const double s0 = ssim(alt.images[i], plain.images[i]);
      if (s0 > s) {
        s = s0;
        m = mse(alt.images[i], plain.images[i]);
        variant = 0;
      }
    }
    ssims.push_back(s);
    mses.push_back(m);
    json row = {{"image_id", plain.ids[i]}, {"ssim", s}, {"mse", m}};
    if (!alt.empty()) row["leading_bit"] = variant;
    rows.push_back(row);
    csv += prefix + std::to_string(plain.ids[i]) + "," + num(s) + "," + num(m) + "\n";
  }
  const double mean_s = mean_of(ssims);
  const double mean_m = mean_of(mses);
  csv += prefix + "AGG," + num(mean_s) + "," + num(mean_m) + "\n";
  write_text(dir.root / "metrics.csv", csv);

  json report = {{"version", kVersion},
                 {"config", to_json(cfg)},
                 {"cell", to_json(cell)},
                 {"test_images", plain.size()},
                 {"rows", rows},
                 {"aggregate", {{"ssim", mean_s}, {"mse", mean_m}}}};
  const fs::path meta = dir.attack() / "meta.json";
  if (fs::exists(meta)) report["attack_meta"] = read_json(meta);
  write_json(dir.root / "report.json", report);
  record_timing(dir, "evaluate_seconds", sw.seconds());
  return report;
}

json run_report(const ExperimentConfig& cfg) {
  const auto cells = cfg.grid.empty() ? default_grid() : cfg.grid;
  json out_cells = json::array();
  json timing = json::object();
  std::map<std::string, std::map<std::string, double>> table;  // row label -> attack -> ssim
  std::vector<std::string> row_order;
  std::vector<std::string> col_order;
  for (const auto& cell : cells) {
    const CellDir dir{cfg.out_dir / "cells" / cell.name()};
    fs::remove_all(dir.root);
    const Stopwatch sw;
    run_encrypt(cfg, cell, dir);
    run_attack(cfg, cell, dir);
    const json rep = run_evaluate(cfg, cell, dir);
    timing[cell.name()] = sw.seconds();
    const double s = rep["aggregate"]["ssim"].get<double>();
    json c = {{"name", cell.name()},
              {"scheme", cell.scheme.kind},
              {"key_policy", cell.scheme.key_policy},
              {"attack", cell.attack.kind},
              {"mean_ssim", s},
              {"mean_mse", rep["aggregate"]["mse"]},
              {"test_images", rep["test_images"]}};
    if (rep.contains("attack_meta") && rep["attack_meta"].contains("model_checksum")) {
      c["model_checksum"] = rep["attack_meta"]["model_checksum"];
    }
    if (cfg.robust_threshold) c["robust_heuristic"] = s < *cfg.robust_threshold;
    out_cells.push_back(c);
    const std::string row = cell.scheme.kind + " (" + cell.scheme.label() + ")";
    if (std::find(row_order.begin(), row_order.end(), row) == row_order.end()) row_order.push_back(row);
    if (std::find(col_order.begin(), col_order.end(), cell.attack.kind) == col_order.end()) {
      col_order.push_back(cell.attack.kind);
    }
    table[row][cell.attack.kind] = s;
  }

  std::string csv = "scheme";
  std::string md = "| scheme |";
  for (const auto& col : col_order) {
    csv += "," + col;
    md += " " + col + " |";
  }
  csv += "\n";
  md += "\n|---|";
  for (std::size_t i = 0; i < col_order.size(); ++i) md += "---|";
  md += "\n";
  for (const auto& row : row_order) {
    csv += row;
    md += "| " + row + " |";
    for (const auto& col : col_order) {
      const auto it = table[row].find(col);
      char buf[32] = "";
      if (it != table[row].end()) std::snprintf(buf, sizeof buf, "%.4f", it->second);
      csv += std::string(",") + (it == table[row].end() ? "" : num(it->second));
      md += std::string(" ") + buf + " |";
    }
    csv += "\n";
    md += "\n";
  }

  json report = {{"version", kVersion},
                 {"config", to_json(cfg)},
                 {"metric", "mean SSIM over held-out test images"},
                 {"cells", out_cells}};
  if (cfg.robust_threshold) {
    report["robust_heuristic_note"] =
        "robust_heuristic = mean_ssim < threshold; a user-chosen heuristic, not a derived security label";
  }
  write_json(cfg.out_dir / "report.json", report);
  write_text(cfg.out_dir / "table.csv", csv);
  write_text(cfg.out_dir / "table.md", md);
  write_json(cfg.out_dir / "timing.json", timing);
  return report;
}

}  // namespace lienc::bench
