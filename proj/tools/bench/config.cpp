#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace lienc::bench {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (names.count(key) == 0) throw ConfigError(path.empty() ? key : path + "." + key, "unknown field");
  }
}

const json* child(const json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) return nullptr;
  const json& v = obj.at(key);
  if (v.is_null()) return nullptr;
  (void)path;
  return &v;
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

template <typename T>
void read(const json& obj, const char* key, const std::string& path, T& out) {
  const json* v = child(obj, key, path);
  if (v == nullptr) return;
  try {
    if constexpr (std::is_same_v<T, std::filesystem::path>) {
      out = v->get<std::string>();
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v->is_boolean()) throw ConfigError(join(path, key), "expected true or false");
      out = v->get<bool>();
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!v->is_number_unsigned()) throw ConfigError(join(path, key), "expected a non-negative integer");
      out = v->get<T>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v->is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
      out = v->get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v->is_number()) throw ConfigError(join(path, key), "expected a number");
      out = v->get<T>();
    } else {
      out = v->get<T>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(join(path, key), e.what());
  }
}

void require(bool ok, const std::string& where, const std::string& what) {
  if (!ok) throw ConfigError(where, what);
}

void expect_object(const json& v, const std::string& path) {
  require(v.is_object(), path.empty() ? "<root>" : path, "expected an object");
}

SchemeConfig parse_scheme(const json& v, const std::string& path) {
  expect_object(v, path);
  reject_unknown(v, path, {"kind", "key_policy"});
  SchemeConfig s;
  read(v, "kind", path, s.kind);
  read(v, "key_policy", path, s.key_policy);
  require(s.kind == "pixelwise" || s.kind == "blockwise", join(path, "kind"), "must be pixelwise or blockwise");
  require(s.key_policy == "same" || s.key_policy == "different", join(path, "key_policy"),
          "must be same or different");
  require(s.kind == "pixelwise" || s.key_policy == "same", join(path, "key_policy"),
          "blockwise uses one key for all images");
  return s;
}

AttackConfig parse_attack(const json& v, const std::string& path) {
  expect_object(v, path);
  reject_unknown(v, path, {"kind", "fr", "itn", "gan"});
  AttackConfig a;
  read(v, "kind", path, a.kind);
  require(a.kind == "fr" || a.kind == "itn" || a.kind == "gan" || a.kind == "none", join(path, "kind"),
          "must be fr, itn, gan or none");
  if (const json* fr = child(v, "fr", path)) {
    const std::string p = join(path, "fr");
    expect_object(*fr, p);
    reject_unknown(*fr, p, {"bits", "leading_bit"});
    read(*fr, "bits", p, a.fr.bits);
    if (fr->contains("leading_bit")) {
      const json& b = fr->at("leading_bit");
      if (b.is_number_integer()) {
        a.fr.leading_bit = std::to_string(b.get<int>());
      } else {
        read(*fr, "leading_bit", p, a.fr.leading_bit);
      }
    }
    require(a.fr.bits >= 1 && a.fr.bits <= 8, join(p, "bits"), "must be in [1, 8]");
    require(a.fr.leading_bit == "0" || a.fr.leading_bit == "1" || a.fr.leading_bit == "both",
            join(p, "leading_bit"), "must be 0, 1 or both");
  }
  if (const json* itn = child(v, "itn", path)) {
    const std::string p = join(path, "itn");
    expect_object(*itn, p);
    reject_unknown(*itn, p, {"solver", "ridge", "epochs", "batch_size", "lr", "momentum", "weight_decay",
                             "milestones", "gamma", "layers", "self_test"});
    auto& c = a.itn;
    read(*itn, "solver", p, c.solver);
    read(*itn, "ridge", p, c.ridge);
    read(*itn, "epochs", p, c.epochs);
    read(*itn, "batch_size", p, c.batch_size);
    read(*itn, "lr", p, c.lr);
    read(*itn, "momentum", p, c.momentum);
    read(*itn, "weight_decay", p, c.weight_decay);
    read(*itn, "milestones", p, c.milestones);
    read(*itn, "gamma", p, c.gamma);
    read(*itn, "layers", p, c.layers);
    read(*itn, "self_test", p, c.self_test);
    require(c.solver == "closed" || c.solver == "sgd", join(p, "solver"), "must be closed or sgd");
    require(c.ridge >= 0.0, join(p, "ridge"), "must be >= 0");
    require(c.epochs >= 0, join(p, "epochs"), "must be >= 0");
    require(c.batch_size >= 1, join(p, "batch_size"), "must be >= 1");
    require(c.lr > 0.0, join(p, "lr"), "must be > 0");
    require(c.layers >= 1, join(p, "layers"), "must be >= 1");
  }
  if (const json* gan = child(v, "gan", path)) {
    const std::string p = join(path, "gan");
    expect_object(*gan, p);
    reject_unknown(*gan, p, {"epochs", "lr", "beta1", "beta2", "batch_size"});
    auto& c = a.gan;
    read(*gan, "epochs", p, c.epochs);
    read(*gan, "lr", p, c.lr);
    read(*gan, "beta1", p, c.beta1);
    read(*gan, "beta2", p, c.beta2);
    read(*gan, "batch_size", p, c.batch_size);
    require(c.epochs >= 0, join(p, "epochs"), "must be >= 0");
    require(c.lr > 0.0, join(p, "lr"), "must be > 0");
    require(c.beta1 >= 0.0 && c.beta1 < 1.0, join(p, "beta1"), "must be in [0, 1)");
    require(c.beta2 >= 0.0 && c.beta2 < 1.0, join(p, "beta2"), "must be in [0, 1)");
    require(c.batch_size >= 1, join(p, "batch_size"), "must be >= 1");
  }
  return a;
}

json attack_json(const AttackConfig& a, bool all);

int line_of(const std::string& text, std::size_t byte) {
  int line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) line += text[i] == '\n';
  return line;
}

}  // namespace

std::string SchemeConfig::label() const { return kind == "blockwise" ? "block" : key_policy; }

std::string Cell::name() const { return scheme.kind + "_" + scheme.label() + "_" + attack.kind; }

std::vector<Cell> default_grid() {
  std::vector<Cell> cells;
  const SchemeConfig rows[] = {{"pixelwise", "same"}, {"pixelwise", "different"}, {"blockwise", "same"}};
  for (const auto& row : rows) {
    for (const char* attack : {"fr", "itn", "gan"}) {
      Cell c;
      c.scheme = row;
      c.attack.kind = attack;
      cells.push_back(c);
    }
  }
  return cells;
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("line " + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)), e.what());
  }
  expect_object(root, "");
  reject_unknown(root, "", {"dataset", "scheme", "attack", "seeds", "out_dir", "grid", "robust_threshold"});

  ExperimentConfig cfg;
  if (const json* d = child(root, "dataset", "")) {
    expect_object(*d, "dataset");
    reject_unknown(*d, "dataset", {"source", "path", "count", "image_size", "train_count", "test_count"});
    read(*d, "source", "dataset", cfg.dataset.source);
    read(*d, "path", "dataset", cfg.dataset.path);
    read(*d, "count", "dataset", cfg.dataset.count);
    read(*d, "image_size", "dataset", cfg.dataset.image_size);
    read(*d, "train_count", "dataset", cfg.dataset.train_count);
    read(*d, "test_count", "dataset", cfg.dataset.test_count);
  }
  require(cfg.dataset.source == "stl10" || cfg.dataset.source == "ppm-dir", "dataset.source",
          "must be stl10 or ppm-dir");
  require(!cfg.dataset.path.empty(), "dataset.path", "required");
  require(cfg.dataset.image_size >= 0, "dataset.image_size", "must be >= 0");
  require(cfg.dataset.test_count >= 1, "dataset.test_count", "must be >= 1");
  if (cfg.dataset.path.is_relative()) cfg.dataset.path = (base_dir / cfg.dataset.path).lexically_normal();

  if (const json* s = child(root, "scheme", "")) cfg.scheme = parse_scheme(*s, "scheme");
  if (const json* a = child(root, "attack", "")) cfg.attack = parse_attack(*a, "attack");
  if (const json* s = child(root, "seeds", "")) {
    expect_object(*s, "seeds");
    reject_unknown(*s, "seeds", {"cipher", "split", "training"});
    read(*s, "cipher", "seeds", cfg.seeds.cipher);
    read(*s, "split", "seeds", cfg.seeds.split);
    read(*s, "training", "seeds", cfg.seeds.training);
  }
  read(root, "out_dir", "", cfg.out_dir);
  if (cfg.out_dir.is_relative()) cfg.out_dir = (base_dir / cfg.out_dir).lexically_normal();
  if (const json* r = child(root, "robust_threshold", "")) {
    require(r->is_number(), "robust_threshold", "expected a number");
    cfg.robust_threshold = r->get<double>();
  }
  if (const json* g = child(root, "grid", "")) {
    require(g->is_array() && !g->empty(), "grid", "expected a non-empty array of cells");
    for (std::size_t i = 0; i < g->size(); ++i) {
      const std::string p = "grid[" + std::to_string(i) + "]";
      const json& c = g->at(i);
      expect_object(c, p);
      reject_unknown(c, p, {"scheme", "attack"});
      Cell cell;
      cell.scheme = parse_scheme(c.value("scheme", json::object()), p + ".scheme");
      // Attack settings not given per cell inherit the top-level ones.
      json merged = attack_json(cfg.attack, true);
      if (c.contains("attack")) merged.merge_patch(c.at("attack"));
      cell.attack = parse_attack(merged, p + ".attack");
      cfg.grid.push_back(cell);
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError(file.string(), "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file.parent_path());
}

void apply_seed_override(ExperimentConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("--seed-override", "expected key=value, got '" + assignment + "'");
  std::string key = assignment.substr(0, eq);
  if (key.rfind("seeds.", 0) == 0) key = key.substr(6);
  const std::string value = assignment.substr(eq + 1);
  std::uint64_t v = 0;
  try {
    std::size_t used = 0;
    v = std::stoull(value, &used, 0);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw ConfigError("--seed-override " + key, "not an unsigned integer: '" + value + "'");
  }
  if (key == "cipher") {
    cfg.seeds.cipher = v;
  } else if (key == "split") {
    cfg.seeds.split = v;
  } else if (key == "training") {
    cfg.seeds.training = v;
  } else {
    throw ConfigError("--seed-override", "unknown seed '" + key + "' (cipher, split, training)");
  }
}

namespace {

json attack_json(const AttackConfig& a, bool all) {
  json attack = {{"kind", a.kind}};
  if (all || a.kind == "fr") attack["fr"] = {{"bits", a.fr.bits}, {"leading_bit", a.fr.leading_bit}};
  if (all || a.kind == "itn") {
    attack["itn"] = {{"solver", a.itn.solver},
                     {"ridge", a.itn.ridge},
                     {"epochs", a.itn.epochs},
                     {"batch_size", a.itn.batch_size},
                     {"lr", a.itn.lr},
                     {"momentum", a.itn.momentum},
                     {"weight_decay", a.itn.weight_decay},
                     {"milestones", a.itn.milestones},
                     {"gamma", a.itn.gamma},
                     {"layers", a.itn.layers},
                     {"self_test", a.itn.self_test}};
  }
  if (all || a.kind == "gan") {
    attack["gan"] = {{"epochs", a.gan.epochs}, {"lr", a.gan.lr}, {"beta1", a.gan.beta1},
                     {"beta2", a.gan.beta2},   {"batch_size", a.gan.batch_size}};
  }
  return attack;
}

}  // namespace

nlohmann::json to_json(const Cell& cell) {
  return {{"scheme", {{"kind", cell.scheme.kind}, {"key_policy", cell.scheme.key_policy}}},
          {"attack", attack_json(cell.attack, false)}};
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
  const Cell top{cfg.scheme, cfg.attack};
  json j = to_json(top);
  j["dataset"] = {{"source", cfg.dataset.source},          {"path", cfg.dataset.path.generic_string()},
                  {"count", cfg.dataset.count},            {"image_size", cfg.dataset.image_size},
                  {"train_count", cfg.dataset.train_count}, {"test_count", cfg.dataset.test_count}};
  j["seeds"] = {{"cipher", cfg.seeds.cipher}, {"split", cfg.seeds.split}, {"training", cfg.seeds.training}};
  j["out_dir"] = cfg.out_dir.generic_string();
  if (!cfg.grid.empty()) {
    j["grid"] = json::array();
    for (const auto& c : cfg.grid) j["grid"].push_back(to_json(c));
  }
  if (cfg.robust_threshold) j["robust_threshold"] = *cfg.robust_threshold;
  return j;
}

}  // namespace lienc::bench
