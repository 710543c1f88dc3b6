#include "fsnc/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <set>

namespace fsnc {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.contains(key)) {
      throw FsncError(where + ": unknown key \"" + key + "\"");
    }
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return obj.at(key).get<T>();
}

}  // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FsncError("cannot read config file: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FsncError(path.string() + ": invalid JSON: " + e.what());
  }
  return parse_run_config(j, path.string());
}

RunConfig parse_run_config(const json& j, const std::string& origin) {
  reject_unknown(j, {"schema_version", "dataset", "setting", "split", "method", "protocol", "seed",
                     "out", "jobs", "save_checkpoints"},
                 origin);
  const int version = get_or<int>(j, "schema_version", kConfigSchemaVersion);
  if (version != kConfigSchemaVersion) {
    throw FsncError(origin + ": unsupported schema_version " + std::to_string(version));
  }
  for (const char* key : {"dataset", "setting", "method"}) {
    if (!j.contains(key)) throw FsncError(origin + ": missing key \"" + key + "\"");
  }

  RunConfig cfg;
  cfg.dataset = j.at("dataset").get<std::string>();
  if (!std::filesystem::exists(cfg.dataset)) {
    throw FsncError(origin + ": dataset path does not exist: " + cfg.dataset.string());
  }
  cfg.protocol.setting = setting_from_string(j.at("setting").get<std::string>());

  if (j.contains("split")) {
    const json& s = j.at("split");
    reject_unknown(s, {"sizes", "seed"}, origin + ".split");
    if (s.contains("sizes")) {
      const auto sizes = s.at("sizes").get<std::vector<int>>();
      if (sizes.size() != 3) throw FsncError(origin + ".split.sizes: expected [train, dev, test]");
      cfg.split_sizes = std::array<int, 3>{sizes[0], sizes[1], sizes[2]};
    }
    if (s.contains("seed")) cfg.split_seed = SplitSeed::parse(s.at("seed").get<std::string>());
  }

  {
    const json& m = j.at("method");
    reject_unknown(m,
                   {"id", "backbone", "hidden", "embedding", "inner_lr", "inner_steps", "probe_lr",
                    "probe_steps", "outer_lr", "weight_decay"},
                   origin + ".method");
    if (!m.contains("id")) throw FsncError(origin + ".method: missing key \"id\"");
    MethodConfig& mc = cfg.protocol.method;
    mc.id = method_from_string(m.at("id").get<std::string>());
    mc.backbone = m.contains("backbone") ? backbone_from_string(m.at("backbone").get<std::string>())
                                         : MethodConfig::default_backbone(mc.id);
    mc.hidden = get_or<int>(m, "hidden", mc.hidden);
    mc.embedding = get_or<int>(m, "embedding", mc.embedding);
    mc.inner_lr = get_or<double>(m, "inner_lr", mc.inner_lr);
    mc.inner_steps = get_or<int>(m, "inner_steps", mc.inner_steps);
    mc.probe_lr = get_or<double>(m, "probe_lr", mc.probe_lr);
    mc.probe_steps = get_or<int>(m, "probe_steps", mc.probe_steps);
    mc.outer.lr = get_or<double>(m, "outer_lr", mc.outer.lr);
    mc.outer.weight_decay = get_or<double>(m, "weight_decay", mc.outer.weight_decay);
    mc.validate();
  }

  if (j.contains("protocol")) {
    const json& p = j.at("protocol");
    reject_unknown(p,
                   {"eval_interval", "tasks_per_eval", "patience", "max_epochs", "repeats", "n_way",
                    "k_shot", "q_query"},
                   origin + ".protocol");
    ProtocolConfig& pc = cfg.protocol;
    pc.eval_interval = get_or<int>(p, "eval_interval", pc.eval_interval);
    pc.tasks_per_eval = get_or<int>(p, "tasks_per_eval", pc.tasks_per_eval);
    pc.patience = get_or<int>(p, "patience", pc.patience);
    pc.max_epochs = get_or<int>(p, "max_epochs", pc.max_epochs);
    pc.repeats = get_or<int>(p, "repeats", pc.repeats);
    pc.spec.n_way = get_or<int>(p, "n_way", pc.spec.n_way);
    pc.spec.k_shot = get_or<int>(p, "k_shot", pc.spec.k_shot);
    pc.spec.q_query = get_or<int>(p, "q_query", pc.spec.q_query);
  }

  cfg.protocol.master_seed = get_or<std::uint64_t>(j, "seed", 0);
  if (const char* env = std::getenv("FSNC_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    const auto* end = env + std::string_view(env).size();
    const auto res = std::from_chars(env, end, v);
    if (res.ec != std::errc() || res.ptr != end) {
      throw FsncError("FSNC_SEED must be an unsigned integer, got \"" + std::string(env) + "\"");
    }
    cfg.protocol.master_seed = v;
    cfg.seed_from_env = true;
  }

  cfg.protocol.jobs = get_or<int>(j, "jobs", 1);
  if (j.contains("out")) cfg.out = std::filesystem::path(j.at("out").get<std::string>());
  cfg.save_checkpoints = get_or<bool>(j, "save_checkpoints", false);
  cfg.protocol.validate();
  return cfg;
}

nlohmann::json RunConfig::echo() const {
  json j;
  j["schema_version"] = kConfigSchemaVersion;
  j["dataset"] = dataset.string();
  j["setting"] = to_string(protocol.setting);
  json split;
  if (split_sizes) split["sizes"] = {(*split_sizes)[0], (*split_sizes)[1], (*split_sizes)[2]};
  split["seed"] = split_seed.to_string();
  j["split"] = std::move(split);
  const MethodConfig& mc = protocol.method;
  j["method"] = {{"id", to_string(mc.id)},        {"backbone", to_string(mc.backbone)},
                 {"hidden", mc.hidden},           {"embedding", mc.embedding},
                 {"inner_lr", mc.inner_lr},       {"inner_steps", mc.inner_steps},
                 {"probe_lr", mc.probe_lr},       {"probe_steps", mc.probe_steps},
                 {"outer_lr", mc.outer.lr},       {"weight_decay", mc.outer.weight_decay}};
  j["protocol"] = {{"eval_interval", protocol.eval_interval},
                   {"tasks_per_eval", protocol.tasks_per_eval},
                   {"patience", protocol.patience},
                   {"max_epochs", protocol.max_epochs},
                   {"repeats", protocol.repeats},
                   {"n_way", protocol.spec.n_way},
                   {"k_shot", protocol.spec.k_shot},
                   {"q_query", protocol.spec.q_query}};
  j["seed"] = protocol.master_seed;
  j["seed_from_env"] = seed_from_env;
  if (out) j["out"] = out->string();
  j["jobs"] = protocol.jobs;
  j["save_checkpoints"] = save_checkpoints;
  return j;
}

}  // namespace fsnc
