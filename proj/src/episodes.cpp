#include "fsnc/episodes.hpp"

#include <fstream>

#include <json.hpp>

namespace fsnc {

void EpisodeSpec::validate() const {
  if (n_way < 2) throw FsncError("episode spec: n_way must be >= 2");
  if (k_shot < 1) throw FsncError("episode spec: k_shot must be >= 1");
  if (q_query < 1) throw FsncError("episode spec: q_query must be >= 1");
}

Episode sample_episode(const SplitView& view, const EpisodeSpec& spec, RngStream& rng) {
  spec.validate();
  const int per_class = spec.k_shot + spec.q_query;

  std::vector<int> eligible;
  for (int c : view.class_ids) {
    if (static_cast<int>(view.nodes_by_class.at(c).size()) >= per_class) eligible.push_back(c);
  }
  if (static_cast<int>(eligible.size()) < spec.n_way) {
    throw FsncError("insufficient classes: " + std::to_string(eligible.size()) + " classes have >= " +
                    std::to_string(per_class) + " nodes in the " + to_string(view.partition) +
                    " view, need " + std::to_string(spec.n_way));
  }

  Episode ep;
  const std::vector<int> chosen =
      rng.sample_without_replacement(static_cast<int>(eligible.size()), spec.n_way);
  for (int label = 0; label < spec.n_way; ++label) {
    const int cls = eligible[static_cast<std::size_t>(chosen[static_cast<std::size_t>(label)])];
    ep.class_map.push_back(cls);
    const auto& bucket = view.nodes_by_class.at(cls);
    const std::vector<int> picks =
        rng.sample_without_replacement(static_cast<int>(bucket.size()), per_class);
    for (int i = 0; i < per_class; ++i) {
      const int node = bucket[static_cast<std::size_t>(picks[static_cast<std::size_t>(i)])];
      if (i < spec.k_shot) {
        ep.support.emplace_back(node, label);
      } else {
        ep.query.emplace_back(node, label);
      }
    }
  }
  return ep;
}

std::vector<Episode> sample_batch(const SplitView& view, const EpisodeSpec& spec, int count,
                                  std::uint64_t master_seed) {
  std::vector<Episode> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    RngStream rng = RngStream::substream(master_seed, static_cast<std::uint64_t>(i));
    out.push_back(sample_episode(view, spec, rng));
  }
  return out;
}

void write_episodes_jsonl(const std::filesystem::path& path, const std::vector<Episode>& episodes,
                          const SplitView& view) {
  std::ofstream out(path);
  if (!out) throw FsncError("cannot write " + path.string());
  for (const Episode& ep : episodes) {
    nlohmann::json j;
    j["class_map"] = ep.class_map;
    auto dump_pairs = [&](const std::vector<std::pair<int, int>>& pairs) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& [node, label] : pairs) {
        arr.push_back({view.to_global[static_cast<std::size_t>(node)], label});
      }
      return arr;
    };
    j["support"] = dump_pairs(ep.support);
    j["query"] = dump_pairs(ep.query);
    out << j.dump() << "\n";
  }
}

std::vector<Episode> read_episodes_jsonl(const std::filesystem::path& path, const SplitView& view) {
  std::ifstream in(path);
  if (!in) throw FsncError("cannot read " + path.string());
  std::vector<Episode> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw FsncError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    Episode ep;
    ep.class_map = j.at("class_map").get<std::vector<int>>();
    auto load_pairs = [&](const nlohmann::json& arr) {
      std::vector<std::pair<int, int>> pairs;
      for (const auto& item : arr) {
        const int global = item.at(0).get<int>();
        const int local = view.to_local[static_cast<std::size_t>(global)];
        if (local < 0) {
          throw FsncError(path.string() + ":" + std::to_string(line_no) + ": node " +
                          std::to_string(global) + " is not in the view");
        }
        pairs.emplace_back(local, item.at(1).get<int>());
      }
      return pairs;
    };
    ep.support = load_pairs(j.at("support"));
    ep.query = load_pairs(j.at("query"));
    out.push_back(std::move(ep));
  }
  return out;
}

}  // namespace fsnc
