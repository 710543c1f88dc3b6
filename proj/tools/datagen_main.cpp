// fsnc-datagen: deterministic synthetic citation-style datasets for local
// experiments and tests (raw files, ready for `fsnc ingest`).
#include <CLI11.hpp>

#include <iostream>

#include "fsnc/datagen.hpp"

int main(int argc, char** argv) {
  CLI::App app{"generate a synthetic attributed graph in raw content/edge form"};

  std::string like, out, name;
  std::uint64_t seed = 0;
  fsnc::SynthSpec spec;
  int train = 0, dev = 0, test = 0;

  app.add_option("--like", like, "preset: cora, citeseer or tiny");
  app.add_option("--out", out, "output directory")->required();
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--name", name, "dataset name (defaults to preset name)");
  app.add_option("--nodes", spec.n_nodes, "node count");
  app.add_option("--features", spec.n_features, "feature dimension");
  app.add_option("--classes", spec.n_classes, "class count");
  app.add_option("--edges", spec.n_edges, "undirected edge count");
  app.add_option("--train-classes", train, "classes in the train split");
  app.add_option("--dev-classes", dev, "classes in the dev split");
  app.add_option("--test-classes", test, "classes in the test split");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!like.empty()) spec = fsnc::synth_preset(like);
    if (!name.empty()) spec.name = name;
    if (train > 0 || dev > 0 || test > 0) spec.split_sizes = {train, dev, test};
    const fsnc::RawDataset raw = fsnc::generate_raw_dataset(spec, seed, out);
    std::cout << spec.name << ": " << spec.n_nodes << " nodes, " << spec.n_edges << " edges, "
              << spec.n_features << " features, " << spec.n_classes << " classes\n";
    std::cout << "content: " << raw.content.string() << "\n";
    std::cout << "edges:   " << raw.edges.string() << "\n";
    std::cout << "next: fsnc ingest --content " << raw.content.string() << " --edges "
              << raw.edges.string() << " --name " << spec.name << " --splits " << spec.split_sizes[0]
              << "," << spec.split_sizes[1] << "," << spec.split_sizes[2] << " --out <dir>\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
