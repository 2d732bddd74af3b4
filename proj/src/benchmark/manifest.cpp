#include <json.hpp>

#include "shiwa/benchmark.hpp"

#ifndef SHIWA_VERSION
#define SHIWA_VERSION "unknown"
#endif

namespace shiwa {

std::string manifest_json(const ExperimentConfig& config) {
  using nlohmann::json;
  json cfg = {
      {"benchmark", config.benchmark},
      {"optimizers", config.optimizers},
      {"repetitions", config.repetitions},
      {"seed", config.seed},
      {"workers", config.workers},
      {"timeout_seconds", config.timeout_seconds},
      {"cell_filter", config.cell_filter},
  };
  const BenchmarkSpec& spec = find_benchmark(config.benchmark);
  const std::vector<Cell> cells = grid_cells(spec);
  std::vector<std::size_t> indices = config.cell_filter;
  if (indices.empty()) {
    for (std::size_t i = 0; i < cells.size(); ++i) indices.push_back(i);
  }
  json runs = json::array();
  for (std::size_t i : indices) {
    const Cell& c = cells.at(i);
    for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
      runs.push_back({{"cell", i},
                      {"repetition", rep},
                      {"function", c.function},
                      {"dimension", c.dimension},
                      {"budget", c.budget},
                      {"parallelism", c.parallelism},
                      {"rotated", c.rotated},
                      {"noisy", c.noisy},
                      {"instance_seed", instance_seed(config.seed, i, rep)}});
    }
  }
  json doc = {{"version", SHIWA_VERSION}, {"config", cfg}, {"runs", runs}};
  return doc.dump(2) + "\n";
}

ExperimentConfig config_from_manifest(const std::string& text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(std::string("manifest is not valid JSON: ") + e.what());
  }
  try {
    const json& cfg = doc.at("config");
    ExperimentConfig config;
    config.benchmark = cfg.at("benchmark").get<std::string>();
    config.optimizers = cfg.at("optimizers").get<std::vector<std::string>>();
    config.repetitions = cfg.at("repetitions").get<std::size_t>();
    config.seed = cfg.at("seed").get<std::uint64_t>();
    config.workers = cfg.value("workers", std::size_t{1});
    config.timeout_seconds = cfg.value("timeout_seconds", 300.0);
    config.cell_filter = cfg.value("cell_filter", std::vector<std::size_t>{});
    return config;
  } catch (const json::exception& e) {
    throw Error(std::string("manifest is missing fields: ") + e.what());
  }
}

}  // namespace shiwa
