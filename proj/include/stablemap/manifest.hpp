#pragma once

// JSON run manifests written beside each output CSV: what was run, with
// which seeds and parameters, and how many realisations failed and why.

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stablemap/harness.hpp"
#include "stablemap/io.hpp"
#include "stablemap/version.hpp"

namespace stablemap {

struct RunSpec {
  std::string generator;
  nlohmann::json parameters = nlohmann::json::object();
  RunOptions options;
  std::vector<std::string> outputs;
};

inline nlohmann::json make_manifest(const RunSpec& spec, const FailureCounts& failures,
                                    const nlohmann::json& extra = nlohmann::json::object()) {
  nlohmann::json m;
  m["generator"] = spec.generator;
  m["parameters"] = spec.parameters;
  m["realisations"] = spec.options.realisations;
  m["master_seed"] = spec.options.master_seed;
  m["width"] = spec.options.width;
  m["outputs"] = spec.outputs;
  m["failures"] = {{"guard_exceeded", failures.guard_exceeded},
                   {"diverged", failures.diverged},
                   {"singularity_hit", failures.singularity},
                   {"failed", failures.failed}};
  m["versions"] = {{"stablemap", version_string}, {"csv_schema", io::csv_version}};
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  return m;
}

/// out.csv -> out.manifest.json
inline std::string manifest_path_for(const std::string& csv_path) {
  const std::string ext = ".csv";
  if (csv_path.size() > ext.size() && csv_path.compare(csv_path.size() - ext.size(), ext.size(), ext) == 0)
    return csv_path.substr(0, csv_path.size() - ext.size()) + ".manifest.json";
  return csv_path + ".manifest.json";
}

inline void write_manifest(const std::string& path, const nlohmann::json& manifest) {
  std::ofstream out(path);
  if (!out) throw io::io_error("cannot open '" + path + "' for writing");
  out << manifest.dump(2) << '\n';
  if (!out) throw io::io_error("failed writing '" + path + "'");
}

}  // namespace stablemap
