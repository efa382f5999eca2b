#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gibbslat/diagnostics.hpp"
#include "gibbslat/inference.hpp"
#include "gibbslat/sampler.hpp"

namespace gibbslat {

using Json = nlohmann::ordered_json;

std::string format_double(double v);

Json load_json_file(const std::filesystem::path& path);  // ConfigError on failure

// Model block <-> components.
GibbsModel parse_model(const Json& j);
Json model_to_json(const GibbsModel& gm);

EstimatorConfig parse_estimator_config(const Json& j);  // from the "estimate" block
Json estimator_config_to_json(const EstimatorConfig& cfg);

Json window_to_json(const Window& w);
Window parse_window(const Json& j, int dim);

// Pattern files: CSV with a dimension-adapted header plus a JSON sidecar
// (window, shift, seed, theta, model, framework).
void write_f1_csv(const std::filesystem::path& path, const PairPattern& p);
void write_f2_csv(const std::filesystem::path& path, const PointPattern& p);

struct PatternMeta {
  Window window;
  Vec shift;
  uint64_t seed = 0;
  ThetaVector theta;
  Json model;
  std::string framework;  // "F1" or "F2"
  int replicate = 0;
  Json config_echo;
};

void write_meta_json(const std::filesystem::path& path, const PatternMeta& meta, int dim);

// Reads `<stem>_f1.csv` / `<stem>_f2.csv` together with `<stem>_meta.json`.
Observation read_observation(const std::filesystem::path& csv_path);

Json fit_result_to_json(const FitResult& fr, const Json& config_echo);

void write_text_file(const std::filesystem::path& path, const std::string& content);

// '*' wildcards in the filename component only.
std::vector<std::filesystem::path> glob_files(const std::string& pattern);

}  // namespace gibbslat
