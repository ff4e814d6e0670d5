#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tweetfuse/corpus.hpp"
#include "tweetfuse/fusion_model.hpp"
#include "tweetfuse/preprocess.hpp"
#include "tweetfuse/trainer.hpp"

namespace tweetfuse {

struct PreprocessSettings {
  std::size_t max_len = 100;
  bool strip_hashmark_keep_word = true;
  bool remove_diacritics = true;
  std::string stopwords_path;
  std::string emoji_map_path;

  /// Loads the resource files into a full PreprocessConfig.
  PreprocessConfig load() const;
};

struct RunPaths {
  std::string dataset;     // split into train/validation when `validation` is empty
  std::string validation;  // optional explicit validation set
  std::string embeddings;
  std::string context;
  std::string output_dir;
};

/// Everything a training run needs; serialized into the run directory.
struct RunConfig {
  Task task = Task::sarcasm;
  std::vector<Variant> variants{Variant::fusion};
  double validation_fraction = 0.2;
  std::uint64_t split_seed = 0;
  PreprocessSettings preprocess;
  FusionConfig model;
  TrainConfig train;
  RunPaths paths;

  /// Checks ranges and that every referenced input file exists.
  void validate() const;
};

nlohmann::json to_json(const PreprocessConfig& cfg);
PreprocessConfig preprocess_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FusionConfig& cfg);
FusionConfig fusion_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

nlohmann::json to_json(const MetricsReport& report);
MetricsReport metrics_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RunConfig& cfg);
/// Missing keys keep the defaults of `base`.
RunConfig run_config_from_json(const nlohmann::json& j, RunConfig base = {});
RunConfig load_run_config(const std::string& path);

}  // namespace tweetfuse
