#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "tweetfuse/corpus.hpp"
#include "tweetfuse/fusion_model.hpp"
#include "tweetfuse/preprocess.hpp"

namespace tweetfuse {

struct NamedTensor {
  std::string name;
  nn::Tensor value;
};

/// Trained model plus what is needed to preprocess new inputs for it.
///
/// On disk: 8-byte magic "TWFCKPT1", u32 format version, u64 manifest length,
/// a UTF-8 JSON manifest (configs, names, shapes, byte offsets), then the
/// tensor payload as little-endian IEEE-754 doubles. All integers little-endian.
struct Checkpoint {
  static constexpr std::uint32_t kFormatVersion = 1;

  std::uint32_t format_version = kFormatVersion;
  Task task = Task::sarcasm;
  FusionConfig model;
  PreprocessConfig preprocess;
  std::string vocab_hash;
  std::uint64_t seed = 0;
  nlohmann::json metadata = nlohmann::json::object();
  std::vector<NamedTensor> tensors;
};

Checkpoint make_checkpoint(const FusionModel& model, Task task, const PreprocessConfig& preprocess,
                           const std::string& vocab_hash, std::uint64_t seed);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

/// Builds a model from the checkpoint's config and copies every tensor in;
/// names and shapes must match exactly.
FusionModel restore_model(const Checkpoint& ckpt);

}  // namespace tweetfuse
