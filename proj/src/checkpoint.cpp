#include "tweetfuse/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "tweetfuse/error.hpp"
#include "tweetfuse/run_config.hpp"

namespace tweetfuse {

using nlohmann::json;

namespace {

constexpr std::array<char, 8> kMagic = {'T', 'W', 'F', 'C', 'K', 'P', 'T', '1'};

void write_le(std::ostream& out, std::uint64_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) out.put(static_cast<char>((value >> (8 * i)) & 0xff));
}

std::uint64_t read_le(std::istream& in, int bytes, const std::string& path) {
  std::uint64_t value = 0;
  for (int i = 0; i < bytes; ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw DataError(path + ": truncated checkpoint header");
    value |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return value;
}

}  // namespace

Checkpoint make_checkpoint(const FusionModel& model, Task task, const PreprocessConfig& preprocess,
                           const std::string& vocab_hash, std::uint64_t seed) {
  Checkpoint ckpt;
  ckpt.task = task;
  ckpt.model = model.config();
  ckpt.preprocess = preprocess;
  ckpt.vocab_hash = vocab_hash;
  ckpt.seed = seed;
  for (const nn::Parameter* p : model.trainable_parameters()) ckpt.tensors.push_back({p->name, p->value});
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  json tensors = json::array();
  std::uint64_t offset = 0;
  for (const auto& t : ckpt.tensors) {
    tensors.push_back({{"name", t.name}, {"shape", t.value.shape()}, {"offset", offset}, {"count", t.value.size()}});
    offset += t.value.size() * sizeof(double);
  }
  const json manifest{{"format_version", ckpt.format_version},
                      {"task", task_name(ckpt.task)},
                      {"model", to_json(ckpt.model)},
                      {"preprocess", to_json(ckpt.preprocess)},
                      {"vocab_hash", ckpt.vocab_hash},
                      {"seed", ckpt.seed},
                      {"metadata", ckpt.metadata},
                      {"tensors", tensors}};
  const std::string text = manifest.dump(2);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write checkpoint " + path);
  out.write(kMagic.data(), kMagic.size());
  write_le(out, ckpt.format_version, 4);
  write_le(out, text.size(), 8);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (const auto& t : ckpt.tensors) {
    for (double v : t.value.values()) write_le(out, std::bit_cast<std::uint64_t>(v), 8);
  }
  if (!out) throw DataError("failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint " + path);
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw DataError(path + ": not a checkpoint file");
  const auto version = static_cast<std::uint32_t>(read_le(in, 4, path));
  if (version != Checkpoint::kFormatVersion) {
    throw DataError(path + ": unsupported checkpoint version " + std::to_string(version));
  }
  const auto manifest_len = read_le(in, 8, path);
  std::string text(manifest_len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(manifest_len));
  if (!in) throw DataError(path + ": truncated manifest");

  Checkpoint ckpt;
  try {
    const json manifest = json::parse(text);
    ckpt.format_version = version;
    ckpt.task = parse_task(manifest.at("task").get<std::string>());
    ckpt.model = fusion_config_from_json(manifest.at("model"));
    ckpt.preprocess = preprocess_config_from_json(manifest.at("preprocess"));
    ckpt.vocab_hash = manifest.at("vocab_hash").get<std::string>();
    ckpt.seed = manifest.at("seed").get<std::uint64_t>();
    ckpt.metadata = manifest.value("metadata", json::object());
    std::uint64_t expected_offset = 0;
    for (const auto& entry : manifest.at("tensors")) {
      NamedTensor t;
      t.name = entry.at("name").get<std::string>();
      const auto shape = entry.at("shape").get<std::vector<std::size_t>>();
      const auto count = entry.at("count").get<std::uint64_t>();
      if (entry.at("offset").get<std::uint64_t>() != expected_offset) {
        throw DataError(path + ": tensor '" + t.name + "' has an unexpected offset");
      }
      std::vector<double> data(count);
      for (double& v : data) v = std::bit_cast<double>(read_le(in, 8, path));
      t.value = nn::Tensor(shape, std::move(data));
      expected_offset += count * sizeof(double);
      ckpt.tensors.push_back(std::move(t));
    }
  } catch (const json::exception& e) {
    throw DataError(path + ": malformed manifest: " + e.what());
  }
  return ckpt;
}

FusionModel restore_model(const Checkpoint& ckpt) {
  FusionModel model(ckpt.model);
  auto params = model.trainable_parameters();
  if (params.size() != ckpt.tensors.size()) {
    throw DataError("checkpoint has " + std::to_string(ckpt.tensors.size()) + " tensors, model expects " +
                    std::to_string(params.size()));
  }
  for (std::size_t k = 0; k < params.size(); ++k) {
    const NamedTensor& t = ckpt.tensors[k];
    nn::Parameter& p = *params[k];
    // Trainable embeddings are sized from the table, so their shape comes from the file.
    const bool resizable = p.name == "embedding.matrix";
    if (t.name != p.name || (!resizable && t.value.shape() != p.value.shape())) {
      throw DataError("checkpoint tensor '" + t.name + "' " + nn::shape_string(t.value.shape()) +
                      " does not match model tensor '" + p.name + "' " + nn::shape_string(p.value.shape()));
    }
    p.value = t.value;
    p.grad = nn::Tensor(t.value.shape());
  }
  return model;
}

}  // namespace tweetfuse
