#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "tweetfuse/corpus.hpp"
#include "tweetfuse/embed_store.hpp"
#include "tweetfuse/preprocess.hpp"
#include "tweetfuse/run_config.hpp"

namespace tweetfuse {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

/// Entry point shared by the executable and the tests. args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct PreprocessSummary {
  std::size_t examples = 0;
  std::size_t tokens = 0;      // kept tokens after stopword removal, before truncation
  std::size_t encoded = 0;     // tokens inside max_len
  std::size_t oov = 0;         // encoded tokens mapped to the OOV id
  std::size_t truncated = 0;   // examples longer than max_len
  std::map<std::size_t, std::size_t> length_histogram;  // token count -> examples

  double oov_rate() const { return encoded == 0 ? 0.0 : static_cast<double>(oov) / static_cast<double>(encoded); }
  nlohmann::json to_json() const;
};

/// Runs the preprocess pipeline over every example, in corpus order.
std::vector<TokenSequence> encode_corpus(const Corpus& corpus, const Vocabulary& vocab,
                                         const PreprocessConfig& cfg, PreprocessSummary* summary = nullptr);

/// Cache line: id<TAB>space-joined ids (all max_len of them).
void write_token_cache(std::ostream& out, const std::vector<TokenSequence>& sequences);
std::vector<TokenSequence> read_token_cache(std::istream& in);

/// Full training run as driven by `train`: writes the run tree under
/// cfg.paths.output_dir. Returns the averaged validation report per variant.
std::map<std::string, MetricsReport> run_training(const RunConfig& cfg, std::ostream& log, bool force = false);

}  // namespace tweetfuse
