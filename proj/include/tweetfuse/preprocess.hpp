#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tweetfuse {

/// Word -> row index in the static embedding table. Real words start at 2.
using Vocabulary = std::unordered_map<std::string, std::int32_t>;

inline constexpr std::int32_t kPadId = 0;
inline constexpr std::int32_t kOovId = 1;
inline constexpr std::int32_t kFirstWordId = 2;

struct PreprocessConfig {
  std::size_t max_len = 100;
  // On: "#word" keeps "word". Off: the whole hashtag token is dropped.
  bool strip_hashmark_keep_word = true;
  bool remove_diacritics = true;
  std::set<std::string> stopwords;
  std::map<std::string, std::string> emoji_map;

  void validate() const;
};

/// Fixed-length id sequence. ids.size() == max_len; ids[t] == kPadId for t >= true_len.
struct TokenSequence {
  std::vector<std::int32_t> ids;
  std::size_t true_len = 0;
  std::string source_id;

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

/// Removes URLs, @-mentions, hash marks (or whole hashtags), punctuation and
/// Arabic diacritics; substitutes mapped emojis; collapses whitespace.
std::string clean(std::string_view text, const PreprocessConfig& cfg);

/// Alef variants to bare alef, ta marbuta to ha, alef maqsura to ya, tatweel dropped.
std::string normalize(std::string_view text);

std::vector<std::string> split_whitespace(std::string_view text);

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const PreprocessConfig& cfg);

TokenSequence encode_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                            const PreprocessConfig& cfg, std::string source_id = {});

/// Whitespace split of already cleaned, normalized text, then encode_tokens.
TokenSequence tokenize_encode(std::string_view text, const Vocabulary& vocab,
                              const PreprocessConfig& cfg, std::string source_id = {});

/// clean -> normalize -> split -> remove_stopwords.
std::vector<std::string> prepare_tokens(std::string_view raw, const PreprocessConfig& cfg);

/// Full pipeline from raw tweet text to a TokenSequence.
TokenSequence preprocess_text(std::string_view raw, const Vocabulary& vocab,
                              const PreprocessConfig& cfg, std::string source_id = {});

/// One token per line. Entries are normalized so they match pipeline output.
std::set<std::string> load_stopwords(const std::string& path);

/// `emoji<TAB>phrase` per line.
std::map<std::string, std::string> load_emoji_map(const std::string& path);

}  // namespace tweetfuse
