#include "tweetfuse/preprocess.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <fstream>

#include "tweetfuse/error.hpp"

namespace tweetfuse {

namespace {

using CodePoints = std::vector<UChar32>;

CodePoints decode(std::string_view text) {
  CodePoints out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    out.push_back(c < 0 ? 0xFFFD : c);
  }
  return out;
}

std::string encode(const CodePoints& cps) {
  std::string out;
  out.reserve(cps.size() * 2);
  for (UChar32 c : cps) {
    uint8_t buf[U8_MAX_LENGTH];
    int32_t n = 0;
    U8_APPEND_UNSAFE(buf, n, c);
    out.append(reinterpret_cast<const char*>(buf), static_cast<std::size_t>(n));
  }
  return out;
}

bool is_diacritic(UChar32 c) { return (c >= 0x064B && c <= 0x0652) || c == 0x0670; }

bool is_space(UChar32 c) { return u_isUWhiteSpace(c) || u_iscntrl(c); }

bool is_punctuation(UChar32 c) {
  if (c == 0x061F || c == 0x060C || c == 0x061B) return true;  // ؟ ، ؛
  return (U_GET_GC_MASK(c) & U_GC_P_MASK) != 0;
}

// Characters that may follow '@' or '#' inside a handle or hashtag.
bool is_handle_char(UChar32 c) {
  if (c == '_') return true;
  const auto mask = U_GET_GC_MASK(c);
  return (mask & (U_GC_L_MASK | U_GC_N_MASK | U_GC_M_MASK)) != 0;
}

UChar32 ascii_lower(UChar32 c) { return (c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c; }

bool starts_with_ascii_ci(const CodePoints& cps, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > cps.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    if (ascii_lower(cps[pos + k]) != static_cast<UChar32>(prefix[k])) return false;
  }
  return true;
}

bool url_at(const CodePoints& cps, std::size_t pos) {
  return starts_with_ascii_ci(cps, pos, "http://") || starts_with_ascii_ci(cps, pos, "https://") ||
         starts_with_ascii_ci(cps, pos, "www.");
}

struct EmojiEntry {
  CodePoints key;
  CodePoints phrase;
};

std::vector<EmojiEntry> compile_emoji_map(const PreprocessConfig& cfg) {
  std::vector<EmojiEntry> entries;
  entries.reserve(cfg.emoji_map.size());
  for (const auto& [key, phrase] : cfg.emoji_map) {
    EmojiEntry e{decode(key), decode(phrase)};
    if (e.key.empty()) continue;
    if (cfg.remove_diacritics) std::erase_if(e.phrase, is_diacritic);
    entries.push_back(std::move(e));
  }
  // Longest key wins at a given position.
  std::stable_sort(entries.begin(), entries.end(),
                   [](const EmojiEntry& a, const EmojiEntry& b) { return a.key.size() > b.key.size(); });
  return entries;
}

CodePoints strip_urls_mentions(const CodePoints& in, bool drop_hashtags) {
  CodePoints out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (url_at(in, i)) {
      while (i < in.size() && !is_space(in[i])) ++i;
      continue;
    }
    if (in[i] == '@' || (drop_hashtags && in[i] == '#')) {
      ++i;
      while (i < in.size() && is_handle_char(in[i])) ++i;
      out.push_back(' ');
      continue;
    }
    out.push_back(in[i++]);
  }
  return out;
}

CodePoints substitute_emojis(const CodePoints& in, const std::vector<EmojiEntry>& entries) {
  if (entries.empty()) return in;
  CodePoints out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    const EmojiEntry* hit = nullptr;
    for (const EmojiEntry& e : entries) {
      if (i + e.key.size() <= in.size() && std::equal(e.key.begin(), e.key.end(), in.begin() + i)) {
        hit = &e;
        break;
      }
    }
    if (hit) {
      out.push_back(' ');
      out.insert(out.end(), hit->phrase.begin(), hit->phrase.end());
      out.push_back(' ');
      i += hit->key.size();
    } else {
      out.push_back(in[i++]);
    }
  }
  return out;
}

}  // namespace

void PreprocessConfig::validate() const {
  if (max_len < 1) throw UsageError("max_len must be at least 1");
}

std::string clean(std::string_view text, const PreprocessConfig& cfg) {
  CodePoints cps = decode(text);
  if (cfg.remove_diacritics) std::erase_if(cps, is_diacritic);
  cps = strip_urls_mentions(cps, !cfg.strip_hashmark_keep_word);
  cps = substitute_emojis(cps, compile_emoji_map(cfg));

  CodePoints out;
  out.reserve(cps.size());
  bool pending_space = false;
  for (UChar32 c : cps) {
    if (is_space(c) || is_punctuation(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return encode(out);
}

std::string normalize(std::string_view text) {
  CodePoints cps = decode(text);
  CodePoints out;
  out.reserve(cps.size());
  for (UChar32 c : cps) {
    switch (c) {
      case 0x0622:  // آ
      case 0x0623:  // أ
      case 0x0625:  // إ
        out.push_back(0x0627);
        break;
      case 0x0629:  // ة
        out.push_back(0x0647);
        break;
      case 0x0649:  // ى
        out.push_back(0x064A);
        break;
      case 0x0640:  // tatweel
        break;
      default:
        out.push_back(c);
    }
  }
  return encode(out);
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  auto space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (i < text.size()) {
    while (i < text.size() && space(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !space(text[i])) ++i;
    if (i > start) tokens.emplace_back(text.substr(start, i - start));
  }
  return tokens;
}

std::vector<std::string> remove_stopwords(const std::vector<std::string>& tokens,
                                          const PreprocessConfig& cfg) {
  if (cfg.stopwords.empty()) return tokens;
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!cfg.stopwords.contains(t)) out.push_back(t);
  }
  return out;
}

TokenSequence encode_tokens(const std::vector<std::string>& tokens, const Vocabulary& vocab,
                            const PreprocessConfig& cfg, std::string source_id) {
  TokenSequence seq;
  seq.source_id = std::move(source_id);
  seq.ids.assign(cfg.max_len, kPadId);
  seq.true_len = std::min(tokens.size(), cfg.max_len);
  for (std::size_t t = 0; t < seq.true_len; ++t) {
    const auto it = vocab.find(tokens[t]);
    seq.ids[t] = it == vocab.end() ? kOovId : it->second;
  }
  return seq;
}

TokenSequence tokenize_encode(std::string_view text, const Vocabulary& vocab,
                              const PreprocessConfig& cfg, std::string source_id) {
  return encode_tokens(split_whitespace(text), vocab, cfg, std::move(source_id));
}

std::vector<std::string> prepare_tokens(std::string_view raw, const PreprocessConfig& cfg) {
  return remove_stopwords(split_whitespace(normalize(clean(raw, cfg))), cfg);
}

TokenSequence preprocess_text(std::string_view raw, const Vocabulary& vocab,
                              const PreprocessConfig& cfg, std::string source_id) {
  return encode_tokens(prepare_tokens(raw, cfg), vocab, cfg, std::move(source_id));
}

std::set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open stopword file " + path);
  PreprocessConfig plain;
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    for (auto& token : split_whitespace(normalize(clean(line, plain)))) words.insert(std::move(token));
  }
  return words;
}

std::map<std::string, std::string> load_emoji_map(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open emoji map " + path);
  std::map<std::string, std::string> map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError(path + ": line " + std::to_string(lineno) + ": expected emoji<TAB>phrase");
    }
    map[line.substr(0, tab)] = line.substr(tab + 1);
  }
  return map;
}

}  // namespace tweetfuse
