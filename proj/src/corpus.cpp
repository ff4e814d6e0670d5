#include "tweetfuse/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_set>

#include "tweetfuse/error.hpp"
#include "tweetfuse/rng.hpp"

namespace tweetfuse {

namespace {

constexpr std::string_view kHeader[] = {"id", "text", "sarcasm", "sentiment", "dialect"};

std::string upper_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

std::string row_context(const std::string& source, std::size_t row, std::size_t line) {
  return source + ": row " + std::to_string(row) + " (line " + std::to_string(line) + ")";
}

std::optional<bool> parse_sarcasm(std::string_view field, const std::string& ctx) {
  if (field.empty()) return std::nullopt;
  const std::string u = upper_ascii(field);
  if (u == "TRUE") return true;
  if (u == "FALSE") return false;
  throw DataError(ctx + ": unknown sarcasm label '" + std::string(field) + "'");
}

std::optional<Sentiment> parse_sentiment(std::string_view field, const std::string& ctx) {
  if (field.empty()) return std::nullopt;
  const std::string u = upper_ascii(field);
  if (u == "NEG") return Sentiment::negative;
  if (u == "NEU") return Sentiment::neutral;
  if (u == "POS") return Sentiment::positive;
  throw DataError(ctx + ": unknown sentiment label '" + std::string(field) + "'");
}

}  // namespace

std::size_t num_classes(Task task) { return task == Task::sarcasm ? 2 : 3; }

const std::vector<std::string>& class_names(Task task) {
  static const std::vector<std::string> sarcasm{"false", "true"};
  static const std::vector<std::string> sentiment{"negative", "neutral", "positive"};
  return task == Task::sarcasm ? sarcasm : sentiment;
}

std::string_view task_name(Task task) { return task == Task::sarcasm ? "sarcasm" : "sentiment"; }

Task parse_task(std::string_view name) {
  if (name == "sarcasm") return Task::sarcasm;
  if (name == "sentiment") return Task::sentiment;
  throw UsageError("unknown task '" + std::string(name) + "' (expected sarcasm or sentiment)");
}

std::size_t label_index(const Tweet& tweet, Task task) {
  if (task == Task::sarcasm) {
    if (!tweet.sarcasm) throw DataError("example '" + tweet.id + "' has no sarcasm label");
    return *tweet.sarcasm ? 1 : 0;
  }
  if (!tweet.sentiment) throw DataError("example '" + tweet.id + "' has no sentiment label");
  return static_cast<std::size_t>(*tweet.sentiment);
}

bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;

  const std::size_t start_line = line + 1;
  std::string field;
  bool quoted = false;
  bool after_quote = false;
  bool field_started = false;
  int ch;
  while ((ch = in.get()) != std::char_traits<char>::eof()) {
    const char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get();
          field.push_back('"');
        } else {
          quoted = false;
          after_quote = true;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    if (c == '\t') {
      fields.push_back(std::move(field));
      field.clear();
      after_quote = false;
      field_started = false;
      continue;
    }
    if (c == '\n') {
      ++line;
      if (!after_quote && !field.empty() && field.back() == '\r') field.pop_back();
      fields.push_back(std::move(field));
      return true;
    }
    if (after_quote) {
      if (c == '\r' && in.peek() == '\n') continue;
      throw DataError("line " + std::to_string(line + 1) +
                      ": unexpected character after closing quote");
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
      continue;
    }
    field_started = true;
    field.push_back(c);
  }
  if (quoted) {
    throw DataError("line " + std::to_string(start_line) + ": unterminated quoted field");
  }
  ++line;
  if (!after_quote && !field.empty() && field.back() == '\r') field.pop_back();
  fields.push_back(std::move(field));
  return true;
}

std::string quote_field(std::string_view field) {
  const bool needs_quotes = field.find_first_of("\t\n\r\"") != std::string_view::npos;
  if (!needs_quotes) return std::string(field);
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Corpus read_corpus(std::istream& in, Task task, bool require_labels, const std::string& source) {
  std::vector<std::string> fields;
  std::size_t line = 0;
  if (!read_record(in, fields, line)) throw DataError(source + ": empty file, missing header");
  if (!fields.empty() && fields[0].starts_with("\xEF\xBB\xBF")) fields[0].erase(0, 3);
  if (fields.size() != std::size(kHeader) ||
      !std::equal(fields.begin(), fields.end(), std::begin(kHeader))) {
    throw DataError(source + ": header must be id<TAB>text<TAB>sarcasm<TAB>sentiment<TAB>dialect");
  }

  Corpus corpus;
  corpus.task = task;
  std::unordered_set<std::string> seen;
  std::size_t row = 0;
  while (true) {
    const std::size_t start_line = line + 1;
    if (!read_record(in, fields, line)) break;
    if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
    ++row;
    const std::string ctx = row_context(source, row, start_line);
    if (fields.size() != std::size(kHeader)) {
      throw DataError(ctx + ": expected 5 fields, found " + std::to_string(fields.size()));
    }
    Tweet t;
    t.id = std::move(fields[0]);
    t.text = std::move(fields[1]);
    t.sarcasm = parse_sarcasm(fields[2], ctx);
    t.sentiment = parse_sentiment(fields[3], ctx);
    t.dialect = std::move(fields[4]);
    if (t.id.empty()) throw DataError(ctx + ": empty id");
    if (!seen.insert(t.id).second) throw DataError(ctx + ": duplicate id '" + t.id + "'");
    if (require_labels) {
      const bool has_label = task == Task::sarcasm ? t.sarcasm.has_value() : t.sentiment.has_value();
      if (!has_label) {
        throw DataError(ctx + ": missing " + std::string(task_name(task)) + " label for '" +
                        t.id + "'");
      }
    }
    corpus.examples.push_back(std::move(t));
  }
  return corpus;
}

Corpus load_corpus(const std::string& path, Task task, bool require_labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset file " + path);
  return read_corpus(in, task, require_labels, path);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  out << "id\ttext\tsarcasm\tsentiment\tdialect\n";
  for (const Tweet& t : corpus.examples) {
    out << quote_field(t.id) << '\t' << quote_field(t.text) << '\t';
    if (t.sarcasm) out << (*t.sarcasm ? "TRUE" : "FALSE");
    out << '\t';
    if (t.sentiment) {
      static constexpr const char* kCodes[] = {"NEG", "NEU", "POS"};
      out << kCodes[static_cast<int>(*t.sentiment)];
    }
    out << '\t' << quote_field(t.dialect) << '\n';
  }
}

void save_corpus(const std::string& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  write_corpus(out, corpus);
}

std::vector<std::size_t> class_counts(const Corpus& corpus) {
  std::vector<std::size_t> counts(num_classes(corpus.task), 0);
  for (const Tweet& t : corpus.examples) ++counts[label_index(t, corpus.task)];
  return counts;
}

std::map<std::string, std::size_t> class_distribution(const Corpus& corpus) {
  std::map<std::string, std::size_t> out;
  const auto counts = class_counts(corpus);
  const auto& names = class_names(corpus.task);
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] > 0) out[names[c]] = counts[c];
  }
  return out;
}

std::vector<std::size_t> validation_allocation(const std::vector<std::size_t>& class_counts,
                                               double validation_fraction) {
  const std::size_t total = std::accumulate(class_counts.begin(), class_counts.end(), std::size_t{0});
  // Tolerance absorbs representation error in products like 4622 * 0.2.
  constexpr double kEps = 1e-9;
  const auto target = static_cast<std::size_t>(std::floor(total * validation_fraction + 0.5 + kEps));

  std::vector<std::size_t> alloc(class_counts.size());
  std::vector<double> remainder(class_counts.size());
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < class_counts.size(); ++c) {
    const double exact = class_counts[c] * validation_fraction;
    alloc[c] = static_cast<std::size_t>(std::floor(exact + kEps));
    remainder[c] = exact - static_cast<double>(alloc[c]);
    assigned += alloc[c];
  }
  std::vector<std::size_t> order(class_counts.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b] + kEps;
  });
  for (std::size_t k = 0; assigned < target && k < order.size(); ++k) {
    const std::size_t c = order[k];
    if (alloc[c] < class_counts[c]) {
      ++alloc[c];
      ++assigned;
    }
  }
  return alloc;
}

std::pair<Corpus, Corpus> stratified_split(const Corpus& corpus, const SplitSpec& spec) {
  if (!(spec.validation_fraction > 0.0 && spec.validation_fraction < 1.0)) {
    throw UsageError("validation fraction must be strictly between 0 and 1");
  }
  const std::size_t k = num_classes(corpus.task);
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    members[label_index(corpus.examples[i], corpus.task)].push_back(i);
  }
  std::vector<std::size_t> counts(k);
  for (std::size_t c = 0; c < k; ++c) {
    counts[c] = members[c].size();
    if (counts[c] < 2) {
      throw DataError("class '" + class_names(corpus.task)[c] + "' has " +
                      std::to_string(counts[c]) + " examples; stratified split needs at least 2");
    }
  }
  const auto alloc = validation_allocation(counts, spec.validation_fraction);

  Rng rng(spec.seed);
  std::vector<char> in_validation(corpus.size(), 0);
  for (std::size_t c = 0; c < k; ++c) {
    rng.shuffle(members[c]);
    for (std::size_t j = 0; j < alloc[c]; ++j) in_validation[members[c][j]] = 1;
  }

  Corpus train{corpus.task, {}};
  Corpus val{corpus.task, {}};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (in_validation[i] ? val : train).examples.push_back(corpus.examples[i]);
  }
  return {std::move(train), std::move(val)};
}

}  // namespace tweetfuse
