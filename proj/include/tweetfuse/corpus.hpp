#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tweetfuse {

enum class Task { sarcasm, sentiment };

enum class Sentiment { negative, neutral, positive };

/// A labeled tweet. Dialect is carried through but never predicted.
struct Tweet {
  std::string id;
  std::string text;
  std::optional<bool> sarcasm;
  std::optional<Sentiment> sentiment;
  std::string dialect;

  friend bool operator==(const Tweet&, const Tweet&) = default;
};

/// Examples in file order, every one labeled for `task`.
struct Corpus {
  Task task = Task::sarcasm;
  std::vector<Tweet> examples;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

struct SplitSpec {
  double validation_fraction = 0.2;
  std::uint64_t seed = 0;
};

// Class indices are fixed per task: sarcasm {false, true}, sentiment
// {negative, neutral, positive}.
std::size_t num_classes(Task task);
const std::vector<std::string>& class_names(Task task);
std::string_view task_name(Task task);
Task parse_task(std::string_view name);

/// Class index of `tweet` for `task`; throws DataError when the label is absent.
std::size_t label_index(const Tweet& tweet, Task task);

/// Reads the quoted TSV dataset format. With `require_labels` every row must
/// carry a label for `task`; without it rows may be unlabeled (prediction input).
Corpus load_corpus(const std::string& path, Task task, bool require_labels = true);
Corpus read_corpus(std::istream& in, Task task, bool require_labels = true,
                   const std::string& source = "<stream>");

void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::string& path, const Corpus& corpus);

/// Per-class shuffle and cut. Returns (train, validation), each in input order.
std::pair<Corpus, Corpus> stratified_split(const Corpus& corpus, const SplitSpec& spec);

/// Validation size per class: round(N * f) overall, apportioned by largest remainder.
std::vector<std::size_t> validation_allocation(const std::vector<std::size_t>& class_counts,
                                               double validation_fraction);

/// Counts keyed by class name; classes with zero examples are omitted.
std::map<std::string, std::size_t> class_distribution(const Corpus& corpus);

/// Counts indexed by class index (always num_classes entries).
std::vector<std::size_t> class_counts(const Corpus& corpus);

// Quoted tab-separated fields: a field containing a tab, newline, CR or a
// double quote is wrapped in quotes with embedded quotes doubled.
std::string quote_field(std::string_view field);

/// Reads one record. Returns false at EOF. `line` is advanced by the number of
/// physical lines consumed.
bool read_record(std::istream& in, std::vector<std::string>& fields, std::size_t& line);

}  // namespace tweetfuse
