#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tweetfuse/corpus.hpp"

namespace tweetfuse {

/// Classification metrics over one evaluated set (or the mean over runs).
///
/// Precision and recall are macro averages over classes. confusion[g][p]
/// counts examples with gold class g predicted as p. f1_sarcastic is set for
/// the sarcasm task (F1 of class `true`), f_pn for sentiment (mean of the
/// positive and negative F1).
struct MetricsReport {
  Task task = Task::sarcasm;
  std::size_t examples = 0;
  std::size_t runs = 1;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<double> class_precision;
  std::vector<double> class_recall;
  std::vector<double> class_f1;
  std::optional<double> f1_sarcastic;
  std::optional<double> f_pn;
  std::vector<std::vector<std::size_t>> confusion;

  /// The task's official score: f1_sarcastic or f_pn.
  double task_score() const;
};

/// Mean of the positive-class and negative-class F1.
double f_pn_score(double f1_positive, double f1_negative);

/// Zero-division convention: precision (recall) is 0 when the class has no
/// predicted (gold) instances, and F1 is 0 when precision + recall is 0.
MetricsReport evaluate(std::span<const std::size_t> predictions, std::span<const std::size_t> gold,
                       Task task);

/// Mean of every scalar and per-class metric; confusion matrices summed.
MetricsReport averaged_report(std::span<const MetricsReport> reports);

/// Column names of the printed results row for the task.
std::vector<std::string> report_columns(Task task);
/// Values matching report_columns.
std::vector<double> report_row(const MetricsReport& report);
/// Header line plus value line, tab-separated, values to 4 decimals.
std::string format_report_table(const MetricsReport& report);

}  // namespace tweetfuse
