#include "tweetfuse/metrics.hpp"

#include <cstdio>

#include "tweetfuse/error.hpp"

namespace tweetfuse {

namespace {

constexpr std::size_t kSarcastic = 1;
constexpr std::size_t kNegative = static_cast<std::size_t>(Sentiment::negative);
constexpr std::size_t kPositive = static_cast<std::size_t>(Sentiment::positive);

double safe_ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

double f_pn_score(double f1_positive, double f1_negative) { return (f1_positive + f1_negative) / 2.0; }

double MetricsReport::task_score() const {
  if (task == Task::sarcasm) return f1_sarcastic.value_or(0.0);
  return f_pn.value_or(0.0);
}

MetricsReport evaluate(std::span<const std::size_t> predictions, std::span<const std::size_t> gold,
                       Task task) {
  if (predictions.size() != gold.size()) {
    throw DataError("evaluate: " + std::to_string(predictions.size()) + " predictions for " +
                    std::to_string(gold.size()) + " gold labels");
  }
  const std::size_t k = num_classes(task);
  MetricsReport r;
  r.task = task;
  r.examples = gold.size();
  r.confusion.assign(k, std::vector<std::size_t>(k, 0));
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (gold[i] >= k || predictions[i] >= k) {
      throw DataError("evaluate: unknown label index at position " + std::to_string(i));
    }
    ++r.confusion[gold[i]][predictions[i]];
  }

  std::size_t correct = 0;
  r.class_precision.assign(k, 0.0);
  r.class_recall.assign(k, 0.0);
  r.class_f1.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    correct += r.confusion[c][c];
    std::size_t predicted = 0, actual = 0;
    for (std::size_t j = 0; j < k; ++j) {
      predicted += r.confusion[j][c];
      actual += r.confusion[c][j];
    }
    const double p = safe_ratio(r.confusion[c][c], predicted);
    const double rc = safe_ratio(r.confusion[c][c], actual);
    r.class_precision[c] = p;
    r.class_recall[c] = rc;
    r.class_f1[c] = (p + rc) > 0.0 ? 2.0 * p * rc / (p + rc) : 0.0;
  }
  r.accuracy = safe_ratio(correct, gold.size());
  for (std::size_t c = 0; c < k; ++c) {
    r.precision += r.class_precision[c];
    r.recall += r.class_recall[c];
    r.macro_f1 += r.class_f1[c];
  }
  r.precision /= static_cast<double>(k);
  r.recall /= static_cast<double>(k);
  r.macro_f1 /= static_cast<double>(k);
  if (task == Task::sarcasm) {
    r.f1_sarcastic = r.class_f1[kSarcastic];
  } else {
    r.f_pn = f_pn_score(r.class_f1[kPositive], r.class_f1[kNegative]);
  }
  return r;
}

MetricsReport averaged_report(std::span<const MetricsReport> reports) {
  if (reports.empty()) throw UsageError("averaged_report needs at least one report");
  const Task task = reports.front().task;
  const std::size_t k = num_classes(task);
  MetricsReport out;
  out.task = task;
  out.runs = 0;
  out.confusion.assign(k, std::vector<std::size_t>(k, 0));
  out.class_precision.assign(k, 0.0);
  out.class_recall.assign(k, 0.0);
  out.class_f1.assign(k, 0.0);
  double task_sum = 0.0;
  for (const MetricsReport& r : reports) {
    if (r.task != task) throw UsageError("averaged_report: reports mix sarcasm and sentiment tasks");
    out.examples += r.examples;
    out.runs += r.runs;
    out.accuracy += r.accuracy;
    out.precision += r.precision;
    out.recall += r.recall;
    out.macro_f1 += r.macro_f1;
    for (std::size_t c = 0; c < k; ++c) {
      out.class_precision[c] += r.class_precision.at(c);
      out.class_recall[c] += r.class_recall.at(c);
      out.class_f1[c] += r.class_f1.at(c);
      for (std::size_t j = 0; j < k; ++j) out.confusion[c][j] += r.confusion.at(c).at(j);
    }
    task_sum += r.task_score();
  }
  const auto n = static_cast<double>(reports.size());
  out.accuracy /= n;
  out.precision /= n;
  out.recall /= n;
  out.macro_f1 /= n;
  for (std::size_t c = 0; c < k; ++c) {
    out.class_precision[c] /= n;
    out.class_recall[c] /= n;
    out.class_f1[c] /= n;
  }
  if (task == Task::sarcasm) {
    out.f1_sarcastic = task_sum / n;
  } else {
    out.f_pn = task_sum / n;
  }
  return out;
}

std::vector<std::string> report_columns(Task task) {
  return {"Accuracy", "Precision", "Recall", "F1-Macro",
          task == Task::sarcasm ? "F1-Sarcastic" : "F-PN"};
}

std::vector<double> report_row(const MetricsReport& report) {
  return {report.accuracy, report.precision, report.recall, report.macro_f1, report.task_score()};
}

std::string format_report_table(const MetricsReport& report) {
  std::string out;
  const auto cols = report_columns(report.task);
  for (std::size_t i = 0; i < cols.size(); ++i) {
    if (i) out += '\t';
    out += cols[i];
  }
  out += '\n';
  const auto row = report_row(report);
  char buf[32];
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i) out += '\t';
    std::snprintf(buf, sizeof buf, "%.4f", row[i]);
    out += buf;
  }
  out += '\n';
  return out;
}

}  // namespace tweetfuse
