#pragma once

#include <cmath>
#include <iomanip>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "simplegate/common.hpp"
#include "simplegate/json_util.hpp"

namespace simplegate {

// Rows are the human labels, columns the machine labels.
struct ConfusionMatrix {
  long long yes_yes = 0;  // human Yes, machine Yes
  long long yes_no = 0;   // human Yes, machine No
  long long no_yes = 0;   // human No, machine Yes
  long long no_no = 0;    // human No, machine No

  long long total() const { return yes_yes + yes_no + no_yes + no_no; }
  long long agreements() const { return yes_yes + no_no; }
  long long disagreements() const { return yes_no + no_yes; }
  long long human_yes() const { return yes_yes + yes_no; }
  long long human_no() const { return no_yes + no_no; }
  long long machine_yes() const { return yes_yes + no_yes; }
  long long machine_no() const { return yes_no + no_no; }
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct EvalReport {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
  double kappa = 0.0;
  ClassMetrics yes;
  ClassMetrics no;
  ClassMetrics weighted;  // weighted by human (row) support
  std::optional<double> mae;
  std::optional<double> rmse;
  std::vector<std::string> flags;
};

inline ConfusionMatrix confusion(std::span<const Label> human, std::span<const Label> machine) {
  if (human.size() != machine.size())
    throw DataError("label sequence length mismatch: " + std::to_string(human.size()) +
                    " vs " + std::to_string(machine.size()));
  if (human.empty()) throw DataError("empty label sequences");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < human.size(); ++i) {
    if (human[i] == Label::Yes)
      (machine[i] == Label::Yes ? cm.yes_yes : cm.yes_no) += 1;
    else
      (machine[i] == Label::Yes ? cm.no_yes : cm.no_no) += 1;
  }
  return cm;
}

// Accuracy, per-class and row-support-weighted precision/recall/F1, and
// Cohen's kappa. Zero-denominator cells come back as 0 with a flag so
// degenerate classifiers still evaluate.
inline EvalReport metrics(const ConfusionMatrix& cm) {
  if (cm.total() <= 0) throw DataError("empty confusion matrix");
  EvalReport report;
  report.confusion = cm;
  const double total = static_cast<double>(cm.total());
  report.accuracy = static_cast<double>(cm.agreements()) / total;

  auto ratio = [&report](long long num, long long den, const char* name) {
    if (den == 0) {
      report.flags.push_back(std::string(name) + " undefined (zero denominator), set to 0");
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  report.yes.precision = ratio(cm.yes_yes, cm.machine_yes(), "precision(Yes)");
  report.yes.recall = ratio(cm.yes_yes, cm.human_yes(), "recall(Yes)");
  report.no.precision = ratio(cm.no_no, cm.machine_no(), "precision(No)");
  report.no.recall = ratio(cm.no_no, cm.human_no(), "recall(No)");
  auto fscore = [&report](const char* name, double p, double r) {
    if (p + r <= 0.0) {
      report.flags.push_back(std::string(name) + " undefined (precision + recall = 0), set to 0");
      return 0.0;
    }
    return 2.0 * p * r / (p + r);
  };
  report.yes.f1 = fscore("F(Yes)", report.yes.precision, report.yes.recall);
  report.no.f1 = fscore("F(No)", report.no.precision, report.no.recall);

  const double support_yes = static_cast<double>(cm.human_yes());
  const double support_no = static_cast<double>(cm.human_no());
  report.weighted.precision =
      (support_yes * report.yes.precision + support_no * report.no.precision) / total;
  report.weighted.recall =
      (support_yes * report.yes.recall + support_no * report.no.recall) / total;
  report.weighted.f1 = (support_yes * report.yes.f1 + support_no * report.no.f1) / total;

  const double expected =
      (static_cast<double>(cm.human_yes()) * static_cast<double>(cm.machine_yes()) +
       static_cast<double>(cm.human_no()) * static_cast<double>(cm.machine_no())) /
      (total * total);
  const double denom = 1.0 - expected;
  if (std::abs(denom) < 1e-15) {
    report.kappa = report.accuracy >= 1.0 - 1e-15 ? 1.0 : 0.0;
    report.flags.push_back("kappa degenerate (chance agreement = 1)");
  } else {
    report.kappa = (report.accuracy - expected) / denom;
  }
  return report;
}

// MAE and RMSE of real-valued scores in [0, 1] against 0/1 truth labels.
inline std::pair<double, double> error_scores(std::span<const Label> truth,
                                              std::span<const double> scores) {
  if (truth.size() != scores.size())
    throw DataError("truth/score length mismatch: " + std::to_string(truth.size()) + " vs " +
                    std::to_string(scores.size()));
  if (truth.empty()) throw DataError("empty score sequences");
  double abs_sum = 0.0, sq_sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!(scores[i] >= 0.0 && scores[i] <= 1.0))
      throw DataError("score outside [0, 1] at index " + std::to_string(i));
    double diff = (truth[i] == Label::Yes ? 1.0 : 0.0) - scores[i];
    abs_sum += std::abs(diff);
    sq_sum += diff * diff;
  }
  const double n = static_cast<double>(truth.size());
  return {abs_sum / n, std::sqrt(sq_sum / n)};
}

// Full report from parallel label sequences; when `scores` is non-empty
// it must align with the labels and feeds MAE/RMSE.
inline EvalReport report(std::span<const Label> human, std::span<const Label> machine,
                         std::span<const double> scores = {}) {
  EvalReport rep = metrics(confusion(human, machine));
  if (!scores.empty()) {
    auto [mae, rmse] = error_scores(human, scores);
    rep.mae = mae;
    rep.rmse = rmse;
  }
  return rep;
}

namespace detail {

inline std::string fixed(double v, int decimals) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(decimals) << v;
  return ss.str();
}

}  // namespace detail

// Plain-text report: metric rows in the order MAE, RMSE, Kappa,
// Precision, Recall, F-Measure (4-decimal, 3-decimal in parentheses),
// then the confusion matrix with human rows and machine columns.
inline std::string render_text(const EvalReport& report, const std::string& title) {
  std::ostringstream out;
  out << title << '\n';
  auto row = [&out](const std::string& name, double value) {
    out << std::left << std::setw(24) << name << detail::fixed(value, 4) << "  ("
        << detail::fixed(value, 3) << ")\n";
  };
  if (report.mae) row("Mean Absolute Error", *report.mae);
  if (report.rmse) row("Root Mean Square Error", *report.rmse);
  row("Kappa Statistics", report.kappa);
  row("Precision", report.weighted.precision);
  row("Recall", report.weighted.recall);
  row("F-Measure", report.weighted.f1);
  row("Accuracy", report.accuracy);
  out << '\n';
  out << "Per class            precision   recall  f-measure\n";
  for (const auto& [name, cls] : {std::pair{"Yes", report.yes}, std::pair{"No", report.no}}) {
    out << std::left << std::setw(20) << name << std::right << std::setw(10)
        << detail::fixed(cls.precision, 4) << std::setw(9) << detail::fixed(cls.recall, 4)
        << std::setw(11) << detail::fixed(cls.f1, 4) << '\n';
  }
  out << '\n';
  const ConfusionMatrix& cm = report.confusion;
  out << "Human \\ Machine      Yes       No    Total\n";
  auto matrix_row = [&out](const std::string& name, long long a, long long b, long long c) {
    out << std::left << std::setw(16) << name << std::right << std::setw(8) << a
        << std::setw(9) << b << std::setw(9) << c << '\n';
  };
  matrix_row("Yes", cm.yes_yes, cm.yes_no, cm.human_yes());
  matrix_row("No", cm.no_yes, cm.no_no, cm.human_no());
  matrix_row("Total", cm.machine_yes(), cm.machine_no(), cm.total());
  out << '\n';
  out << "Agreements " << cm.agreements() << ", disagreements " << cm.disagreements() << '\n';
  for (const std::string& flag : report.flags) out << "note: " << flag << '\n';
  return out.str();
}

inline nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["version"] = kFormatVersion;
  j["kind"] = "eval_report";
  j["confusion"] = {{"yes_yes", report.confusion.yes_yes},
                    {"yes_no", report.confusion.yes_no},
                    {"no_yes", report.confusion.no_yes},
                    {"no_no", report.confusion.no_no}};
  j["accuracy"] = report.accuracy;
  j["kappa"] = report.kappa;
  j["per_class"] = {{"yes",
                     {{"precision", report.yes.precision},
                      {"recall", report.yes.recall},
                      {"f1", report.yes.f1}}},
                    {"no",
                     {{"precision", report.no.precision},
                      {"recall", report.no.recall},
                      {"f1", report.no.f1}}}};
  j["weighted"] = {{"precision", report.weighted.precision},
                   {"recall", report.weighted.recall},
                   {"f1", report.weighted.f1}};
  j["agreements"] = report.confusion.agreements();
  j["disagreements"] = report.confusion.disagreements();
  if (report.mae) j["mae"] = *report.mae;
  if (report.rmse) j["rmse"] = *report.rmse;
  j["flags"] = report.flags;
  return j;
}

}  // namespace simplegate
