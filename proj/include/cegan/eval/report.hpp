#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "cegan/eval/baselines.hpp"

namespace cegan {

enum class Split { kInSample, kValidation, kOutSample };
std::string to_string(Split split);
Split parse_split(const std::string& name);

enum class Metric { kSqrtPehe, kAteError, kTreatmentXent, kOutcomeGap, kDEncoder, kDDecoder };
std::string to_string(Metric metric);
Metric parse_metric(const std::string& name);
// PEHE/ATE apply to every method; the intermediate-prediction diagnostics to
// the two network methods; discriminator means to full CEGAN only.
bool metric_applies(Metric metric, MethodId method);

struct MetricValue {
  Split split = Split::kOutSample;
  Metric metric = Metric::kSqrtPehe;
  double value = 0.0;
  bool operator==(const MetricValue&) const = default;
};

struct RealizationRecord {
  std::size_t realization = 0;
  MethodId method = MethodId::kLr1;
  std::vector<MetricValue> values;
  bool operator==(const RealizationRecord&) const = default;
};

struct MethodFailure {
  std::size_t realization = 0;
  MethodId method = MethodId::kLr1;
  std::string message;
  bool operator==(const MethodFailure&) const = default;
};

struct SummaryRow {
  MethodId method = MethodId::kLr1;
  Split split = Split::kOutSample;
  Metric metric = Metric::kSqrtPehe;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single realization
  std::size_t count = 0;
  bool operator==(const SummaryRow&) const = default;
};

struct EvalReport {
  std::string config_fingerprint;
  std::size_t realizations = 0;
  std::vector<MethodId> methods;
  std::vector<Split> splits;
  std::vector<Metric> metrics;
  std::vector<RealizationRecord> records;  // sorted by (realization, method order)
  std::vector<MethodFailure> failures;
  std::vector<SummaryRow> summary;

  std::size_t warning_count() const { return failures.size(); }
  const SummaryRow* find(MethodId method, Split split, Metric metric) const;
  // Throws std::out_of_range when the row is absent.
  double mean(MethodId method, Split split, Metric metric) const;

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
  void write_json(std::ostream& out) const;
  // Columns method,split,metric,mean,std,R; one row per summary entry.
  void write_csv(std::ostream& out) const;

  bool operator==(const EvalReport&) const = default;
};

// Mean and sample std per (method, split, metric) over the records, in the
// order methods x splits x metrics. Combinations with no values are skipped.
std::vector<SummaryRow> summarize(const std::vector<RealizationRecord>& records, const std::vector<MethodId>& methods,
                                  const std::vector<Split>& splits, const std::vector<Metric>& metrics);

}  // namespace cegan
