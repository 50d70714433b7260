#include "cegan/eval/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace cegan {
namespace {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename E, typename Parse>
std::vector<E> parse_list(const json& j, Parse parse) {
  std::vector<E> out;
  for (const auto& v : j) out.push_back(parse(v.template get<std::string>()));
  return out;
}

template <typename E>
json name_list(const std::vector<E>& items) {
  json out = json::array();
  for (const E& e : items) out.push_back(to_string(e));
  return out;
}

}  // namespace

std::string to_string(Split split) {
  switch (split) {
    case Split::kInSample: return "in-sample";
    case Split::kValidation: return "valid";
    case Split::kOutSample: return "out-sample";
  }
  return "?";
}

Split parse_split(const std::string& name) {
  for (Split s : {Split::kInSample, Split::kValidation, Split::kOutSample}) {
    if (to_string(s) == name) return s;
  }
  throw ValidationError("unknown split '" + name + "'");
}

std::string to_string(Metric metric) {
  switch (metric) {
    case Metric::kSqrtPehe: return "sqrt-pehe";
    case Metric::kAteError: return "ate-error";
    case Metric::kTreatmentXent: return "treatment-xent";
    case Metric::kOutcomeGap: return "outcome-gap";
    case Metric::kDEncoder: return "d-encoder";
    case Metric::kDDecoder: return "d-decoder";
  }
  return "?";
}

Metric parse_metric(const std::string& name) {
  for (Metric m : {Metric::kSqrtPehe, Metric::kAteError, Metric::kTreatmentXent, Metric::kOutcomeGap,
                   Metric::kDEncoder, Metric::kDDecoder}) {
    if (to_string(m) == name) return m;
  }
  throw ValidationError("unknown metric '" + name + "'");
}

bool metric_applies(Metric metric, MethodId method) {
  switch (metric) {
    case Metric::kSqrtPehe:
    case Metric::kAteError:
      return true;
    case Metric::kTreatmentXent:
    case Metric::kOutcomeGap:
      return method == MethodId::kCegan || method == MethodId::kCeganLp;
    case Metric::kDEncoder:
    case Metric::kDDecoder:
      return method == MethodId::kCegan;
  }
  return false;
}

std::vector<SummaryRow> summarize(const std::vector<RealizationRecord>& records, const std::vector<MethodId>& methods,
                                  const std::vector<Split>& splits, const std::vector<Metric>& metrics) {
  std::vector<SummaryRow> out;
  for (MethodId method : methods) {
    for (Split split : splits) {
      for (Metric metric : metrics) {
        std::vector<double> values;
        for (const RealizationRecord& r : records) {
          if (r.method != method) continue;
          for (const MetricValue& v : r.values) {
            if (v.split == split && v.metric == metric) values.push_back(v.value);
          }
        }
        if (values.empty()) continue;
        double sum = 0.0;
        for (double v : values) sum += v;
        const double mean = sum / static_cast<double>(values.size());
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        const double sd = values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
        out.push_back(SummaryRow{method, split, metric, mean, sd, values.size()});
      }
    }
  }
  return out;
}

const SummaryRow* EvalReport::find(MethodId method, Split split, Metric metric) const {
  for (const SummaryRow& row : summary) {
    if (row.method == method && row.split == split && row.metric == metric) return &row;
  }
  return nullptr;
}

double EvalReport::mean(MethodId method, Split split, Metric metric) const {
  const SummaryRow* row = find(method, split, metric);
  if (row == nullptr) {
    throw std::out_of_range("report has no " + to_string(method) + "/" + to_string(split) + "/" + to_string(metric));
  }
  return row->mean;
}

json EvalReport::to_json() const {
  json recs = json::array();
  for (const RealizationRecord& r : records) {
    json values = json::array();
    for (const MetricValue& v : r.values) {
      values.push_back(json{{"split", to_string(v.split)}, {"metric", to_string(v.metric)}, {"value", v.value}});
    }
    recs.push_back(json{{"realization", r.realization}, {"method", to_string(r.method)}, {"values", values}});
  }
  json fails = json::array();
  for (const MethodFailure& f : failures) {
    fails.push_back(json{{"realization", f.realization}, {"method", to_string(f.method)}, {"message", f.message}});
  }
  json rows = json::array();
  for (const SummaryRow& s : summary) {
    rows.push_back(json{{"method", to_string(s.method)},
                        {"split", to_string(s.split)},
                        {"metric", to_string(s.metric)},
                        {"mean", s.mean},
                        {"std", s.std},
                        {"count", s.count}});
  }
  return json{{"format", "cegan-eval-report"},
              {"config_fingerprint", config_fingerprint},
              {"realizations", realizations},
              {"methods", name_list(methods)},
              {"splits", name_list(splits)},
              {"metrics", name_list(metrics)},
              {"summary", rows},
              {"warnings", failures.size()},
              {"failures", fails},
              {"records", recs}};
}

EvalReport EvalReport::from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != "cegan-eval-report") throw ValidationError("not an eval report");
    EvalReport r;
    r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    r.realizations = j.at("realizations").get<std::size_t>();
    r.methods = parse_list<MethodId>(j.at("methods"), parse_method_id);
    r.splits = parse_list<Split>(j.at("splits"), parse_split);
    r.metrics = parse_list<Metric>(j.at("metrics"), parse_metric);
    for (const auto& s : j.at("summary")) {
      r.summary.push_back(SummaryRow{parse_method_id(s.at("method").get<std::string>()),
                                     parse_split(s.at("split").get<std::string>()),
                                     parse_metric(s.at("metric").get<std::string>()), s.at("mean").get<double>(),
                                     s.at("std").get<double>(), s.at("count").get<std::size_t>()});
    }
    for (const auto& f : j.at("failures")) {
      r.failures.push_back(MethodFailure{f.at("realization").get<std::size_t>(),
                                         parse_method_id(f.at("method").get<std::string>()),
                                         f.at("message").get<std::string>()});
    }
    for (const auto& rec : j.at("records")) {
      RealizationRecord out;
      out.realization = rec.at("realization").get<std::size_t>();
      out.method = parse_method_id(rec.at("method").get<std::string>());
      for (const auto& v : rec.at("values")) {
        out.values.push_back(MetricValue{parse_split(v.at("split").get<std::string>()),
                                         parse_metric(v.at("metric").get<std::string>()), v.at("value").get<double>()});
      }
      r.records.push_back(std::move(out));
    }
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed eval report: ") + e.what());
  }
}

void EvalReport::write_json(std::ostream& out) const { out << to_json().dump(2) << '\n'; }

void EvalReport::write_csv(std::ostream& out) const {
  out << "method,split,metric,mean,std,R\n";
  for (const SummaryRow& s : summary) {
    out << to_string(s.method) << ',' << to_string(s.split) << ',' << to_string(s.metric) << ','
        << format_double(s.mean) << ',' << format_double(s.std) << ',' << s.count << '\n';
  }
}

}  // namespace cegan
