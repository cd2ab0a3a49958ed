#include "finsler/app/report.hpp"

#include <cmath>

namespace finsler::app {

using nlohmann::json;

CheckAccumulator::CheckAccumulator(std::string name, std::string anchor, double tolerance) {
  r_.name = std::move(name);
  r_.anchor = std::move(anchor);
  r_.tolerance = tolerance;
}

void CheckAccumulator::add(double residual, const std::string& where) {
  ++r_.samples;
  if (std::isnan(residual)) {
    failed_ = true;
    if (r_.worst.empty()) r_.worst = "NaN at " + where;
    return;
  }
  if (residual > r_.value || r_.worst.empty()) {
    r_.value = std::max(r_.value, residual);
    r_.worst = where;
  }
}

void CheckAccumulator::fail(const std::string& why) {
  ++r_.samples;
  failed_ = true;
  r_.worst = why;
}

CheckRecord CheckAccumulator::finish() const {
  CheckRecord r = r_;
  r.pass = !failed_ && r.value <= r.tolerance;
  return r;
}

bool Report::pass() const { return failed() == 0; }

int Report::failed() const {
  int k = 0;
  for (const auto& c : checks) k += c.pass ? 0 : 1;
  return k;
}

json to_json(const CheckRecord& r) {
  return {{"name", r.name},           {"anchor", r.anchor}, {"statistic", r.statistic},
          {"value", r.value},         {"tolerance", r.tolerance}, {"pass", r.pass},
          {"samples", r.samples},     {"worst", r.worst}};
}

json to_json(const ConformalReport& r) {
  json samples = json::array();
  for (const auto& s : r.omega_samples)
    samples.push_back({{"x", s.sample.x}, {"y", s.sample.y}, {"omega", s.omega}, {"residual", s.residual}});
  return {{"field", r.field},
          {"verdict", to_string(r.verdict)},
          {"omega_mean", r.omega_mean},
          {"omega_spread", r.omega_spread},
          {"max_residual", r.max_residual},
          {"outlier_count", r.outlier_count},
          {"vertical_gradient_max", r.vertical_gradient_max},
          {"vertical_spread_max", r.vertical_spread_max},
          {"horizontal_gradient_max", r.horizontal_gradient_max},
          {"lie_n_max", r.lie_n_max},
          {"gamma_zero_identity_max", r.gamma_zero_identity_max},
          {"constancy_scope", "sampled grid only"},
          {"omega_samples", samples}};
}

json to_json(const TensorValue& t) {
  json sig = json::array();
  for (const auto& s : t.signature())
    sig.push_back({{"name", s.name}, {"variance", s.variance == Variance::upper ? "upper" : "lower"}});
  return {{"shape", t.shape()}, {"signature", sig}, {"data", t.data()}};
}

json report_body(const Report& r) {
  json checks = json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  json out = {{"command", r.command},
              {"config", r.config},
              {"summary",
               {{"pass", r.pass()},
                {"checks", static_cast<int>(r.checks.size())},
                {"failed", r.failed()},
                {"mode", r.mode}}},
              {"checks", checks},
              {"classification", r.classification}};
  if (!r.tensors.is_null()) out["tensors"] = r.tensors;
  if (!r.notes.empty()) out["notes"] = r.notes;
  return out;
}

std::string render_report(const Report& r, double seconds) {
  json out = report_body(r);
  out["timing"] = {{"seconds", seconds}};
  return out.dump(2) + "\n";
}

}  // namespace finsler::app
