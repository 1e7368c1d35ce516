#include "ucgan/metrics/report.hpp"

#include <cmath>
#include <functional>

namespace ucgan::metrics {

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd r;
  if (values.empty()) return r;
  for (double v : values) r.mean += v;
  r.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - r.mean) * (v - r.mean);
  r.std = std::sqrt(var / static_cast<double>(values.size()));
  return r;
}

nlohmann::json ideal_values() {
  return {{"d_lambda", 0.0}, {"d_s", 0.0}, {"qnr", 1.0}, {"sam", 0.0}, {"ergas", 0.0}, {"ssim", 1.0}};
}

nlohmann::json MetricReport::summary() const {
  nlohmann::json out = nlohmann::json::object();
  auto add = [&](const char* key, const std::function<std::optional<double>(const PairMetrics&)>& get) {
    std::vector<double> values;
    for (const auto& p : pairs) {
      auto v = get(p);
      if (!v) return;
      values.push_back(*v);
    }
    if (values.empty()) return;
    const auto ms = mean_std(values);
    out[key] = {{"mean", ms.mean}, {"std", ms.std}};
  };
  add("d_lambda", [](const PairMetrics& p) { return std::optional<double>(p.d_lambda); });
  add("d_s", [](const PairMetrics& p) { return std::optional<double>(p.d_s); });
  add("qnr", [](const PairMetrics& p) { return std::optional<double>(p.qnr); });
  add("sam", [](const PairMetrics& p) { return p.sam_deg; });
  add("ergas", [](const PairMetrics& p) { return p.ergas; });
  add("ssim", [](const PairMetrics& p) { return p.ssim; });
  return out;
}

nlohmann::json MetricReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& p : pairs) {
    nlohmann::json j = {{"id", p.id}, {"d_lambda", p.d_lambda}, {"d_s", p.d_s}, {"qnr", p.qnr}};
    if (p.sam_deg) j["sam"] = *p.sam_deg;
    if (p.ergas) j["ergas"] = *p.ergas;
    if (p.ssim) j["ssim"] = *p.ssim;
    list.push_back(std::move(j));
  }
  return {{"method", method}, {"mode", mode}, {"pairs", list}, {"summary", summary()}, {"ideal", ideal_values()}};
}

}  // namespace ucgan::metrics
