#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace ucgan::metrics {

struct PairMetrics {
  std::string id;
  double d_lambda = 0.0;
  double d_s = 0.0;
  double qnr = 0.0;
  // Present only when a reference image was available (Wald mode).
  std::optional<double> sam_deg;
  std::optional<double> ergas;
  std::optional<double> ssim;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

MeanStd mean_std(const std::vector<double>& values);

struct MetricReport {
  std::string method;
  std::string mode;
  std::vector<PairMetrics> pairs;

  /// Aggregates per metric; reference metrics appear only if every pair has them.
  nlohmann::json summary() const;
  /// {"method", "mode", "pairs": [...], "summary": {...}, "ideal": {...}}
  nlohmann::json to_json() const;
};

/// Ideal value of each metric: D_lambda 0, D_s 0, QNR 1, SAM 0, ERGAS 0, SSIM 1.
nlohmann::json ideal_values();

}  // namespace ucgan::metrics
