#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

namespace hermite_nc {

/// One slice of a fitted-constant probe (e.g. a fixed R in an R-sweep).
struct ProbeSlice {
  std::string label;
  double fitted_constant = 0.0;
  std::vector<double> worst;  // coordinates of the maximizing sample
};

/// Outcome of a kernel-bound or domination probe: the fitted constant is
/// the maximum of the recorded |quantity| / envelope ratios; "stable"
/// means the fit does not drift across slices by more than the
/// configured factor.
struct ProbeReport {
  std::string name;
  std::vector<ProbeSlice> slices;
  double fitted_constant = 0.0;
  std::vector<double> worst;
  double stability_factor = 1.0;  // max slice constant / min slice constant
  double stability_threshold = 4.0;
  bool stable = true;
  bool pass = true;
  std::string notes;

  void record(const std::string& label, double ratio,
              const std::vector<double>& coords) {
    for (auto& s : slices) {
      if (s.label != label) continue;
      if (ratio > s.fitted_constant) {
        s.fitted_constant = ratio;
        s.worst = coords;
      }
      return;
    }
    slices.push_back({label, ratio, coords});
  }

  /// Computes the overall constant and the slice stability flag.
  void finalize() {
    fitted_constant = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& s : slices) {
      if (s.fitted_constant > fitted_constant) {
        fitted_constant = s.fitted_constant;
        worst = s.worst;
      }
      lo = std::min(lo, s.fitted_constant);
      hi = std::max(hi, s.fitted_constant);
    }
    stability_factor = (lo > 0.0 && !slices.empty()) ? hi / lo : 1.0;
    stable = stability_factor <= stability_threshold &&
             std::isfinite(fitted_constant);
    pass = stable;
  }

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["name"] = name;
    j["fitted_constant"] = fitted_constant;
    j["worst"] = worst;
    j["stability_factor"] = stability_factor;
    j["stability_threshold"] = stability_threshold;
    j["stable"] = stable;
    j["pass"] = pass;
    if (!notes.empty()) j["notes"] = notes;
    j["slices"] = nlohmann::json::array();
    for (const auto& s : slices)
      j["slices"].push_back({{"label", s.label},
                             {"fitted_constant", s.fitted_constant},
                             {"worst", s.worst}});
    return j;
  }
};

}  // namespace hermite_nc
