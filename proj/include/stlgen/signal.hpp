#pragma once

#include <map>
#include <string>
#include <vector>

#include "stlgen/errors.hpp"

namespace stlgen {

/// A uniformly sampled multi-variable trace. All channels have the same
/// length N >= 1; sample i corresponds to time i * dt; the horizon is
/// (N - 1) * dt.
struct Signal {
  double dt = 1.0;
  std::map<std::string, std::vector<double>> channels;

  std::size_t sample_count() const {
    return channels.empty() ? 0 : channels.begin()->second.size();
  }
  double horizon() const { return dt * (static_cast<double>(sample_count()) - 1); }

  const std::vector<double>& channel(const std::string& name) const;

  /// Validates non-empty equal-length channels and dt > 0.
  void validate() const;
};

/// Loads a CSV trace with header "time,var1,var2,...". Rows must carry
/// strictly increasing, uniformly spaced times (1e-9 relative tolerance).
Signal load_signal_csv(const std::string& path);

Signal parse_signal_csv(const std::string& content, const std::string& origin = "<string>");

}  // namespace stlgen
