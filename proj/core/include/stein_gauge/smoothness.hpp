#pragma once

namespace stein_gauge {

/// Strong log-concavity constant k and bounds L3 >= M3(log p), L4 >= M4(log p).
struct SmoothnessBudget {
  double k = 1.0;
  double l3 = 0.0;
  double l4 = 0.0;

  /// Throws InputError unless k > 0 and l3, l4 >= 0 (all finite).
  void validate() const;
};

}  // namespace stein_gauge
