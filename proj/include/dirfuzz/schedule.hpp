#pragma once

// Annealing power schedule. Temperature cools exponentially from 1 so
// that it crosses 0.05 exactly when the exploration budget t_x runs out;
// capabilityW blends the input's compound factor against the neutral 0.5
// as the campaign cools, and the energy multiplier spans 2^-2..2^8 across
// the capability range.

#include <cmath>
#include <cstdint>

#include "dirfuzz/errors.hpp"

namespace dirfuzz {

struct ScheduleConfig {
  double tx = 1.0;          // exploration budget, seconds or virtual units
  double alpha = 0.9;       // cooling base; the closed form keeps T independent of it
  int64_t base_energy = 100;
  double t0 = 1.0;

  void validate() const {
    if (!(tx > 0.0)) throw ValidationError("tx must be positive");
    if (!(alpha >= 0.8 && alpha <= 0.99))
      throw ValidationError("alpha must lie in [0.8, 0.99]");
    if (base_energy <= 0) throw ValidationError("base_energy must be positive");
    if (t0 != 1.0) throw ValidationError("t0 is fixed at 1");
  }
};

inline double temperature(double t, const ScheduleConfig& cfg) {
  return std::pow(20.0, -t / cfg.tx) * cfg.t0;
}

inline double capability_w(double cfw, double temp) {
  return cfw * (1.0 - temp) + 0.5 * temp;
}

inline int64_t ets_energy(int64_t base, double capability) {
  double e = static_cast<double>(base) * std::pow(2.0, (capability - 0.2) * 10.0);
  int64_t rounded = static_cast<int64_t>(std::llround(e));
  return rounded < 1 ? 1 : rounded;
}

}  // namespace dirfuzz
