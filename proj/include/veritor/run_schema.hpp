#pragma once

// Allowed and required config keys per task. Unknown keys are rejected so a
// typo such as "circle.rr" fails loudly instead of silently using a default.

#include <string>
#include <vector>

namespace veritor {

inline const std::vector<std::string>& integrator_keys() {
  static const std::vector<std::string> k = {
      "integrator.order", "integrator.h_min", "integrator.h_max",
      "integrator.tolerance", "integrator.qr_every"};
  return k;
}

inline std::vector<std::string> with_common(std::vector<std::string> keys) {
  keys.insert(keys.end(), {"task", "system", "out", "threads"});
  const auto& ik = integrator_keys();
  keys.insert(keys.end(), ik.begin(), ik.end());
  return keys;
}

inline std::vector<std::string> circle_allowed_keys() {
  return with_common({"vdp.v", "vdp.eps", "circle.seed_file", "circle.r",
                      "circle.a", "circle.m", "circle.k_cap"});
}

inline std::vector<std::string> circle_required_keys() {
  return {"task", "system", "vdp.v", "vdp.eps", "circle.seed_file",
          "circle.r", "circle.a"};
}

inline std::vector<std::string> langford_keys() {
  return {"langford.alpha", "langford.beta", "langford.gamma",
          "langford.delta", "langford.eps", "langford.zeta"};
}

inline std::vector<std::string> periodic_allowed_keys() {
  auto keys = with_common(langford_keys());
  keys.insert(keys.end(), {"orbit.period", "orbit.attractor", "orbit.saddle",
                           "newton.radius", "newton.polish"});
  return keys;
}

inline std::vector<std::string> periodic_required_keys() {
  return {"task", "system", "langford.alpha"};
}

inline std::vector<std::string> connection_allowed_keys() {
  auto keys = with_common(langford_keys());
  keys.insert(keys.end(),
              {"orbit.period", "orbit.attractor", "orbit.saddle",
               "newton.radius", "newton.polish", "connection.A1",
               "connection.A2", "connection.B1", "connection.B2",
               "connection.L", "connection.m", "connection.lambda",
               "connection.x_bar", "connection.I", "connection.n",
               "connection.fragments", "connection.fragment_cap",
               "connection.claim1_only"});
  return keys;
}

inline std::vector<std::string> connection_required_keys() {
  return {"task",           "system",          "langford.alpha",
          "orbit.attractor", "orbit.saddle",   "connection.A1",
          "connection.A2",  "connection.B1",   "connection.B2",
          "connection.L",   "connection.x_bar", "connection.I"};
}

}  // namespace veritor
