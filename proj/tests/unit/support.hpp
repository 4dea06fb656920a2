#pragma once

#include "inls/inls.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>

namespace inls::test {

/// Shooting is the expensive step of most suites; solve each parameter set once per process.
inline const GroundState& ground(int N, double b, double p) {
  static std::map<std::tuple<int, double, double>, GroundState> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(N, b, p);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, shoot(Params{N, b, p})).first;
  return it->second;
}

/// Reference values produced by the independent scipy shooting oracle.
struct OracleEntry {
  double shoot_value, mass, grad_sq, potential;
};

inline OracleEntry oracle(int N, double b, double p) {
  std::ifstream in(std::string(INLS_FIXTURE_DIR) + "/ground_states.json");
  if (!in) throw std::runtime_error("missing ground_states.json fixture");
  auto doc = nlohmann::json::parse(in);
  for (const auto& e : doc.at("ground_states")) {
    const auto& prm = e.at("params");
    if (prm.at("N").get<int>() == N && prm.at("b").get<double>() == b && prm.at("p").get<double>() == p)
      return {e.at("shoot_value"), e.at("mass"), e.at("grad_sq"), e.at("potential")};
  }
  throw std::runtime_error("no oracle entry for these parameters");
}

inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace inls::test
