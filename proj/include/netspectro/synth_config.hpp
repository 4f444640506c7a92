#ifndef NETSPECTRO_SYNTH_CONFIG_HPP
#define NETSPECTRO_SYNTH_CONFIG_HPP

#include <istream>
#include <string>

#include <json.hpp>

#include "netspectro/errors.hpp"
#include "netspectro/synth.hpp"

namespace netspectro {

/// Parse a generator spec from JSON:
/// {
///   "duration_s": 20000,
///   "seed": 1,
///   "components": [
///     {"type": "poisson", "rate_pps": 2.0},
///     {"type": "burst", "period_s": 30, "packets_per_burst": 1,
///      "burst_len_s": 0, "jitter_sd_s": 0.1, "active_s": [0, 10000]},
///     {"type": "sine", "base_rate_pps": 50, "mod_depth": 0.8, "period_s": 50},
///     {"type": "flap", "keepalive_period_s": 30, "flap_burst_rate_pps": 5,
///      "damp_period_s": 3600, "duty": 0.5}
///   ]
/// }
/// Unknown component types and missing required fields are rejected; the
/// numeric constraints are checked by validate() afterwards.
inline gen_spec parse_gen_spec(const nlohmann::json& j) {
  gen_spec spec;
  try {
    spec.duration_s = j.at("duration_s").get<double>();
    spec.seed = j.value("seed", std::uint64_t{0});
    for (const auto& cj : j.at("components")) {
      const std::string type = cj.at("type").get<std::string>();
      if (type == "poisson") {
        poisson_background c;
        c.rate_pps = cj.at("rate_pps").get<double>();
        spec.components.emplace_back(c);
      } else if (type == "burst") {
        periodic_burst c;
        c.period_s = cj.at("period_s").get<double>();
        c.burst_len_s = cj.value("burst_len_s", 0.0);
        c.packets_per_burst = cj.value("packets_per_burst", std::uint64_t{1});
        c.jitter_sd_s = cj.value("jitter_sd_s", 0.0);
        if (cj.contains("active_s")) {
          const auto& w = cj.at("active_s");
          c.active_s = {{w.at(0).get<double>(), w.at(1).get<double>()}};
        }
        spec.components.emplace_back(c);
      } else if (type == "sine") {
        sine_rate c;
        c.base_rate_pps = cj.at("base_rate_pps").get<double>();
        c.mod_depth = cj.value("mod_depth", 0.0);
        c.period_s = cj.at("period_s").get<double>();
        spec.components.emplace_back(c);
      } else if (type == "flap") {
        flap_pattern c;
        c.keepalive_period_s = cj.value("keepalive_period_s", 30.0);
        c.flap_burst_rate_pps = cj.value("flap_burst_rate_pps", 5.0);
        c.damp_period_s = cj.value("damp_period_s", 3600.0);
        c.duty = cj.value("duty", 0.5);
        spec.components.emplace_back(c);
      } else {
        throw invalid_spec("unknown component type '" + type + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw invalid_spec(e.what());
  }
  validate(spec);
  return spec;
}

inline gen_spec parse_gen_spec(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_spec(e.what());
  }
  return parse_gen_spec(j);
}

}  // namespace netspectro

#endif
