#pragma once

// JSON configuration schema.
//
// {
//   "omega_m_hz": 1.0e7,                    // optional, diagnostics only
//   "chain": [
//     { "kappa_a_hz": 4e5, "kappa_b_hz": 4e5,
//       "g_a_hz": 1e4, "g_b_hz": 1.5e4,
//       "gamma_m_hz": 100.0, "n_th": 0.0 },
//     { ..., "eta_a": 0.95, "eta_b": 0.95 } // links required after cavity 1
//   ]
// }
//
// All *_hz values are ordinary frequencies (rate / 2pi); they are converted
// to angular rates on parse. Unknown keys are errors. A cavity may replace
// g_a_hz / g_b_hz with a pump_a / pump_b block, from which the effective
// coupling is derived via the classical steady state:
//   { "power_w": 1e-3, "kappa_in_hz": 1e4, "nu_hz": 2.82e14,
//     "omega_c_hz": 2.82e14, "length_m": 1e-3, "mass_kg": 1e-12,
//     "omega_m_hz": 1e7 }
// (the cavity's kappa_*_hz and gamma_m_hz complete the pump parameters).

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cascade/model.hpp"

namespace cascade {

using nlohmann::json;

namespace detail {

inline void check_keys(const json& obj, const std::vector<std::string>& allowed,
                       const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const auto& key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

inline double get_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + ": key '" + key + "' must be a number");
  return v.get<double>();
}

inline std::optional<double> get_optional_number(const json& obj, const std::string& key,
                                                 const std::string& where) {
  if (!obj.contains(key)) return std::nullopt;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + ": key '" + key + "' must be a number");
  return v.get<double>();
}

inline PumpParams parse_pump(const json& obj, double kappa, double gamma_m,
                             const std::string& where) {
  check_keys(obj,
             {"power_w", "kappa_in_hz", "nu_hz", "omega_c_hz", "length_m", "mass_kg",
              "omega_m_hz"},
             where);
  PumpParams pump;
  pump.power = get_number(obj, "power_w", where);
  pump.kappa_in = hz(get_number(obj, "kappa_in_hz", where));
  pump.nu = hz(get_number(obj, "nu_hz", where));
  pump.omega_c = hz(get_number(obj, "omega_c_hz", where));
  pump.length = get_number(obj, "length_m", where);
  pump.mass = get_number(obj, "mass_kg", where);
  pump.omega_m = hz(get_number(obj, "omega_m_hz", where));
  pump.kappa = kappa;
  pump.gamma_m = gamma_m;
  return pump;
}

}  // namespace detail

inline ChainConfig parse_chain_config(const json& root) {
  detail::check_keys(root, {"chain", "omega_m_hz"}, "config");
  if (!root.contains("chain") || !root.at("chain").is_array())
    throw ConfigError("config: 'chain' must be an array of cavity objects");

  ChainConfig cfg;
  if (auto wm = detail::get_optional_number(root, "omega_m_hz", "config")) cfg.omega_m = hz(*wm);

  std::size_t index = 0;
  for (const json& c : root.at("chain")) {
    const std::string where = "chain[" + std::to_string(index) + "]";
    detail::check_keys(c,
                       {"kappa_a_hz", "kappa_b_hz", "g_a_hz", "g_b_hz", "gamma_m_hz", "n_th",
                        "eta_a", "eta_b", "pump_a", "pump_b"},
                       where);
    CavityParams cav;
    cav.parity = (index % 2 == 0) ? Parity::odd : Parity::even;
    cav.kappa_a = hz(detail::get_number(c, "kappa_a_hz", where));
    cav.kappa_b = hz(detail::get_number(c, "kappa_b_hz", where));
    cav.gamma_m = hz(detail::get_number(c, "gamma_m_hz", where));
    cav.n_th = detail::get_number(c, "n_th", where);

    for (const char* side : {"a", "b"}) {
      const std::string g_key = std::string("g_") + side + "_hz";
      const std::string pump_key = std::string("pump_") + side;
      const bool has_g = c.contains(g_key);
      const bool has_pump = c.contains(pump_key);
      if (has_g == has_pump)
        throw ConfigError(where + ": exactly one of '" + g_key + "' and '" + pump_key +
                          "' must be given");
      double g = 0;
      if (has_g) {
        g = hz(detail::get_number(c, g_key, where));
      } else {
        const double kappa = side[0] == 'a' ? cav.kappa_a : cav.kappa_b;
        const PumpParams pump =
            detail::parse_pump(c.at(pump_key), kappa, cav.gamma_m, where + "." + pump_key);
        g = effective_coupling(pump).coupling;
      }
      (side[0] == 'a' ? cav.g_a : cav.g_b) = g;
    }

    const auto eta_a = detail::get_optional_number(c, "eta_a", where);
    const auto eta_b = detail::get_optional_number(c, "eta_b", where);
    if (index == 0) {
      if (eta_a || eta_b)
        throw ConfigError(where + ": link efficiencies are not allowed on the first cavity");
    } else {
      // A missing link efficiency means a lossless link.
      cav.eta_a = eta_a.value_or(1.0);
      cav.eta_b = eta_b.value_or(1.0);
    }
    cfg.cavities.push_back(cav);
    ++index;
  }
  return cfg;
}

inline ChainConfig parse_chain_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: JSON parse error: ") + e.what());
  }
  return parse_chain_config(root);
}

inline ChainConfig load_chain_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_chain_config(text.str());
}

/// Fully resolved config (derived couplings materialized), in the Hz-based
/// schema. parse(chain_config_to_json(cfg)) reproduces cfg.
inline json chain_config_to_json(const ChainConfig& cfg) {
  json root;
  if (cfg.omega_m) root["omega_m_hz"] = to_hz(*cfg.omega_m);
  root["chain"] = json::array();
  for (std::size_t j = 0; j < cfg.cavities.size(); ++j) {
    const CavityParams& cav = cfg.cavities[j];
    json c;
    c["kappa_a_hz"] = to_hz(cav.kappa_a);
    c["kappa_b_hz"] = to_hz(cav.kappa_b);
    c["g_a_hz"] = to_hz(cav.g_a);
    c["g_b_hz"] = to_hz(cav.g_b);
    c["gamma_m_hz"] = to_hz(cav.gamma_m);
    c["n_th"] = cav.n_th;
    if (j > 0) {
      c["eta_a"] = cav.eta_a.value_or(1.0);
      c["eta_b"] = cav.eta_b.value_or(1.0);
    }
    root["chain"].push_back(c);
  }
  return root;
}

inline json diagnostics_to_json(const std::vector<Diagnostic>& diags) {
  json out = json::array();
  for (const auto& d : diags)
    out.push_back({{"severity", severity_name(d.severity)},
                   {"code", d.code},
                   {"message", d.message}});
  return out;
}

}  // namespace cascade
