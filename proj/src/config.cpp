#include "fiberplan/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "fiberplan/units.hpp"

namespace fiberplan {

using nlohmann::json;

namespace {

enum class Dim {
  Attenuation, Beta0, Beta1, Beta2, Beta3, Gamma, Frequency, SymbolRate,
  CenterFrequency, Ratio, Power, Length
};

const char* dim_name(Dim d) {
  switch (d) {
    case Dim::Attenuation: return "attenuation";
    case Dim::Beta0: return "beta0";
    case Dim::Beta1: return "beta1";
    case Dim::Beta2: return "beta2";
    case Dim::Beta3: return "beta3";
    case Dim::Gamma: return "nonlinearity";
    case Dim::Frequency: return "frequency";
    case Dim::SymbolRate: return "symbol rate";
    case Dim::CenterFrequency: return "center frequency";
    case Dim::Ratio: return "ratio";
    case Dim::Power: return "power";
    case Dim::Length: return "length";
  }
  return "?";
}

double convert(double v, const std::string& unit, Dim dim, const std::string& where) {
  auto bad = [&]() -> double {
    throw ConfigError("unit error at '" + where + "': unit '" + unit + "' is not a valid " +
                      dim_name(dim) + " unit");
  };
  switch (dim) {
    case Dim::Attenuation:
      if (unit == "dB/km") return db_per_km_to_neper(v);
      if (unit == "1/km") return v;
      return bad();
    case Dim::Beta0:
      if (unit == "rad/km" || unit == "1/km") return v;
      return bad();
    case Dim::Beta1:
      if (unit == "ns/km") return v * 1e-9;
      if (unit == "ps/km") return v * 1e-12;
      if (unit == "s/km") return v;
      return bad();
    case Dim::Beta2:
      if (unit == "ps^2/km") return v * 1e-24;
      if (unit == "s^2/km") return v;
      return bad();
    case Dim::Beta3:
      if (unit == "ps^3/km") return v * 1e-36;
      if (unit == "s^3/km") return v;
      return bad();
    case Dim::Gamma:
      if (unit == "1/(W*km)" || unit == "1/(W km)" || unit == "1/(W.km)") return v;
      return bad();
    case Dim::SymbolRate:
      if (unit == "GBaud") return v * 1e9;
      if (unit == "Baud") return v;
      [[fallthrough]];
    case Dim::Frequency:
      if (unit == "Hz") return v;
      if (unit == "kHz") return v * 1e3;
      if (unit == "MHz") return v * 1e6;
      if (unit == "GHz") return v * 1e9;
      if (unit == "THz") return v * 1e12;
      return bad();
    case Dim::CenterFrequency:
      if (unit == "nm") return constants::light_speed / (v * 1e-9);
      if (unit == "Hz") return v;
      if (unit == "GHz") return v * 1e9;
      if (unit == "THz") return v * 1e12;
      return bad();
    case Dim::Ratio:
      if (unit == "dB") return db_to_linear(v);
      if (unit == "linear") return v;
      return bad();
    case Dim::Power:
      if (unit == "dBm") return dbm_to_watt(v);
      if (unit == "W") return v;
      if (unit == "mW") return v * 1e-3;
      return bad();
    case Dim::Length:
      if (unit == "km") return v;
      if (unit == "m") return v * 1e-3;
      return bad();
  }
  return bad();
}

const json& require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key))
    throw ConfigError("parse error: missing field '" + where + "." + key + "'");
  return obj.at(key);
}

/// A quantity is {"value": number, "unit": "..."}.
double quantity(const json& obj, const std::string& key, Dim dim, const std::string& where) {
  const json& q = require(obj, key, where);
  const std::string path = where + "." + key;
  if (!q.is_object()) throw ConfigError("unit error at '" + path + "': expected {value, unit}");
  if (!q.contains("unit") || !q.at("unit").is_string())
    throw ConfigError("unit error at '" + path + "': missing unit");
  if (!q.contains("value") || !q.at("value").is_number())
    throw ConfigError("parse error at '" + path + "': missing numeric value");
  return convert(q.at("value").get<double>(), q.at("unit").get<std::string>(), dim, path);
}

double quantity_or(const json& obj, const std::string& key, Dim dim, const std::string& where,
                   double fallback) {
  if (!obj.contains(key)) return fallback;
  return quantity(obj, key, dim, where);
}

AmplifierSpec parse_amplifier(const json& j, const std::string& where) {
  AmplifierSpec a;
  a.noise_figure = quantity(j, "noise_figure", Dim::Ratio, where);
  a.max_gain = quantity(j, "max_gain", Dim::Ratio, where);
  a.saturation_power = quantity(j, "saturation_power", Dim::Power, where);
  return a;
}

FiberSpec parse_fiber(const json& j, const std::string& where) {
  FiberSpec f;
  f.gamma = quantity(j, "gamma", Dim::Gamma, where);
  const json& modes = require(j, "modes", where);
  if (!modes.is_array() || modes.empty()) throw ConfigError("validation error: fiber needs D >= 1 modes");
  int next_id = 1;
  for (std::size_t i = 0; i < modes.size(); ++i) {
    const json& m = modes[i];
    const std::string w = where + ".modes[" + std::to_string(i) + "]";
    ModeSpec ms;
    ms.mode_id = m.value("mode_id", next_id);
    next_id = ms.mode_id + 1;
    ms.name = m.value("name", "mode" + std::to_string(ms.mode_id));
    ms.attenuation = quantity(m, "attenuation", Dim::Attenuation, w);
    ms.beta0 = quantity_or(m, "beta0", Dim::Beta0, w, 0.0);
    ms.beta1 = quantity_or(m, "beta1", Dim::Beta1, w, 0.0);
    ms.beta2 = quantity_or(m, "beta2", Dim::Beta2, w, 0.0);
    ms.beta3 = quantity_or(m, "beta3", Dim::Beta3, w, 0.0);
    f.modes.push_back(ms);
  }
  const auto d = f.modes.size();
  f.coupling = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  if (!j.contains("coupling")) {
    if (d != 1) throw ConfigError("parse error: '" + where + ".coupling' required for D > 1");
    f.coupling(0, 0) = 1.0;
    return f;
  }
  const json& c = j.at("coupling");
  const json& rows = c.is_object() ? require(c, "values", where + ".coupling") : c;
  if (!rows.is_array() || rows.size() != d)
    throw ConfigError("validation error: coupling must be a " + std::to_string(d) + "x" +
                      std::to_string(d) + " matrix");
  for (std::size_t p = 0; p < d; ++p) {
    if (!rows[p].is_array() || rows[p].size() != d)
      throw ConfigError("validation error: coupling row " + std::to_string(p) + " has wrong length");
    for (std::size_t q = 0; q < d; ++q) {
      if (!rows[p][q].is_number()) throw ConfigError("parse error: coupling entries must be numbers");
      f.coupling(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(q)) = rows[p][q].get<double>();
    }
  }
  return f;
}

int resolve_mode(const json& ref, const FiberSpec& fiber, const std::string& where) {
  if (ref.is_number_integer()) return ref.get<int>() - 1;
  if (ref.is_string()) {
    const auto name = ref.get<std::string>();
    for (std::size_t i = 0; i < fiber.modes.size(); ++i)
      if (fiber.modes[i].name == name) return static_cast<int>(i);
    throw ConfigError("validation error at '" + where + "': unknown mode '" + name + "'");
  }
  throw ConfigError("parse error at '" + where + "': mode must be an index or a name");
}

}  // namespace

std::vector<CarrierRoute> carrier_routes(const SystemConfig& cfg) {
  std::vector<CarrierRoute> routes(cfg.num_carriers());
  for (std::size_t lp = 0; lp < cfg.link.lightpaths.size(); ++lp) {
    const auto& path = cfg.link.lightpaths[lp];
    for (auto [ch, mode] : path.carriers) {
      auto& r = routes[cfg.carrier(static_cast<std::size_t>(ch), static_cast<std::size_t>(mode))];
      // Collisions are rejected by validate(); the first assignment wins here.
      if (r.active) continue;
      r.active = true;
      r.lightpath = lp;
      r.first_span = path.first_span;
      r.last_span = path.last_span;
      r.required_snr = path.required_snr;
    }
  }
  return routes;
}

SystemConfig load_system_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("parse error: top level must be an object");

  SystemConfig cfg;
  try {
    std::map<std::string, std::size_t> fiber_index;
    if (doc.contains("fibers")) {
      const json& fibers = doc.at("fibers");
      if (!fibers.is_array() || fibers.empty()) throw ConfigError("parse error: 'fibers' must be a non-empty array");
      for (std::size_t i = 0; i < fibers.size(); ++i) {
        cfg.fibers.push_back(parse_fiber(fibers[i], "fibers[" + std::to_string(i) + "]"));
        fiber_index[fibers[i].value("name", std::to_string(i))] = i;
      }
    } else {
      cfg.fibers.push_back(parse_fiber(require(doc, "fiber", "$"), "fiber"));
      fiber_index[doc.at("fiber").value("name", "0")] = 0;
    }
    auto lookup_fiber = [&](const json& j, const std::string& where) -> std::size_t {
      if (!j.contains("fiber")) return 0;
      const json& f = j.at("fiber");
      if (f.is_number_integer()) return f.get<std::size_t>();
      auto it = fiber_index.find(f.get<std::string>());
      if (it == fiber_index.end()) throw ConfigError("validation error at '" + where + "': unknown fiber");
      return it->second;
    };

    const json& ch = require(doc, "channels", "$");
    cfg.channels.n_channels = require(ch, "count", "channels").get<int>();
    cfg.channels.symbol_rate = quantity(ch, "symbol_rate", Dim::SymbolRate, "channels");
    cfg.channels.bandwidth = quantity(ch, "bandwidth", Dim::Frequency, "channels");
    cfg.channels.spacing = quantity(ch, "spacing", Dim::Frequency, "channels");
    cfg.channels.center_frequency = quantity(ch, "center_frequency", Dim::CenterFrequency, "channels");

    const AmplifierSpec default_amp = parse_amplifier(require(doc, "amplifier", "$"), "amplifier");
    cfg.link.booster_gain = quantity(doc, "booster_gain", Dim::Ratio, "$");
    cfg.receiver_noise = quantity(doc, "receiver_noise", Dim::Power, "$");

    if (doc.contains("modulation")) {
      const json& m = doc.at("modulation");
      if (m.contains("moments")) {
        const json& mm = m.at("moments");
        cfg.moments = {mm.value("mu2", 1.0), require(mm, "mu4", "modulation.moments").get<double>(),
                       require(mm, "mu6", "modulation.moments").get<double>()};
        cfg.modulation = m.value("format", "custom");
      } else {
        cfg.modulation = require(m, "format", "modulation").get<std::string>();
        cfg.moments = moments_for_format(cfg.modulation);
      }
      if (m.contains("cumulant_convention"))
        cfg.convention = parse_convention(m.at("cumulant_convention").get<std::string>());
    } else {
      cfg.moments = moments_for_format(cfg.modulation);
    }

    // Network: either explicit spans or nodes + uniform hops.
    const json& net = require(doc, "network", "$");
    std::vector<std::size_t> node_first_span;  // span index at which each node's outgoing hop starts
    if (net.contains("nodes")) {
      for (const auto& n : net.at("nodes")) cfg.link.nodes.push_back(n.get<std::string>());
    }
    if (net.contains("spans")) {
      const json& spans = net.at("spans");
      for (std::size_t i = 0; i < spans.size(); ++i) {
        const std::string w = "network.spans[" + std::to_string(i) + "]";
        Span s;
        s.length = quantity(spans[i], "length", Dim::Length, w);
        s.fiber = lookup_fiber(spans[i], w);
        s.amplifier = spans[i].contains("amplifier") ? parse_amplifier(spans[i].at("amplifier"), w + ".amplifier")
                                                     : default_amp;
        cfg.link.spans.push_back(s);
      }
      if (net.contains("node_spans")) {
        for (const auto& v : net.at("node_spans")) node_first_span.push_back(v.get<std::size_t>());
      }
    } else {
      const int spans_per_hop = net.value("spans_per_hop", 3);
      const double len = quantity(net, "span_length", Dim::Length, "network");
      const std::size_t fiber = lookup_fiber(net, "network");
      if (cfg.link.nodes.size() < 2 && !cfg.link.nodes.empty())
        throw ConfigError("validation error: network needs at least two nodes");
      const std::size_t hops = cfg.link.nodes.empty() ? 0 : cfg.link.nodes.size() - 1;
      for (std::size_t h = 0; h <= hops; ++h) node_first_span.push_back(h * static_cast<std::size_t>(spans_per_hop));
      for (std::size_t i = 0; i < hops * static_cast<std::size_t>(spans_per_hop); ++i)
        cfg.link.spans.push_back(Span{len, fiber, default_amp});
    }

    const FiberSpec& fiber0 = cfg.fibers.front();
    const json& lps = require(doc, "lightpaths", "$");
    if (!lps.is_array()) throw ConfigError("parse error: 'lightpaths' must be an array");
    for (std::size_t i = 0; i < lps.size(); ++i) {
      const json& lj = lps[i];
      const std::string w = "lightpaths[" + std::to_string(i) + "]";
      Lightpath lp;
      lp.id = lj.value("id", "L" + std::to_string(i + 1));
      if (lj.contains("from")) {
        auto idx = [&](const std::string& key) {
          const auto name = lj.at(key).get<std::string>();
          auto it = std::find(cfg.link.nodes.begin(), cfg.link.nodes.end(), name);
          if (it == cfg.link.nodes.end()) throw ConfigError("validation error at '" + w + "': unknown node '" + name + "'");
          return static_cast<std::size_t>(it - cfg.link.nodes.begin());
        };
        const std::size_t a = idx("from"), b = idx(std::string("to"));
        if (a >= b) throw ConfigError("validation error at '" + w + "': lightpath must run downstream (from before to)");
        if (node_first_span.size() <= b) throw ConfigError("validation error at '" + w + "': node/span map missing");
        if (node_first_span[b] == node_first_span[a])
          throw ConfigError("validation error at '" + w + "': lightpath covers no spans");
        lp.first_span = node_first_span[a];
        lp.last_span = node_first_span[b] - 1;
      } else {
        lp.first_span = require(lj, "first_span", w).get<std::size_t>() - 1;
        lp.last_span = require(lj, "last_span", w).get<std::size_t>() - 1;
      }
      for (const auto& c : require(lj, "carriers", w)) {
        int channel = 0, mode = 0;
        if (c.is_array() && c.size() == 2) {
          channel = c[0].get<int>() - 1;
          mode = resolve_mode(c[1], fiber0, w);
        } else if (c.is_object()) {
          channel = require(c, "channel", w).get<int>() - 1;
          mode = c.contains("mode") ? resolve_mode(c.at("mode"), fiber0, w) : 0;
        } else {
          throw ConfigError("parse error at '" + w + "': carrier must be [channel, mode] or {channel, mode}");
        }
        lp.carriers.emplace_back(channel, mode);
      }
      lp.required_snr = quantity(lj, "required_snr", Dim::Ratio, w);
      cfg.link.lightpaths.push_back(lp);
    }

    if (doc.contains("solver")) {
      const json& s = doc.at("solver");
      auto& o = cfg.solver;
      o.beta_upper = s.value("beta_upper", o.beta_upper);
      o.beta_lower = s.value("beta_lower", o.beta_lower);
      o.epsilon = s.value("epsilon", o.epsilon);
      o.max_outer_iterations = s.value("max_outer_iterations", o.max_outer_iterations);
      o.max_inner_iterations = s.value("max_inner_iterations", o.max_inner_iterations);
      o.inner_tolerance = s.value("inner_tolerance", o.inner_tolerance);
      o.step_lambda = s.value("step_lambda", o.step_lambda);
      o.step_mu = s.value("step_mu", o.step_mu);
      o.step_nu = s.value("step_nu", o.step_nu);
      o.saturation_active = s.value("saturation_active", o.saturation_active);
      o.equal_power_min_dbm = s.value("equal_power_min_dbm", o.equal_power_min_dbm);
      o.equal_power_max_dbm = s.value("equal_power_max_dbm", o.equal_power_max_dbm);
      o.equal_power_step_db = s.value("equal_power_step_db", o.equal_power_step_db);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("validation error: ") + e.what());
  }

  validate(cfg);
  cfg.fingerprint = compute_fingerprint(cfg);
  return cfg;
}

SystemConfig load_system_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_system_config(ss.str());
}

void validate(const SystemConfig& cfg) {
  auto fail = [](const std::string& what) { throw ConfigError("validation error: " + what); };
  if (cfg.fibers.empty()) fail("at least one fiber required");
  const std::size_t d = cfg.fibers.front().num_modes();
  for (const auto& f : cfg.fibers) {
    if (f.num_modes() != d) fail("all fibers must carry the same number of modes");
    if (!(f.gamma >= 0.0) || !std::isfinite(f.gamma)) fail("gamma >= 0");
    std::set<int> ids;
    for (const auto& m : f.modes) {
      if (!(m.attenuation > 0.0)) fail("attenuation > 0 (mode " + m.name + ")");
      if (!std::isfinite(m.beta0) || !std::isfinite(m.beta1) || !std::isfinite(m.beta2) || !std::isfinite(m.beta3))
        fail("beta values finite (mode " + m.name + ")");
      if (!ids.insert(m.mode_id).second) fail("mode_id unique within a fiber");
    }
    for (Eigen::Index p = 0; p < f.coupling.rows(); ++p) {
      for (Eigen::Index q = 0; q < f.coupling.cols(); ++q) {
        const double a = f.coupling(p, q), b = f.coupling(q, p);
        if (!(a >= 0.0)) fail("coupling entries >= 0");
        if (std::abs(a - b) > 0.05 * std::max(a, b)) fail("coupling asymmetry within 5%");
      }
    }
  }
  const auto& ch = cfg.channels;
  if (ch.n_channels < 1) fail("n_channels >= 1");
  if (!(ch.symbol_rate > 0.0) || !(ch.bandwidth > 0.0) || !(ch.spacing > 0.0)) fail("channel rates > 0");
  if (ch.bandwidth > ch.spacing * (1.0 + 1e-12)) fail("bandwidth <= spacing");
  if (ch.symbol_rate > ch.bandwidth * (1.0 + 1e-12)) fail("symbol_rate <= bandwidth");
  if (!(ch.center_frequency > 0.0)) fail("center_frequency > 0");
  if (cfg.link.spans.empty()) fail("network must contain at least one span");
  for (const auto& s : cfg.link.spans) {
    if (!(s.length >= 0.0)) fail("span length >= 0");
    if (s.fiber >= cfg.fibers.size()) fail("span references unknown fiber");
    if (!(s.amplifier.noise_figure >= 1.0)) fail("noise_figure >= 1");
    if (!(s.amplifier.max_gain >= 1.0)) fail("max_gain >= 1");
    if (!(s.amplifier.saturation_power > 0.0)) fail("saturation_power > 0");
  }
  if (!(cfg.link.booster_gain >= 1.0)) fail("booster_gain >= 1");
  if (!(cfg.receiver_noise > 0.0)) fail("receiver_noise > 0");
  const auto& lps = cfg.link.lightpaths;
  if (lps.empty()) fail("at least one lightpath required");
  for (const auto& lp : lps) {
    if (lp.first_span > lp.last_span || lp.last_span >= cfg.link.spans.size())
      fail("lightpath '" + lp.id + "' span interval out of range");
    if (!(lp.required_snr > 0.0)) fail("required_snr > 0");
    if (lp.carriers.empty()) fail("lightpath '" + lp.id + "' carries no carriers");
    for (auto [c, m] : lp.carriers) {
      if (c < 0 || c >= ch.n_channels) fail("lightpath '" + lp.id + "' channel out of range");
      if (m < 0 || static_cast<std::size_t>(m) >= d) fail("lightpath '" + lp.id + "' mode out of range");
    }
  }
  for (std::size_t a = 0; a < lps.size(); ++a) {
    for (std::size_t b = a; b < lps.size(); ++b) {
      for (std::size_t i = 0; i < lps[a].carriers.size(); ++i) {
        for (std::size_t j = (a == b ? i + 1 : 0); j < lps[b].carriers.size(); ++j) {
          if (lps[a].carriers[i] != lps[b].carriers[j]) continue;
          const std::string who = "carrier (channel " + std::to_string(lps[a].carriers[i].first + 1) +
                                  ", mode " + std::to_string(lps[a].carriers[i].second + 1) + ")";
          if (a == b || lps[a].overlaps(lps[b]))
            fail(who + " assigned to overlapping lightpaths '" + lps[a].id + "' and '" + lps[b].id + "'");
          // The carrier index is a bijection onto (channel, mode), so a
          // carrier can live on one lightpath only.
          fail(who + " reused on disjoint lightpaths '" + lps[a].id + "' and '" + lps[b].id +
               "' is not supported");
        }
      }
    }
  }
  try {
    validate_moments(cfg.moments);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
}

std::uint64_t compute_fingerprint(const SystemConfig& cfg) {
  // Build a canonical, SI-normalized tree; nlohmann::json objects are
  // key-ordered so the dump does not depend on source field order.
  json j;
  for (const auto& f : cfg.fibers) {
    json fj;
    fj["gamma"] = f.gamma;
    for (const auto& m : f.modes)
      fj["modes"].push_back({{"id", m.mode_id}, {"alpha", m.attenuation}, {"b0", m.beta0},
                             {"b1", m.beta1}, {"b2", m.beta2}, {"b3", m.beta3}});
    for (Eigen::Index p = 0; p < f.coupling.rows(); ++p)
      for (Eigen::Index q = 0; q < f.coupling.cols(); ++q) fj["coupling"].push_back(f.coupling(p, q));
    j["fibers"].push_back(fj);
  }
  const auto& ch = cfg.channels;
  j["channels"] = {{"n", ch.n_channels}, {"rs", ch.symbol_rate}, {"bw", ch.bandwidth},
                   {"sp", ch.spacing}, {"nu", ch.center_frequency}};
  for (const auto& s : cfg.link.spans)
    j["spans"].push_back({{"len", s.length}, {"fiber", s.fiber}, {"nf", s.amplifier.noise_figure},
                          {"gmax", s.amplifier.max_gain}, {"psat", s.amplifier.saturation_power}});
  j["booster"] = cfg.link.booster_gain;
  j["rx"] = cfg.receiver_noise;
  // Lightpaths enter only through the occupancy they induce (order-free).
  // Modulation and required SNR do not change the coupling integrals and are
  // left out so that they can vary without invalidating a tensor cache.
  std::vector<std::tuple<int, int, std::size_t, std::size_t>> occ;
  for (const auto& lp : cfg.link.lightpaths)
    for (auto [c, m] : lp.carriers) occ.emplace_back(c, m, lp.first_span, lp.last_span);
  std::sort(occ.begin(), occ.end());
  for (const auto& [c, m, a, b] : occ) j["occupancy"].push_back({c, m, a, b});

  const std::string canon = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fingerprint_hex(std::uint64_t fp) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fp;
  return os.str();
}

double span_transmittance(const SystemConfig& cfg, std::size_t span) {
  const auto& s = cfg.link.spans.at(span);
  const double alpha = cfg.fibers.at(s.fiber).modes.front().attenuation;
  return std::exp(-alpha * s.length);
}

}  // namespace fiberplan
