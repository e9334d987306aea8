#include "fiberplan/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "fiberplan/units.hpp"

namespace fiberplan {

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// JSON numbers rounded the same way as the CSV so the two agree textually
double round9(double v) { return std::stod(fmt(v)); }

}  // namespace

ScenarioResult tabulate(const SystemConfig& cfg, const XTensors& X, const Allocation& a) {
  ScenarioResult r;
  r.allocation = a;
  const Eigen::VectorXd powers = a.p_hat.array().exp();
  const Eigen::VectorXd gains = a.g.array().exp();
  const auto perf = evaluate_link(cfg, X, cfg.cumulants(), powers, gains);
  const auto routes = carrier_routes(cfg);
  r.min_margin_db = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l < perf.size(); ++l) {
    if (!perf[l].active) continue;
    CarrierRow row;
    row.carrier = l;
    row.channel = l / cfg.num_modes();
    row.mode = l % cfg.num_modes();
    row.lightpath = cfg.link.lightpaths[routes[l].lightpath].id;
    row.power_dbm = watt_to_dbm(powers(static_cast<Eigen::Index>(l)));
    row.snr_db = linear_to_db(perf[l].snr);
    row.margin_db = linear_to_db(perf[l].margin);
    r.min_margin_db = std::min(r.min_margin_db, row.margin_db);
    r.carriers.push_back(row);
  }
  for (Eigen::Index s = 0; s < gains.size(); ++s) r.gains_db.push_back(linear_to_db(gains(s)));
  return r;
}

std::string check_ordering(const ScenarioReport& r) {
  for (std::size_t j = 1; j < r.scenarios.size(); ++j) {
    const auto& prev = r.scenarios[j - 1];
    const auto& cur = r.scenarios[j];
    if (cur.min_margin_db < prev.min_margin_db - 1e-6)
      return "scenario ordering violated: " + cur.allocation.scenario + " (" + fmt(cur.min_margin_db) + " dB) < " +
             prev.allocation.scenario + " (" + fmt(prev.min_margin_db) + " dB)";
  }
  return {};
}

std::string report_json(const ScenarioReport& r) {
  nlohmann::ordered_json j;
  j["config_fingerprint"] = r.fingerprint;
  j["scenarios"] = nlohmann::ordered_json::array();
  for (const auto& s : r.scenarios) {
    nlohmann::ordered_json o;
    o["scenario"] = s.allocation.scenario;
    o["min_margin_db"] = round9(s.min_margin_db);
    o["beta"] = round9(s.allocation.beta);
    o["outer_iterations"] = s.allocation.iterations;
    o["cap_hits"] = s.allocation.cap_hits;
    o["converged"] = s.allocation.converged;
    auto& rows = o["carriers"] = nlohmann::ordered_json::array();
    for (const auto& c : s.carriers)
      rows.push_back({{"carrier", c.carrier},
                      {"channel", c.channel + 1},
                      {"mode", c.mode + 1},
                      {"lightpath", c.lightpath},
                      {"power_dbm", round9(c.power_dbm)},
                      {"snr_db", round9(c.snr_db)},
                      {"margin_db", round9(c.margin_db)}});
    auto& g = o["gains_db"] = nlohmann::ordered_json::array();
    for (double v : s.gains_db) g.push_back(round9(v));
    j["scenarios"].push_back(o);
  }
  return j.dump(2) + "\n";
}

std::string report_carrier_csv(const ScenarioReport& r) {
  std::ostringstream os;
  os << "scenario,carrier,channel,mode,lightpath,power_dbm,snr_db,margin_db\n";
  for (const auto& s : r.scenarios)
    for (const auto& c : s.carriers)
      os << s.allocation.scenario << ',' << c.carrier << ',' << c.channel + 1 << ',' << c.mode + 1 << ','
         << c.lightpath << ',' << fmt(c.power_dbm) << ',' << fmt(c.snr_db) << ',' << fmt(c.margin_db) << '\n';
  return os.str();
}

std::string report_gain_csv(const ScenarioReport& r) {
  std::ostringstream os;
  os << "scenario,span,gain_db\n";
  for (const auto& s : r.scenarios)
    for (std::size_t n = 0; n < s.gains_db.size(); ++n)
      os << s.allocation.scenario << ',' << n + 1 << ',' << fmt(s.gains_db[n]) << '\n';
  return os.str();
}

std::string egn_csv_header() {
  return "power_dbm,carrier,channel,mode,nli_gn_w,nli_fon_w,nli_hon_w,nli_w,ase_w,signal_w,snr_db,margin_db\n";
}

std::string egn_csv_rows(const SystemConfig& cfg, double sweep_dbm, const std::vector<CarrierPerformance>& perf) {
  std::ostringstream os;
  for (std::size_t l = 0; l < perf.size(); ++l) {
    const auto& p = perf[l];
    if (!p.active) continue;
    os << fmt(sweep_dbm) << ',' << l << ',' << l / cfg.num_modes() + 1 << ',' << l % cfg.num_modes() + 1 << ','
       << fmt(p.nli.gn) << ',' << fmt(p.nli.fon) << ',' << fmt(p.nli.hon) << ',' << fmt(p.nli.total) << ','
       << fmt(p.ase) << ',' << fmt(p.signal) << ',' << fmt(linear_to_db(p.snr)) << ','
       << fmt(linear_to_db(p.margin)) << '\n';
  }
  return os.str();
}

std::string ssfm_csv_header() {
  return "power_dbm,carrier,channel,mode,ssfm_snr_db,ssfm_nli_w,egn_snr_db,egn_nli_w,delta_nli_db,delta_snr_db,"
         "status\n";
}

std::string ssfm_csv_rows(const SystemConfig& cfg, double sweep_dbm, const std::vector<CarrierMeasurement>& m,
                          const std::vector<CarrierPerformance>& egn, const std::string& status) {
  std::ostringstream os;
  for (std::size_t l = 0; l < m.size(); ++l) {
    if (!m[l].active) continue;
    const double egn_snr = linear_to_db(egn[l].snr);
    os << fmt(sweep_dbm) << ',' << l << ',' << l / cfg.num_modes() + 1 << ',' << l % cfg.num_modes() + 1 << ','
       << fmt(m[l].snr_db) << ',' << fmt(m[l].nli_power) << ',' << fmt(egn_snr) << ',' << fmt(egn[l].nli.total)
       << ',' << fmt(linear_to_db(egn[l].nli.total / m[l].nli_power)) << ',' << fmt(egn_snr - m[l].snr_db) << ','
       << status << '\n';
  }
  return os.str();
}

Eigen::VectorXd read_vector_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::vector<double> v;
  std::string tok;
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  for (char& c : text)
    if (c == ',' || c == ';' || c == '\n' || c == '\r' || c == '\t') c = ' ';
  std::istringstream is(text);
  while (is >> tok) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("parse error in " + path + ": '" + tok + "' is not a number");
    }
  }
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace fiberplan
