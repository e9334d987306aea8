#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fiberplan/allocator.hpp"
#include "fiberplan/config.hpp"
#include "fiberplan/noise.hpp"
#include "fiberplan/ssfm.hpp"
#include "fiberplan/xtensor.hpp"

namespace fiberplan {

struct CarrierRow {
  std::size_t carrier = 0, channel = 0, mode = 0;
  std::string lightpath;
  double power_dbm = 0.0, snr_db = 0.0, margin_db = 0.0;
};

struct ScenarioResult {
  Allocation allocation;
  std::vector<CarrierRow> carriers;  // active carriers only, H order
  std::vector<double> gains_db;      // per span
  double min_margin_db = 0.0;        // minimum of the carrier table
};

/// Wall-clock time is kept out of the written files so that reruns are
/// byte-identical; callers print it separately.
struct ScenarioReport {
  std::string fingerprint;
  std::vector<ScenarioResult> scenarios;
};

ScenarioResult tabulate(const SystemConfig& cfg, const XTensors& X, const Allocation& a);

/// Every scenario present must be no worse than the one before it
/// (equal, power, joint). Returns a message when violated.
std::string check_ordering(const ScenarioReport& r);

std::string report_json(const ScenarioReport& r);
std::string report_carrier_csv(const ScenarioReport& r);
std::string report_gain_csv(const ScenarioReport& r);

/// Columns: power_dbm,carrier,channel,mode,nli_gn_w,nli_fon_w,nli_hon_w,nli_w,ase_w,signal_w,snr_db,margin_db
std::string egn_csv_header();
std::string egn_csv_rows(const SystemConfig& cfg, double sweep_dbm, const std::vector<CarrierPerformance>& perf);

/// Columns: power_dbm,carrier,channel,mode,ssfm_snr_db,ssfm_nli_w,egn_snr_db,egn_nli_w,delta_nli_db,delta_snr_db,status
std::string ssfm_csv_header();
std::string ssfm_csv_rows(const SystemConfig& cfg, double sweep_dbm, const std::vector<CarrierMeasurement>& m,
                          const std::vector<CarrierPerformance>& egn, const std::string& status);

/// One double per line or comma separated.
Eigen::VectorXd read_vector_csv(const std::string& path);

}  // namespace fiberplan
