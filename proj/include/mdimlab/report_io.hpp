#pragma once

#include <chrono>
#include <cstdio>
#include <string>

#include "json.hpp"
#include "mdimlab/complexity.hpp"
#include "mdimlab/katok.hpp"
#include "mdimlab/markov_check.hpp"

namespace mdimlab {

// CSV reports, schema versioned through a leading comment. The second
// comment line carries a timestamp and is excluded from golden comparisons.

inline constexpr const char* kCsvSchemaLine = "# schema=1";

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string csv_header(bool timestamp = true) {
  std::string out = std::string(kCsvSchemaLine) + "\n";
  if (timestamp) {
    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch());
    out += "# generated=" + std::to_string(secs.count()) + "\n";
  }
  return out;
}

inline std::string to_csv(const ComplexityReport& r, bool timestamp = true) {
  std::string out = csv_header(timestamp);
  out += "m,eps,S_lower,N_upper,mode\n";
  for (const auto& row : r.rows) {
    out += std::to_string(row.m) + "," + fmt_double(row.eps) + "," + row.s_lower.str() + "," +
           (row.n_upper < 0 ? std::string("") : std::to_string(row.n_upper)) + "," +
           count_mode_name(row.mode) + "\n";
  }
  return out;
}

inline std::string to_csv(const MdimReport& r, bool timestamp = true) {
  std::string out = csv_header(timestamp);
  out += "eps,sep,ratio,suspect,mode\n";
  for (const auto& row : r.rows) {
    out += fmt_double(row.eps) + "," + fmt_double(row.sep) + "," + fmt_double(row.ratio) + "," +
           (row.suspect ? "1" : "0") + "," + count_mode_name(row.mode) + "\n";
  }
  return out;
}

inline std::string to_csv(const KatokReport& r, bool timestamp = true) {
  std::string out = csv_header(timestamp);
  out += "m,eps,mass_delta,N_nu,h_estimate,mode\n";
  for (const auto& row : r.rows) {
    out += std::to_string(row.m) + "," + fmt_double(row.eps) + "," + fmt_double(row.mass_delta) +
           "," + std::to_string(row.n_nu) + "," + fmt_double(row.h_estimate) + "," +
           (row.cell_mode ? "cell" : "greedy") + "\n";
  }
  return out;
}

inline std::string to_csv(const GapReport& r, bool timestamp = true) {
  std::string out = csv_header(timestamp);
  out += "eps,sep_col,h_col,gap,best_delta,h_estimator,sep_mode\n";
  for (const auto& row : r.rows) {
    out += fmt_double(row.eps) + "," + fmt_double(row.sep_col) + "," + fmt_double(row.h_col) +
           "," + fmt_double(row.gap) + "," + fmt_double(row.best_delta) + "," +
           (row.cell_mode ? "cell" : "slope") + "," + count_mode_name(row.sep_mode) + "\n";
  }
  return out;
}

// JSON mirrors. All estimates are finite-scale; no convergence claim is
// attached to any value.

inline nlohmann::ordered_json to_json(const MarkovVerdict& v) {
  nlohmann::ordered_json j;
  j["passed"] = v.passed;
  j["case"] = v.case_used == MarkovCase::S_plus_above ? "S_plus_above" : "S_plus_below";
  j["margin"] = v.margin;
  j["samples_checked"] = v.samples_checked;
  j["mode"] = v.mode == VerifyMode::exact ? "exact" : "sampled";
  j["resolution"] = v.resolution;
  return j;
}

inline nlohmann::ordered_json to_json(const ComplexityReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["kind"] = "complexity";
  j["finite_scale"] = true;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json rj;
    rj["m"] = row.m;
    rj["eps"] = row.eps;
    rj["S_lower"] = row.s_lower.str();
    if (row.n_upper >= 0) rj["N_upper"] = row.n_upper;
    rj["mode"] = count_mode_name(row.mode);
    rows.push_back(rj);
  }
  j["rows"] = rows;
  auto fits = nlohmann::ordered_json::array();
  for (const auto& [eps, fit] : r.sep_estimates) {
    nlohmann::ordered_json fj;
    fj["eps"] = eps;
    fj["slope"] = fit.slope;
    fj["tail_quotient"] = fit.tail_quotient;
    fj["degenerate"] = fit.degenerate;
    fits.push_back(fj);
  }
  j["sep_estimates"] = fits;
  return j;
}

inline nlohmann::ordered_json to_json(const MdimReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["kind"] = "mdim";
  j["finite_scale"] = true;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json rj;
    rj["eps"] = row.eps;
    rj["sep"] = row.sep;
    rj["ratio"] = row.ratio;
    rj["suspect"] = row.suspect;
    rj["mode"] = count_mode_name(row.mode);
    rows.push_back(rj);
  }
  j["rows"] = rows;
  j["lower"] = r.lower;
  j["upper"] = r.upper;
  return j;
}

inline nlohmann::ordered_json to_json(const KatokReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["kind"] = "katok";
  j["finite_scale"] = true;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json rj;
    rj["m"] = row.m;
    rj["eps"] = row.eps;
    rj["mass_delta"] = row.mass_delta;
    rj["N_nu"] = row.n_nu;
    rj["h_estimate"] = row.h_estimate;
    rj["mode"] = row.cell_mode ? "cell" : "greedy";
    rows.push_back(rj);
  }
  j["rows"] = rows;
  j["slope"] = r.slope;
  j["degenerate"] = r.degenerate;
  return j;
}

inline nlohmann::ordered_json to_json(const GapReport& r) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["kind"] = "variational_gap";
  j["finite_scale"] = true;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json rj;
    rj["eps"] = row.eps;
    rj["sep_col"] = row.sep_col;
    rj["h_col"] = row.h_col;
    rj["gap"] = row.gap;
    rj["best_delta"] = row.best_delta;
    rj["h_estimator"] = row.cell_mode ? "cell" : "slope";
    rj["sep_mode"] = count_mode_name(row.sep_mode);
    rows.push_back(rj);
  }
  j["rows"] = rows;
  return j;
}

// Strips the timestamp comment; used when comparing reports to goldens.
inline std::string strip_timestamp(const std::string& csv) {
  std::string out;
  std::size_t pos = 0;
  while (pos < csv.size()) {
    std::size_t nl = csv.find('\n', pos);
    if (nl == std::string::npos) nl = csv.size() - 1;
    const std::string line = csv.substr(pos, nl - pos + 1);
    if (line.rfind("# generated=", 0) != 0) out += line;
    pos = nl + 1;
  }
  return out;
}

}  // namespace mdimlab
