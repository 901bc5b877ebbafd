#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dpgexp/convergence.hpp"
#include "dpgexp/integrators.hpp"

namespace dpgexp {

/// Shortest round-trippable decimal form, independent of stream state.
inline std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// Header "N,h,error", one line per row.
inline void write_convergence_csv(const ConvergenceReport& report, std::ostream& os) {
  os << "N,h,error\n";
  for (const auto& r : report.rows) os << r.N << ',' << format_real(r.h) << ',' << format_real(r.error) << '\n';
}

inline std::vector<ConvergenceRow> read_convergence_csv(std::istream& is) {
  std::string line;
  require(static_cast<bool>(std::getline(is, line)) && line == "N,h,error",
          "read_convergence_csv: missing 'N,h,error' header");
  std::vector<ConvergenceRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    ConvergenceRow r;
    char c1 = 0;
    std::string h, e;
    ls >> r.N >> c1;
    require(static_cast<bool>(ls) && c1 == ',', "read_convergence_csv: malformed line '" + line + "'");
    std::getline(ls, h, ',');
    std::getline(ls, e);
    require(!h.empty() && !e.empty(), "read_convergence_csv: malformed line '" + line + "'");
    r.h = std::stod(h);
    r.error = std::stod(e);
    rows.push_back(r);
  }
  return rows;
}

/// Log-log plot data with guide lines of slope 2, 3 and 4 anchored at the
/// first row: guide_r(h) = e_0 (h / h_0)^r.
inline void write_plot_data(const ConvergenceReport& report, std::ostream& os) {
  os << "N,h,error,log10_h,log10_error,rate2,rate3,rate4,excluded\n";
  if (report.rows.empty()) return;
  const double h0 = report.rows.front().h;
  const double e0 = report.rows.front().error;
  for (const auto& r : report.rows) {
    os << r.N << ',' << format_real(r.h) << ',' << format_real(r.error) << ','
       << format_real(std::log10(r.h)) << ',' << format_real(std::log10(r.error));
    for (int rate : {2, 3, 4}) os << ',' << format_real(e0 * std::pow(r.h / h0, rate));
    os << ',' << (r.excluded ? 1 : 0) << '\n';
  }
}

/// Header "t,u0,...,u{n-1}"; one line per node t_0..t_N with the traces.
inline void write_trajectory_csv(const Trajectory& traj, std::ostream& os) {
  const auto n = traj.initial.size();
  os << 't';
  for (Eigen::Index i = 0; i < n; ++i) os << ",u" << i;
  os << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const Vector& u = k == 0 ? traj.initial : traj.steps[k - 1].trace;
    os << format_real(traj.times[k]);
    for (Eigen::Index i = 0; i < u.size(); ++i) os << ',' << format_real(u[i]);
    os << '\n';
  }
}

/// Header "t_start,t_end,u0,...": the interval-constant field of each step.
/// Methods without a field produce only the header.
inline void write_fields_csv(const Trajectory& traj, std::ostream& os) {
  os << "t_start,t_end";
  for (Eigen::Index i = 0; i < traj.initial.size(); ++i) os << ",u" << i;
  os << '\n';
  for (std::size_t k = 0; k < traj.steps.size(); ++k) {
    if (!traj.steps[k].field) continue;
    const Vector& f = *traj.steps[k].field;
    os << format_real(traj.times[k]) << ',' << format_real(traj.times[k + 1]);
    for (Eigen::Index i = 0; i < f.size(); ++i) os << ',' << format_real(f[i]);
    os << '\n';
  }
}

namespace detail {
inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}
}  // namespace detail

/// Line-oriented "key = value" configuration. '#' starts a comment; blank
/// lines are ignored; later keys override earlier ones.
inline std::map<std::string, std::string> parse_config(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  for (int lineno = 1; std::getline(is, line); ++lineno) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, "config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    std::string value = detail::trim(line.substr(eq + 1));
    require(!key.empty(), "config line " + std::to_string(lineno) + ": empty key");
    kv[key] = value;
  }
  return kv;
}

/// "4,8,16" or the doubling range "4..128".
inline std::vector<std::size_t> parse_steps(const std::string& spec) {
  std::vector<std::size_t> out;
  auto to_count = [&spec](const std::string& s) {
    const std::string t = detail::trim(s);
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      if (!t.empty() && std::isdigit(static_cast<unsigned char>(t.front()))) v = std::stoull(t, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    require(pos > 0 && pos == t.size() && v > 0, "invalid step list '" + spec + "'");
    return static_cast<std::size_t>(v);
  };
  if (const auto dots = spec.find(".."); dots != std::string::npos) {
    const std::size_t lo = to_count(spec.substr(0, dots));
    const std::size_t hi = to_count(spec.substr(dots + 2));
    require(lo <= hi, "invalid step range '" + spec + "'");
    for (std::size_t n = lo; n <= hi; n *= 2) out.push_back(n);
    return out;
  }
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_count(item));
  require(!out.empty(), "empty step list");
  return out;
}

}  // namespace dpgexp
