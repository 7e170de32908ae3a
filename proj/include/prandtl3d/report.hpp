#pragma once

#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace prandtl3d {

struct ReportEntry {
  std::string check_id;
  std::string zone;
  double margin = 0.0;
  double x = 0.0, y = 0.0, z = 0.0;
  bool pass = false;
  // Measured constant for inequality scans (c2 for barrier checks).
  double estimate = std::numeric_limits<double>::quiet_NaN();
  long excluded = 0;
};

struct DiagnosticsReport {
  std::vector<ReportEntry> entries;
  std::map<std::string, std::string> metadata;

  void add(ReportEntry e) { entries.push_back(std::move(e)); }
  bool all_pass() const;
  const ReportEntry* find(const std::string& id, const std::string& zone = {}) const;
  void append(const DiagnosticsReport& other);
};

// Rows `check_id,zone,margin,x,y,z,pass`, preceded by `# key=value` metadata lines.
void write_report_csv(std::ostream& os, const DiagnosticsReport& r);

std::string format_double(double v);

// Tracks the extreme of a node-wise ratio together with its location.
struct Extremum {
  double value;
  double x = 0, y = 0, z = 0;
  long count = 0;
  bool minimum;

  explicit Extremum(bool is_min)
      : value(is_min ? std::numeric_limits<double>::infinity()
                     : -std::numeric_limits<double>::infinity()),
        minimum(is_min) {}
  void offer(double v, double px, double py, double pz) {
    ++count;
    if (minimum ? v < value : v > value) {
      value = v;
      x = px;
      y = py;
      z = pz;
    }
  }
};

}  // namespace prandtl3d
