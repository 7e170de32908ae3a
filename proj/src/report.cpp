#include "prandtl3d/report.hpp"

#include <cstdio>

namespace prandtl3d {

bool DiagnosticsReport::all_pass() const {
  for (const auto& e : entries)
    if (!e.pass) return false;
  return true;
}

const ReportEntry* DiagnosticsReport::find(const std::string& id, const std::string& zone) const {
  for (const auto& e : entries)
    if (e.check_id == id && (zone.empty() || e.zone == zone)) return &e;
  return nullptr;
}

void DiagnosticsReport::append(const DiagnosticsReport& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
  for (const auto& [k, v] : other.metadata) metadata.emplace(k, v);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_report_csv(std::ostream& os, const DiagnosticsReport& r) {
  for (const auto& [k, v] : r.metadata) os << "# " << k << "=" << v << "\n";
  os << "check_id,zone,margin,x,y,z,pass\n";
  for (const auto& e : r.entries) {
    os << e.check_id << "," << e.zone << "," << format_double(e.margin) << ","
       << format_double(e.x) << "," << format_double(e.y) << "," << format_double(e.z) << ","
       << (e.pass ? 1 : 0) << "\n";
  }
}

}  // namespace prandtl3d
