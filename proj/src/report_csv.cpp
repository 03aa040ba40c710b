#include "porosplit/report_csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace porosplit {

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out << ',';
    out << csv_field(fields[i]);
  }
  out << "\r\n";
}

void region_columns(std::vector<std::string>& cols, const std::vector<std::string>& names) {
  for (const std::string& r : names) {
    cols.push_back(r + "_jump_energy");
    cols.push_back(r + "_checkerboard");
  }
}

void region_values(std::vector<std::string>& row, const std::vector<OscillationReport>& regions,
                   std::size_t count) {
  for (std::size_t r = 0; r < count; ++r) {
    if (r < regions.size()) {
      row.push_back(num(regions[r].jump_energy));
      row.push_back(num(regions[r].checkerboard_projection));
    } else {
      row.emplace_back();
      row.emplace_back();
    }
  }
}

template <class Fn>
void to_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  fn(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

std::vector<std::string> step_columns(const std::vector<std::string>& region_names, bool timing) {
  std::vector<std::string> cols = {"step",          "time",          "dt",
                                   "scheme",        "outer_iterations", "converged",
                                   "residual_ratio", "splitting_error_norm", "mass_defect",
                                   "source_volume"};
  region_columns(cols, region_names);
  if (timing) cols.push_back("wall_time");
  return cols;
}

void write_step_csv(std::ostream& out, const RunReport& report, bool timing) {
  write_row(out, step_columns(report.region_names, timing));
  for (const StepRow& s : report.rows) {
    std::vector<std::string> row = {std::to_string(s.step),
                                    num(s.time),
                                    num(s.dt),
                                    to_string(s.scheme),
                                    std::to_string(s.outer_iterations),
                                    s.converged ? "1" : "0",
                                    num(s.residual_ratio),
                                    num(s.splitting_error_norm),
                                    num(s.mass_defect),
                                    num(s.source_volume)};
    region_values(row, s.regions, report.region_names.size());
    if (timing) row.push_back(num(s.wall_time));
    write_row(out, row);
  }
}

std::vector<std::string> sweep_columns(const SweepTable& table) {
  std::vector<std::string> cols = table.axis_names;
  for (const char* c : {"ok", "converged", "steps", "first_step_iterations", "total_iterations",
                        "max_iterations"})
    cols.emplace_back(c);
  region_columns(cols, table.region_names);
  cols.emplace_back("error");
  return cols;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  write_row(out, sweep_columns(table));
  for (const SweepRow& s : table.rows) {
    std::vector<std::string> row = s.values;
    row.resize(table.axis_names.size());
    row.push_back(s.ok ? "1" : "0");
    row.push_back(s.converged ? "1" : "0");
    row.push_back(std::to_string(s.steps));
    row.push_back(std::to_string(s.first_step_iterations));
    row.push_back(std::to_string(s.total_iterations));
    row.push_back(std::to_string(s.max_iterations));
    region_values(row, s.final_regions, table.region_names.size());
    row.push_back(s.error);
    write_row(out, row);
  }
}

void write_step_csv(const std::filesystem::path& path, const RunReport& report, bool timing) {
  to_file(path, [&](std::ostream& o) { write_step_csv(o, report, timing); });
}

void write_sweep_csv(const std::filesystem::path& path, const SweepTable& table) {
  to_file(path, [&](std::ostream& o) { write_sweep_csv(o, table); });
}

}  // namespace porosplit
