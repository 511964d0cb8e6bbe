#include "mobrelay/csv.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "mobrelay/errors.hpp"

namespace mobrelay {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // folds -0
  return fmt::format("{:.12g}", v);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size()) {
    throw DimensionError(fmt::format("csv row has {} cells, header has {}", cells.size(), header_.size()));
  }
  rows_.push_back(std::move(cells));
}

void CsvTable::add_numbers(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  add_row(std::move(cells));
}

std::string CsvTable::str() const {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out.str();
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path.string()));
}

CsvTable trajectory_table(const Trajectory& traj, double slot_length) {
  CsvTable t({"n", "x", "y", "v"});
  const std::size_t n = traj.size();
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    if (i + 1 < n) v = std::hypot(traj.x[i + 1] - traj.x[i], traj.y[i + 1] - traj.y[i]) / slot_length;
    t.add_numbers({static_cast<double>(i + 1), traj.x[i], traj.y[i], v});
  }
  return t;
}

CsvTable powers_table(const PowerSchedule& s, const std::vector<double>& source_levels,
                      const std::vector<double>& relay_levels) {
  CsvTable t({"n", "p_s", "p_r", "r_s", "r_r", "source_level", "relay_level"});
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double ls = i + 1 < n && i < source_levels.size() ? source_levels[i] : 0.0;
    const double lr = i >= 1 && i - 1 < relay_levels.size() ? relay_levels[i - 1] : 0.0;
    t.add_numbers({static_cast<double>(i + 1), s.p_s[i], s.p_r[i], s.r_s[i], s.r_r[i], ls, lr});
  }
  return t;
}

}  // namespace mobrelay
