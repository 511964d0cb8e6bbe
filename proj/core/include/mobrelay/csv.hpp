#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "mobrelay/power_opt.hpp"
#include "mobrelay/scenario.hpp"

namespace mobrelay {

// 12 significant digits, '.' decimal point, locale independent.
std::string format_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(std::vector<std::string> cells);
  void add_numbers(const std::vector<double>& values);
  std::string str() const;
  // Throws IoError.
  void write(const std::filesystem::path& path) const;

  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// n, x, y, v with v the speed from slot n to n + 1 (0 in the last slot).
CsvTable trajectory_table(const Trajectory& traj, double slot_length);
// n, p_s, p_r, r_s, r_r, source_level, relay_level.
CsvTable powers_table(const PowerSchedule& schedule, const std::vector<double>& source_levels,
                      const std::vector<double>& relay_levels);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace mobrelay
