#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "agrotrack/harness/sim_log.hpp"
#include "agrotrack/signals/frf.hpp"

namespace agrotrack::harness {

inline constexpr std::array<std::string_view, 16> kLogColumns = {
    "t",   "x",       "y",       "psi",     "v_x", "v_y",       "gamma",     "x_hat",
    "y_hat", "psi_hat", "x_r", "y_r", "delta_cmd", "delta_act", "e_x", "e_y"};

/// A header row plus rows of numbers. Values are written in the shortest form
/// that parses back to the same double.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string format_csv(const CsvTable& table);
/// Throws ErrorKind::io on malformed input (ragged rows, bad numbers).
CsvTable parse_csv(std::string_view text);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

std::string log_to_csv(const SimLog& log);
/// Rebuilds a log from its CSV form. Segment tags are inferred from the
/// reference curvature; the step is taken from the time column.
SimLog log_from_csv(std::string_view text);

void export_csv(const SimLog& log, const std::string& path);
SimLog import_csv(const std::string& path);

/// freq_hz,re,im,variance
std::string frf_to_csv(const signals::FrfMeasurement& frf);
signals::FrfMeasurement frf_from_csv(std::string_view text);

/// time,u,y
std::string record_to_csv(const std::vector<double>& u, const std::vector<double>& y, double fs);

}  // namespace agrotrack::harness
