#include "agrotrack/harness/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "agrotrack/errors.hpp"
#include "agrotrack/harness/metrics.hpp"

namespace agrotrack::harness {
namespace {

void append_number(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

double parse_number(std::string_view field, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  double v = 0.0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size())
    fail(ErrorKind::io, "csv line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

void require_header(const CsvTable& t, std::initializer_list<std::string_view> names, const char* what) {
  if (t.header.size() != names.size() || !std::equal(names.begin(), names.end(), t.header.begin()))
    fail(ErrorKind::io, std::string(what) + ": unexpected CSV header");
}

}  // namespace

std::string format_csv(const CsvTable& table) {
  std::string out;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out += ',';
    out += table.header[i];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      append_number(out, row[i]);
    }
    out += '\n';
  }
  return out;
}

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split(line);
    if (t.header.empty()) {
      for (auto f : fields) t.header.emplace_back(f);
      continue;
    }
    if (fields.size() != t.header.size())
      fail(ErrorKind::io, "csv line " + std::to_string(line_no) + ": expected " + std::to_string(t.header.size()) +
                              " fields, got " + std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(fields.size());
    for (auto f : fields) row.push_back(parse_number(f, line_no));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) fail(ErrorKind::io, "csv: missing header");
  return t;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::io, "cannot open '" + path + "' for writing");
  f << text;
  if (!f) fail(ErrorKind::io, "write to '" + path + "' failed");
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) fail(ErrorKind::io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string log_to_csv(const SimLog& log) {
  CsvTable t;
  for (auto c : kLogColumns) t.header.emplace_back(c);
  t.rows.reserve(log.size());
  for (const auto& r : log.records)
    t.rows.push_back({r.t, r.x, r.y, r.psi, r.v_x, r.v_y, r.gamma, r.x_hat, r.y_hat, r.psi_hat, r.x_r, r.y_r,
                      r.delta_cmd, r.delta_act, r.e_x, r.e_y});
  return format_csv(t);
}

SimLog log_from_csv(std::string_view text) {
  const CsvTable t = parse_csv(text);
  if (t.header.size() != kLogColumns.size() || !std::equal(kLogColumns.begin(), kLogColumns.end(), t.header.begin()))
    fail(ErrorKind::io, "log csv: unexpected header");
  SimLog log;
  for (const auto& v : t.rows) {
    SimRecord r;
    r.t = v[0];
    r.x = v[1];
    r.y = v[2];
    r.psi = v[3];
    r.v_x = v[4];
    r.v_y = v[5];
    r.gamma = v[6];
    r.x_hat = v[7];
    r.y_hat = v[8];
    r.psi_hat = v[9];
    r.x_r = v[10];
    r.y_r = v[11];
    r.delta_cmd = v[12];
    r.delta_act = v[13];
    r.e_x = v[14];
    r.e_y = v[15];
    log.records.push_back(r);
  }
  if (log.size() >= 2) log.Ts = log.records[1].t - log.records[0].t;
  infer_segments(log);
  return log;
}

void export_csv(const SimLog& log, const std::string& path) { write_text(path, log_to_csv(log)); }

SimLog import_csv(const std::string& path) { return log_from_csv(read_text(path)); }

std::string frf_to_csv(const signals::FrfMeasurement& frf) {
  CsvTable t{{"freq_hz", "re", "im", "variance"}, {}};
  for (std::size_t i = 0; i < frf.size(); ++i)
    t.rows.push_back({frf.freqs[i], frf.response[i].real(), frf.response[i].imag(), frf.variance[i]});
  return format_csv(t);
}

signals::FrfMeasurement frf_from_csv(std::string_view text) {
  const CsvTable t = parse_csv(text);
  require_header(t, {"freq_hz", "re", "im", "variance"}, "frf csv");
  std::vector<double> f;
  std::vector<std::complex<double>> g;
  std::vector<double> var;
  for (const auto& r : t.rows) {
    f.push_back(r[0]);
    g.emplace_back(r[1], r[2]);
    var.push_back(r[3]);
  }
  auto frf = signals::frf_from_samples(std::move(f), std::move(g));
  for (double v : var)
    if (v < 0.0) fail(ErrorKind::io, "frf csv: negative variance");
  frf.variance = std::move(var);
  return frf;
}

std::string record_to_csv(const std::vector<double>& u, const std::vector<double>& y, double fs) {
  if (u.size() != y.size()) fail(ErrorKind::dimension, "record_to_csv: length mismatch");
  CsvTable t{{"time", "u", "y"}, {}};
  for (std::size_t i = 0; i < u.size(); ++i) t.rows.push_back({static_cast<double>(i) / fs, u[i], y[i]});
  return format_csv(t);
}

}  // namespace agrotrack::harness
