#include "monsel/dataset_io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "monsel/errors.hpp"

namespace monsel {

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_cell(const std::string& cell, const std::string& path, std::size_t line_no) {
  const std::string t = trim(cell);
  double v = 0.0;
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc() || ptr != end || t.empty()) {
    throw_input("read_numeric_csv",
                path + ":" + std::to_string(line_no) + ": cannot parse '" + t + "' as a number");
  }
  return v;
}

}  // namespace

int CsvTable::find(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw_input("read_numeric_csv", "cannot open '" + path + "'");

  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    if (table.header.empty()) {
      // Tolerate a UTF-8 byte-order mark.
      if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
      for (auto& h : split_commas(line)) table.header.push_back(trim(h));
      table.columns.resize(table.header.size());
      continue;
    }
    const auto cells = split_commas(line);
    if (cells.size() != table.header.size()) {
      throw_input("read_numeric_csv", path + ":" + std::to_string(line_no) + ": expected " +
                                          std::to_string(table.header.size()) + " fields, got " +
                                          std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c)
      table.columns[c].push_back(parse_cell(cells[c], path, line_no));
  }
  if (table.header.empty()) throw_input("read_numeric_csv", "'" + path + "' is empty");
  return table;
}

TimeSeries column_as_timeseries(const CsvTable& table, const std::string& column,
                                const std::string& source) {
  if (table.header.empty() || table.header.front() != "t")
    throw_input("load_timeseries", "'" + source + "': first column must be 't'");
  const int idx = table.find(column);
  if (idx < 0) throw_input("load_timeseries", "'" + source + "': no column '" + column + "'");
  const auto& t = table.columns.front();
  if (t.size() < 2) throw_input("load_timeseries", "'" + source + "': need at least two rows");

  const std::size_t n = t.size();
  const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw_input("load_timeseries", "'" + source + "': time column must increase");
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = t.front() + static_cast<double>(i) * dt;
    if (!std::isfinite(t[i]) || std::abs(t[i] - expected) > 1e-6 * dt) {
      throw_input("load_timeseries", "'" + source + "': non-uniform time grid at row " +
                                         std::to_string(i + 1));
    }
  }

  TimeSeries ts;
  ts.samples = table.columns[static_cast<std::size_t>(idx)];
  ts.dt = dt;
  ts.label = column;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(ts.samples[i]))
      throw_input("load_timeseries", "'" + source + "': non-finite value in '" + column +
                                         "' at row " + std::to_string(i + 1));
  }
  return ts;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw_numerical("format_double", "conversion failed");
  return std::string(buf, ptr);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw_input("write_file_atomic", "cannot open '" + tmp.string() + "' for writing");
    out << content;
    out.flush();
    if (!out) throw_input("write_file_atomic", "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) throw_input("write_file_atomic", "rename to '" + path + "' failed: " + ec.message());
}

void write_numeric_csv(const std::string& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& columns) {
  if (header.size() != columns.size())
    throw_input("write_numeric_csv", "header/column count mismatch");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    if (c.size() != rows) throw_input("write_numeric_csv", "ragged columns");

  std::string out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c) out += ',';
    out += header[c];
  }
  out += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += format_double(columns[c][r]);
    }
    out += '\n';
  }
  write_file_atomic(path, out);
}

void write_dataset(const Dataset& data, const std::string& path) {
  const std::size_t n = data.acc_mass.size();
  const double dt = data.acc_mass.dt;
  for (const TimeSeries* ts : {&data.acc_mass, &data.acc_frame, &data.force}) {
    validate(*ts);
    if (ts->size() != n || ts->dt != dt)
      throw_input("write_dataset", "channels must share length and dt");
  }
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i) * dt;
  write_numeric_csv(path, {"t", "acc_mass", "acc_frame", "force"},
                    {t, data.acc_mass.samples, data.acc_frame.samples, data.force.samples});
}

Dataset read_dataset(const std::string& path) {
  const CsvTable table = read_numeric_csv(path);
  std::string header;
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) header += ',';
    header += table.header[i];
  }
  if (header != kDatasetHeader) {
    throw_input("read_dataset", "'" + path + "' has header '" + header + "', expected '" +
                                    std::string(kDatasetHeader) + "'");
  }
  Dataset d;
  d.acc_mass = column_as_timeseries(table, "acc_mass", path);
  d.acc_frame = column_as_timeseries(table, "acc_frame", path);
  d.force = column_as_timeseries(table, "force", path);
  return d;
}

void write_spectrum_csv(const std::string& path, std::span<const double> freqs,
                        std::span<const double> values) {
  write_numeric_csv(path, {"freq_hz", "value"},
                    {std::vector<double>(freqs.begin(), freqs.end()),
                     std::vector<double>(values.begin(), values.end())});
}

}  // namespace monsel
