#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "monsel/signals.hpp"

namespace monsel {

/// Column-major numeric CSV with a single header row.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
  /// Index of `name` in the header, or -1.
  int find(std::string_view name) const;
};

CsvTable read_numeric_csv(const std::string& path);

/// Extracts `column` as a TimeSeries, inferring dt from the leading `t`
/// column. `source` is used in error messages only.
TimeSeries column_as_timeseries(const CsvTable& table, const std::string& column,
                                const std::string& source);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Writes via a sibling temp file and rename, so readers never observe a
/// partially written file.
void write_file_atomic(const std::string& path, const std::string& content);

void write_numeric_csv(const std::string& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& columns);

/// The three sensor channels of one experiment, sharing dt and length.
struct Dataset {
  TimeSeries acc_mass;
  TimeSeries acc_frame;
  TimeSeries force;
};

inline constexpr std::string_view kDatasetHeader = "t,acc_mass,acc_frame,force";

/// Header `t,acc_mass,acc_frame,force`, t_i = i*dt.
void write_dataset(const Dataset& data, const std::string& path);
Dataset read_dataset(const std::string& path);

/// `freq_hz,value` rows.
void write_spectrum_csv(const std::string& path, std::span<const double> freqs,
                        std::span<const double> values);

}  // namespace monsel
