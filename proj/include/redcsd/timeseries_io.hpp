#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "redcsd/simulate.hpp"

namespace redcsd {

/// Maximum relative deviation of a time step from the mean step.
inline constexpr double SAMPLING_JITTER_REL = 1e-6;

/// A CSV with header `t,<name>` or `t,v,p`.
struct CsvSeries {
    std::vector<std::string> columns;  ///< value columns after `t`
    TimeSeries first;
    std::optional<TimeSeries> second;  ///< paired input only
};

/// Parses CSV text.  Throws InputError (with line number) on a malformed
/// header, a non-numeric field, a wrong field count, or non-uniform sampling.
CsvSeries parse_series_csv(std::istream& in);
CsvSeries read_series_csv(const std::filesystem::path& path);

/// `t,<column>` rows at round-trip precision.
std::string format_series_csv(const TimeSeries& x, std::string_view column = "x");
std::string format_paired_csv(const TimeSeries& v, const TimeSeries& p);

/// Shortest decimal form that parses back to the same double; "nan"/"inf" for non-finite.
std::string format_double(double v);

/// Writes to a sibling temporary file and renames over the target.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

/// 16-byte header (uint64 length, double dt) then the values, all little-endian.
std::string encode_binary(const TimeSeries& x);
TimeSeries decode_binary(std::string_view bytes);
void write_series_binary(const std::filesystem::path& path, const TimeSeries& x);
TimeSeries read_series_binary(const std::filesystem::path& path);

}  // namespace redcsd
