#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "msv/matstat.hpp"

namespace msv {

struct SimPath;

enum class InputMode { levels, returns };

InputMode parse_input_mode(const std::string& text);

/// N×p log-returns with column labels and opaque per-row time labels.
struct ReturnsFrame {
  std::vector<std::string> labels;
  std::string time_header = "t";
  std::vector<std::string> times;
  Matrix values;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

/// Comma-separated, header row of labels, numeric body. The first column is
/// carried through as a time label when its header is one of
/// time/date/t/index/timestamp or its first body entry is non-numeric.
/// In levels mode returns are log(x_t) - log(x_{t-1}), one row fewer.
///
/// Errors carry 1-based line and column numbers: MissingValue for empty,
/// NA or NaN fields, NonPositiveLevel for a level <= 0, ParseError for
/// anything else unreadable.
ReturnsFrame parse_csv(std::istream& in, InputMode mode, const std::string& source = "<input>");
ReturnsFrame load_csv(const std::filesystem::path& path, InputMode mode);

/// Writes the frame in the format parse_csv reads in returns mode. Values
/// use 17 significant digits so a reload reproduces them exactly.
void write_returns_csv(std::ostream& out, const ReturnsFrame& frame);

ReturnsFrame frame_from_path(const SimPath& path);

}  // namespace msv
