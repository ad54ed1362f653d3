#include "msv/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "msv/errors.hpp"
#include "msv/simulator.hpp"

namespace msv {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  std::string out(s.substr(first, last - first + 1));
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool is_missing_token(const std::string& field) {
  const std::string l = lower(field);
  return l.empty() || l == "na" || l == "nan" || l == "null" || l == "-nan";
}

bool try_parse(const std::string& field, double& value) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  return ec == std::errc() && ptr == end;
}

double parse_field(const std::string& field, std::size_t line, std::size_t column,
                   const std::string& label, const std::string& source) {
  if (is_missing_token(field)) {
    throw MissingValue(fmt::format("{}: missing value at line {}, column {} ({})", source, line,
                                   column, label),
                       line, column);
  }
  double value = 0.0;
  if (!try_parse(field, value) || !std::isfinite(value)) {
    throw ParseError(fmt::format("{}: cannot parse '{}' at line {}, column {} ({})", source, field,
                                 line, column, label),
                     line, column);
  }
  return value;
}

bool is_time_header(const std::string& header) {
  const std::string l = lower(header);
  return l == "time" || l == "date" || l == "t" || l == "index" || l == "timestamp";
}

}  // namespace

InputMode parse_input_mode(const std::string& text) {
  if (text == "levels") return InputMode::levels;
  if (text == "returns") return InputMode::returns;
  throw DomainError(fmt::format("unknown input mode '{}' (expected levels or returns)", text));
}

ReturnsFrame parse_csv(std::istream& in, InputMode mode, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split(line);
      break;
    }
  }
  if (header.empty()) throw ParseError(fmt::format("{}: empty file", source), line_no, 0);
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0] = header[0].substr(3);

  std::vector<std::pair<std::size_t, std::vector<std::string>>> body;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line);
    if (fields.size() != header.size()) {
      throw ParseError(fmt::format("{}: line {} has {} fields, header has {}", source, line_no,
                                   fields.size(), header.size()),
                       line_no, fields.size());
    }
    body.emplace_back(line_no, std::move(fields));
  }
  if (body.empty()) throw ParseError(fmt::format("{}: no data rows", source), line_no, 0);

  double probe = 0.0;
  const bool time_column =
      is_time_header(header[0]) ||
      (!is_missing_token(body.front().second[0]) && !try_parse(body.front().second[0], probe));
  const std::size_t first_value = time_column ? 1 : 0;
  if (header.size() <= first_value) {
    throw ParseError(fmt::format("{}: no value columns", source), 1, header.size());
  }

  ReturnsFrame frame;
  if (time_column) frame.time_header = header[0];
  frame.labels.assign(header.begin() + static_cast<std::ptrdiff_t>(first_value), header.end());
  const auto p = static_cast<Eigen::Index>(frame.labels.size());
  Matrix raw(static_cast<Eigen::Index>(body.size()), p);
  std::vector<std::string> times;
  for (std::size_t r = 0; r < body.size(); ++r) {
    const auto& [row_line, fields] = body[r];
    times.push_back(time_column ? fields[0] : std::to_string(r + 1));
    for (Eigen::Index c = 0; c < p; ++c) {
      const std::size_t column = first_value + static_cast<std::size_t>(c);
      const double v = parse_field(fields[column], row_line, column + 1, header[column], source);
      if (mode == InputMode::levels && v <= 0.0) {
        throw NonPositiveLevel(fmt::format("{}: non-positive level {:g} at line {}, column {} ({})",
                                           source, v, row_line, column + 1, header[column]),
                               row_line, column + 1);
      }
      raw(static_cast<Eigen::Index>(r), c) = v;
    }
  }

  if (mode == InputMode::returns) {
    frame.values = std::move(raw);
    frame.times = std::move(times);
    return frame;
  }
  if (raw.rows() < 2) {
    throw ParseError(fmt::format("{}: levels mode needs at least two rows", source), line_no, 0);
  }
  const Matrix logs = raw.array().log().matrix();
  frame.values = logs.bottomRows(logs.rows() - 1) - logs.topRows(logs.rows() - 1);
  frame.times.assign(times.begin() + 1, times.end());
  return frame;
}

ReturnsFrame load_csv(const std::filesystem::path& path, InputMode mode) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  return parse_csv(in, mode, path.string());
}

void write_returns_csv(std::ostream& out, const ReturnsFrame& frame) {
  out << frame.time_header;
  for (const auto& label : frame.labels) out << ',' << label;
  out << '\n';
  for (Eigen::Index r = 0; r < frame.rows(); ++r) {
    out << frame.times[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < frame.cols(); ++c) out << ',' << fmt::format("{:.17g}", frame.values(r, c));
    out << '\n';
  }
}

ReturnsFrame frame_from_path(const SimPath& path) {
  ReturnsFrame frame;
  for (Eigen::Index c = 0; c < path.returns.cols(); ++c) frame.labels.push_back(fmt::format("y{}", c + 1));
  for (Eigen::Index r = 0; r < path.returns.rows(); ++r) frame.times.push_back(std::to_string(r + 1));
  frame.values = path.returns;
  return frame;
}

}  // namespace msv
