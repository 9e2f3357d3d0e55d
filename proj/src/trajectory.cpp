#include "floatgrip/trajectory.hpp"

#include <stdexcept>

#include "floatgrip/errors.hpp"
#include "floatgrip/text.hpp"

namespace floatgrip {

int TrajectoryLog::column(std::string_view name) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::string TrajectoryLog::meta_value(std::string_view key) const {
  for (const auto& [k, v] : meta) {
    if (k == key) return v;
  }
  return {};
}

std::vector<double> TrajectoryLog::series(std::string_view name) const {
  const int c = column(name);
  if (c < 0) throw std::out_of_range("log has no column '" + std::string(name) + "'");
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[c]);
  return out;
}

std::string write_csv(const TrajectoryLog& log) {
  std::string out;
  for (const auto& [k, v] : log.meta) out += "# " + k + "=" + v + "\n";
  for (size_t i = 0; i < log.columns.size(); ++i) {
    if (i) out += ',';
    out += log.columns[i];
  }
  out += '\n';
  for (const auto& r : log.rows) {
    for (size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += format_double(r[i]);
    }
    out += '\n';
  }
  return out;
}

TrajectoryLog read_csv(std::string_view text) {
  TrajectoryLog log;
  bool have_header = false;
  int line_no = 0;
  for (std::string_view line : split_lines(text)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (have_header) {
        throw ParseError(ParseError::Kind::Syntax, line_no, 1, "metadata after column header");
      }
      std::string_view body = line.substr(1);
      while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
      const auto eq = body.find('=');
      if (eq == std::string_view::npos) {
        throw ParseError(ParseError::Kind::Syntax, line_no, 1, "metadata line without '='");
      }
      log.meta.emplace_back(std::string(body.substr(0, eq)), std::string(body.substr(eq + 1)));
      continue;
    }
    const auto fields = split(line, ',');
    if (!have_header) {
      for (auto f : fields) {
        if (f.empty()) throw ParseError(ParseError::Kind::Syntax, line_no, 1, "empty column name");
        log.columns.emplace_back(f);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != log.columns.size()) {
      throw ParseError(ParseError::Kind::Syntax, line_no, 1,
                       "row has " + std::to_string(fields.size()) + " fields, expected " +
                           std::to_string(log.columns.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    int column = 1;
    for (auto f : fields) {
      const auto v = parse_double(f);
      if (!v) {
        throw ParseError(ParseError::Kind::Syntax, line_no, column,
                         "bad number '" + std::string(f) + "'");
      }
      row.push_back(*v);
      column += static_cast<int>(f.size()) + 1;
    }
    log.rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError(ParseError::Kind::Syntax, line_no, 1, "missing column header");
  return log;
}

}  // namespace floatgrip
