#include "floatgrip/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "floatgrip/text.hpp"

namespace floatgrip {

std::string_view to_string(Maneuver m) { return m == Maneuver::Tilt ? "tilt" : "pan"; }

std::optional<Maneuver> parse_maneuver(std::string_view text) {
  if (text == "tilt") return Maneuver::Tilt;
  if (text == "pan") return Maneuver::Pan;
  return std::nullopt;
}

int intended_axis(Maneuver m) { return m == Maneuver::Tilt ? 2 : 1; }
int orthogonal_axis(Maneuver m) { return m == Maneuver::Tilt ? 1 : 2; }

double DeviationReport::headline() const {
  return maneuver == Maneuver::Tilt ? cross_axis().max_abs : cross_axis().span();
}

namespace {

struct Window {
  std::string name;
  long start = 0;
  long end = 0;
};

std::vector<Window> parse_windows(const std::string& text) {
  std::vector<Window> out;
  for (auto part : split(text, ';')) {
    const auto f = split(part, ':');
    if (f.size() != 3) throw std::invalid_argument("malformed phases metadata");
    const auto s = parse_integer(f[1]);
    const auto e = parse_integer(f[2]);
    if (!s || !e || *s < 0 || *e <= *s) throw std::invalid_argument("malformed phases metadata");
    out.push_back({std::string(f[0]), static_cast<long>(*s), static_cast<long>(*e)});
  }
  return out;
}

}  // namespace

DeviationReport cross_axis_deviation(const TrajectoryLog& log, Maneuver maneuver) {
  const std::string phases = log.meta_value("phases");
  if (phases.empty()) throw std::invalid_argument("log has no phase metadata");
  const auto windows = parse_windows(phases);
  long ref = windows.back().start;
  for (const auto& w : windows) {
    if (w.name == "perch") ref = w.end;
  }
  const long last = windows.back().end;
  if (static_cast<long>(log.rows.size()) <= last) {
    throw std::invalid_argument("log is shorter than its phases");
  }
  const int cols[3] = {log.column("px"), log.column("py"), log.column("pz")};
  const int fn = log.column("fn_total");
  if (cols[0] < 0 || cols[1] < 0 || cols[2] < 0) {
    throw std::invalid_argument("log has no base_position columns");
  }
  if (fn < 0) throw std::invalid_argument("log has no fn_total column");

  DeviationReport r;
  r.scenario = log.meta_value("scenario");
  r.model = log.meta_value("model");
  r.maneuver = maneuver;
  r.reference_time = log.rows[ref][0];

  const auto& ref_row = log.rows[ref];
  long touching = 0;
  double signed_peak = 0.0;
  for (long k = ref + 1; k <= last; ++k) {
    const auto& row = log.rows[k];
    for (int a = 0; a < 3; ++a) {
      const double d = (row[cols[a]] - ref_row[cols[a]]) * 1000.0;
      AxisDeviation& ax = r.axes[a];
      ax.max_abs = std::max(ax.max_abs, std::abs(d));
      ax.min = std::min(ax.min, d);
      ax.max = std::max(ax.max, d);
      if (a == intended_axis(maneuver) && std::abs(d) > std::abs(signed_peak)) signed_peak = d;
    }
    if (row[fn] > 0.0) ++touching;
  }
  r.commanded_motion = signed_peak;
  const long steps = last - ref;
  r.contact_fraction = steps > 0 ? static_cast<double>(touching) / static_cast<double>(steps) : 0.0;
  r.perch_success = steps > 0 && r.contact_fraction >= 0.95;

  const std::string joint = log.meta_value("maneuver_joint");
  const auto peak = parse_double(log.meta_value("maneuver_peak"));
  const int jc = joint.empty() ? -1 : log.column("q_joint_" + joint);
  if (jc >= 0 && peak) {
    r.joint_peak_commanded = *peak;
    double reached = 0.0;
    for (long k = ref + 1; k <= last; ++k) {
      const double d = log.rows[k][jc] - ref_row[jc];
      if (d * *peak > 0.0) reached = std::max(reached, std::abs(d));
    }
    r.joint_peak_reached = std::copysign(reached, *peak);
    r.maneuver_completed = reached >= 0.9 * std::abs(*peak);
  }
  return r;
}

DeviationReport cross_axis_deviation(const TrajectoryLog& log) {
  const auto m = parse_maneuver(log.meta_value("maneuver"));
  if (!m) throw std::invalid_argument("log metadata names no pan or tilt maneuver");
  return cross_axis_deviation(log, *m);
}

namespace {

MetricComparison compare_metric(std::string label, double a, double b) {
  MetricComparison m;
  m.label = std::move(label);
  m.a = a;
  m.b = b;
  m.reliable = std::abs(b) >= kResolutionMm;
  m.ratio = m.reliable ? a / b : 0.0;
  if (std::abs(a - b) < kResolutionMm) {
    m.winner = Winner::Tie;
  } else {
    m.winner = a < b ? Winner::A : Winner::B;
  }
  return m;
}

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

ComparisonReport compare(const DeviationReport& a, const DeviationReport& b) {
  if (a.maneuver != b.maneuver) throw std::invalid_argument("cannot compare pan with tilt");
  ComparisonReport c;
  c.maneuver = a.maneuver;
  c.a = a;
  c.b = b;
  const char* names[3] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i) {
    c.axes[i] = compare_metric(std::string(names[i]) + " max|d|", a.axes[i].max_abs, b.axes[i].max_abs);
  }
  const std::string axis = names[orthogonal_axis(a.maneuver)];
  c.headline = compare_metric(
      a.maneuver == Maneuver::Tilt ? axis + " max|d|" : axis + " span", a.headline(), b.headline());
  return c;
}

std::string format_report(const DeviationReport& r) {
  std::string out;
  out += "scenario: " + r.scenario + "\n";
  out += "model: " + r.model + "\n";
  out += "maneuver: " + std::string(to_string(r.maneuver)) + "\n";
  out += "reference_time_s: " + fixed(r.reference_time) + "\n";
  out += "axis  max|d|_mm   min_mm      max_mm      span_mm\n";
  const char* names[3] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i) {
    const AxisDeviation& a = r.axes[i];
    std::string role = i == intended_axis(r.maneuver)   ? " (intended)"
                       : i == orthogonal_axis(r.maneuver) ? " (orthogonal)"
                                                          : "";
    out += pad(names[i], 6) + pad(fixed(a.max_abs), 12) + pad(fixed(a.min), 12) +
           pad(fixed(a.max), 12) + fixed(a.span()) + role + "\n";
  }
  out += "commanded_motion_mm: " + fixed(r.commanded_motion) + "\n";
  out += "cross_axis_headline_mm: " + fixed(r.headline()) + "\n";
  out += "contact_fraction: " + fixed(r.contact_fraction, 4) + "\n";
  out += "perch_success: " + std::string(r.perch_success ? "true" : "false") + "\n";
  out += "joint_peak_commanded_rad: " + fixed(r.joint_peak_commanded, 4) + "\n";
  out += "joint_peak_reached_rad: " + fixed(r.joint_peak_reached, 4) + "\n";
  out += "maneuver_completed: " + std::string(r.maneuver_completed ? "true" : "false") + "\n";
  return out;
}

std::string format_comparison(const ComparisonReport& c) {
  std::string out;
  out += "maneuver: " + std::string(to_string(c.maneuver)) + "\n";
  out += "a: " + c.a.scenario + " (" + c.a.model + ")\n";
  out += "b: " + c.b.scenario + " (" + c.b.model + ")\n";
  out += "metric        a_mm        b_mm        ratio_a/b   winner\n";
  auto row = [&](const MetricComparison& m) {
    const std::string winner = m.winner == Winner::Tie ? "tie"
                               : m.winner == Winner::A ? c.a.model
                                                       : c.b.model;
    out += pad(m.label, 14) + pad(fixed(m.a), 12) + pad(fixed(m.b), 12) +
           pad(m.reliable ? fixed(m.ratio, 2) : "unreliable", 12) + winner + "\n";
  };
  for (const auto& m : c.axes) row(m);
  out += "headline:\n";
  row(c.headline);
  out += "perch_success: a=" + std::string(c.a.perch_success ? "true" : "false") +
         " b=" + (c.b.perch_success ? "true" : "false") + "\n";
  out += "maneuver_completed: a=" + std::string(c.a.maneuver_completed ? "true" : "false") +
         " b=" + (c.b.maneuver_completed ? "true" : "false") + "\n";
  return out;
}

}  // namespace floatgrip
