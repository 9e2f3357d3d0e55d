#include "floatgrip/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace floatgrip {
namespace {

// Plot area inside the viewBox.
constexpr double kLeft = 80.0;
constexpr double kRight = 780.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 350.0;

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                   "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

bool is_position(const std::string& channel) {
  return channel == "px" || channel == "py" || channel == "pz";
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-') s.erase(0, 1);
  return s;
}

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// 1, 2 or 5 times a power of ten, giving about `count` intervals.
double nice_step(double span, int count) {
  const double raw = span / count;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  const double f = r <= 1.0 ? 1.0 : r <= 2.0 ? 2.0 : r <= 5.0 ? 5.0 : 10.0;
  return f * mag;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double step = 1.0;
  int digits = 0;
};

Axis make_axis(double lo, double hi, int count) {
  if (!(hi - lo > 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi))))) {
    lo -= 1.0;
    hi += 1.0;
  }
  Axis a;
  a.step = nice_step(hi - lo, count);
  a.lo = std::floor(lo / a.step) * a.step;
  a.hi = std::ceil(hi / a.step) * a.step;
  a.digits = std::max(0, static_cast<int>(-std::floor(std::log10(a.step) + 1e-9)));
  return a;
}

std::vector<double> ticks(const Axis& a) {
  std::vector<double> out;
  const long n = std::lround((a.hi - a.lo) / a.step);
  for (long i = 0; i <= n; ++i) out.push_back(a.lo + static_cast<double>(i) * a.step);
  return out;
}

}  // namespace

std::vector<std::string> plottable_channels(const TrajectoryLog& log) {
  std::vector<std::string> out;
  for (const auto& c : log.columns) {
    if (c != "t") out.push_back(c);
  }
  return out;
}

std::string plot_svg(const TrajectoryLog& log, const std::vector<std::string>& channels) {
  const int tc = log.column("t");
  std::vector<int> cols;
  for (const auto& ch : channels) {
    const int c = ch == "t" ? -1 : log.column(ch);
    if (c < 0) {
      std::string list;
      for (const auto& a : plottable_channels(log)) list += (list.empty() ? "" : ", ") + a;
      throw std::invalid_argument("unknown channel '" + ch + "'; available: " + list);
    }
    cols.push_back(c);
  }
  if (tc < 0) throw std::invalid_argument("log has no t column");
  if (log.rows.empty()) throw std::invalid_argument("log has no rows");
  if (channels.empty()) throw std::invalid_argument("no channels to plot");

  const bool all_positions = std::all_of(channels.begin(), channels.end(), is_position);
  std::vector<double> scale;
  for (const auto& ch : channels) scale.push_back(is_position(ch) ? 1000.0 : 1.0);

  double tmin = log.rows.front()[tc];
  double tmax = log.rows.back()[tc];
  double vmin = INFINITY;
  double vmax = -INFINITY;
  for (const auto& row : log.rows) {
    tmin = std::min(tmin, row[tc]);
    tmax = std::max(tmax, row[tc]);
    for (size_t i = 0; i < cols.size(); ++i) {
      vmin = std::min(vmin, row[cols[i]] * scale[i]);
      vmax = std::max(vmax, row[cols[i]] * scale[i]);
    }
  }
  const Axis xa = make_axis(tmin, tmax, 10);
  const Axis ya = make_axis(vmin, vmax, 6);
  const auto sx = [&](double t) { return kLeft + (t - xa.lo) / (xa.hi - xa.lo) * (kRight - kLeft); };
  const auto sy = [&](double v) { return kBottom - (v - ya.lo) / (ya.hi - ya.lo) * (kBottom - kTop); };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(kPlotWidth) +
         "\" height=\"" + std::to_string(kPlotHeight) + "\" viewBox=\"0 0 " +
         std::to_string(kPlotWidth) + " " + std::to_string(kPlotHeight) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<rect width=\"800\" height=\"400\" fill=\"white\"/>\n";
  std::string title = log.meta_value("scenario");
  const std::string model = log.meta_value("model");
  if (!model.empty()) title += " (" + model + ")";
  out += "<text x=\"" + fixed(kLeft, 0) + "\" y=\"22\" font-size=\"13\">" + escape(title) +
         "</text>\n";

  out += "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double t : ticks(xa)) {
    const std::string x = fixed(sx(t), 2);
    out += "<line x1=\"" + x + "\" y1=\"" + fixed(kTop, 2) + "\" x2=\"" + x + "\" y2=\"" +
           fixed(kBottom, 2) + "\"/>\n";
  }
  for (double v : ticks(ya)) {
    const std::string y = fixed(sy(v), 2);
    out += "<line x1=\"" + fixed(kLeft, 2) + "\" y1=\"" + y + "\" x2=\"" + fixed(kRight, 2) +
           "\" y2=\"" + y + "\"/>\n";
  }
  out += "</g>\n";
  out += "<rect x=\"" + fixed(kLeft, 2) + "\" y=\"" + fixed(kTop, 2) + "\" width=\"" +
         fixed(kRight - kLeft, 2) + "\" height=\"" + fixed(kBottom - kTop, 2) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

  out += "<g text-anchor=\"middle\">\n";
  for (double t : ticks(xa)) {
    out += "<text x=\"" + fixed(sx(t), 2) + "\" y=\"" + fixed(kBottom + 16, 2) + "\">" +
           fixed(t, xa.digits) + "</text>\n";
  }
  out += "<text x=\"" + fixed((kLeft + kRight) / 2, 2) + "\" y=\"390\">time (s)</text>\n";
  out += "</g>\n<g text-anchor=\"end\">\n";
  for (double v : ticks(ya)) {
    out += "<text x=\"" + fixed(kLeft - 6, 2) + "\" y=\"" + fixed(sy(v) + 4, 2) + "\">" +
           fixed(v, ya.digits) + "</text>\n";
  }
  out += "</g>\n";
  const std::string unit = all_positions ? "position (mm)" : "value (position channels in mm)";
  out += "<text transform=\"translate(16 " + fixed((kTop + kBottom) / 2, 2) +
         ") rotate(-90)\" text-anchor=\"middle\">" + unit + "</text>\n";

  for (size_t i = 0; i < cols.size(); ++i) {
    const char* color = kColors[i % std::size(kColors)];
    // Keep the first, last, lowest and highest sample of each pixel column.
    std::vector<size_t> keep;
    size_t k = 0;
    const size_t n = log.rows.size();
    while (k < n) {
      const long column = std::lround(std::floor(sx(log.rows[k][tc])));
      size_t end = k;
      size_t lo = k;
      size_t hi = k;
      while (end < n && std::lround(std::floor(sx(log.rows[end][tc]))) == column) {
        if (log.rows[end][cols[i]] < log.rows[lo][cols[i]]) lo = end;
        if (log.rows[end][cols[i]] > log.rows[hi][cols[i]]) hi = end;
        ++end;
      }
      std::vector<size_t> group{k, lo, hi, end - 1};
      std::sort(group.begin(), group.end());
      group.erase(std::unique(group.begin(), group.end()), group.end());
      keep.insert(keep.end(), group.begin(), group.end());
      k = end;
    }
    out += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"1.5\" points=\"";
    for (size_t j = 0; j < keep.size(); ++j) {
      const auto& row = log.rows[keep[j]];
      if (j) out += ' ';
      out += fixed(sx(row[tc]), 2) + "," + fixed(sy(row[cols[i]] * scale[i]), 2);
    }
    out += "\"/>\n";
    const double lx = kRight - 90.0 * static_cast<double>(cols.size() - i);
    out += "<line x1=\"" + fixed(lx, 2) + "\" y1=\"18\" x2=\"" + fixed(lx + 20, 2) +
           "\" y2=\"18\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fixed(lx + 24, 2) + "\" y=\"22\">" + escape(channels[i]) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace floatgrip
