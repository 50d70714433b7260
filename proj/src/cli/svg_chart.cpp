#include "cegan/cli/svg_chart.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace cegan {
namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf"};
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 150;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
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

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finish(bool pad) {
    if (!std::isfinite(lo)) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    } else if (pad) {
      const double p = 0.05 * (hi - lo);
      lo -= p;
      hi += p;
    }
  }
};

}  // namespace

void write_svg(std::ostream& out, const LineChart& chart) {
  Range xr;
  Range yr;
  for (const ChartSeries& s : chart.series) {
    for (const auto& [x, y] : s.points) {
      xr.add(x);
      yr.add(y);
    }
  }
  xr.finish(false);
  yr.finish(true);
  const double plot_w = chart.width - kMarginLeft - kMarginRight;
  const double plot_h = chart.height - kMarginTop - kMarginBottom;
  auto px = [&](double x) { return kMarginLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto py = [&](double y) { return kMarginTop + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * plot_h; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\"" << chart.height
      << "\" viewBox=\"0 0 " << chart.width << ' ' << chart.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << chart.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(chart.title) << "</text>\n";
  const double x0 = kMarginLeft;
  const double y0 = kMarginTop + plot_h;
  out << "<line class=\"axis\" x1=\"" << fmt(x0) << "\" y1=\"" << fmt(y0) << "\" x2=\"" << fmt(x0 + plot_w)
      << "\" y2=\"" << fmt(y0) << "\" stroke=\"black\"/>\n";
  out << "<line class=\"axis\" x1=\"" << fmt(x0) << "\" y1=\"" << fmt(kMarginTop) << "\" x2=\"" << fmt(x0)
      << "\" y2=\"" << fmt(y0) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = xr.lo + (xr.hi - xr.lo) * i / 4.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * i / 4.0;
    out << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(y0 + 18) << "\" text-anchor=\"middle\">"
        << tick_label(xv) << "</text>\n";
    out << "<text x=\"" << fmt(x0 - 8) << "\" y=\"" << fmt(py(yv) + 4) << "\" text-anchor=\"end\">"
        << tick_label(yv) << "</text>\n";
    out << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(py(yv)) << "\" x2=\"" << fmt(x0 + plot_w) << "\" y2=\""
        << fmt(py(yv)) << "\" stroke=\"#dddddd\"/>\n";
  }
  out << "<text x=\"" << fmt(x0 + plot_w / 2) << "\" y=\"" << chart.height - 12 << "\" text-anchor=\"middle\">"
      << escape(chart.x_label) << "</text>\n";
  out << "<text transform=\"translate(18," << fmt(kMarginTop + plot_h / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(chart.y_label) << "</text>\n";

  const std::size_t palette_size = sizeof(kPalette) / sizeof(kPalette[0]);
  for (std::size_t s = 0; s < chart.series.size(); ++s) {
    const ChartSeries& series = chart.series[s];
    const char* color = kPalette[s % palette_size];
    out << "<polyline class=\"series\" data-name=\"" << escape(series.name) << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series.points.size(); ++i) {
      if (i) out << ' ';
      out << fmt(px(series.points[i].first)) << ',' << fmt(py(series.points[i].second));
    }
    out << "\"/>\n";
    for (const auto& [x, y] : series.points) {
      out << "<circle class=\"point\" cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y)) << "\" r=\"3\" fill=\""
          << color << "\"/>\n";
    }
    const double ly = kMarginTop + 10 + 18.0 * static_cast<double>(s);
    const double lx = x0 + plot_w + 15;
    out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly) << "\" x2=\"" << fmt(lx + 20) << "\" y2=\"" << fmt(ly)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(lx + 26) << "\" y=\"" << fmt(ly + 4) << "\">" << escape(series.name) << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace cegan
