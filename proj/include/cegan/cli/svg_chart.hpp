#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace cegan {

struct ChartSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;  // (x, y), drawn in order
};

struct LineChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<ChartSeries> series;
  int width = 640;
  int height = 420;
};

// Static SVG: one <polyline class="series"> per series plus one
// <circle class="point"> per point, axes with five ticks each, and a legend.
void write_svg(std::ostream& out, const LineChart& chart);

}  // namespace cegan
