#pragma once

#include <string>
#include <vector>

namespace gelfand {

// Minimal deterministic line-plot renderer. No timestamps, no generated ids:
// the same spec always yields the same bytes.
struct PlotSeries {
    std::vector<double> x, y;
    std::string color = "#1f6fb2";
    std::string label;
    bool dashed = false;
};

struct PlotMarker {
    double x = 0, y = 0;
    std::string color = "#c23a3a";
    std::string label;
};

struct PlotSpec {
    std::string title, xlabel, ylabel;
    std::vector<PlotSeries> series;
    std::vector<PlotMarker> markers;
    std::vector<double> vlines;  // dashed vertical guides at data x
    int width = 800, height = 560;
};

std::string render_svg_plot(const PlotSpec& spec);

}  // namespace gelfand
