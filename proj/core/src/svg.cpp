#include "gelfand/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace gelfand {

namespace {

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '&') out += "&amp;";
        else if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else out += c;
    }
    return out;
}

// Display-only number formatting for tick and marker labels.
std::string short_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad() {
        if (lo > hi) {
            lo = 0;
            hi = 1;
        }
        if (lo == hi) {
            lo -= 0.5;
            hi += 0.5;
        }
        double w = hi - lo;
        lo -= 0.05 * w;
        hi += 0.05 * w;
    }
};

// Tick step 1/2/5 * 10^k giving roughly the requested count.
std::vector<double> ticks(const Range& r, int want) {
    double raw = (r.hi - r.lo) / want;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    std::vector<double> out;
    double first = std::ceil(r.lo / step) * step;
    for (double t = first; t <= r.hi + 1e-12 * step; t += step) out.push_back(t == 0 ? 0 : t);
    return out;
}

}  // namespace

std::string render_svg_plot(const PlotSpec& spec) {
    const double ml = 70, mr = 20, mt = spec.title.empty() ? 20 : 44, mb = 50;
    const double W = spec.width, H = spec.height;
    const double pw = W - ml - mr, ph = H - mt - mb;
    if (pw <= 0 || ph <= 0) throw std::invalid_argument("render_svg_plot: plot area is empty");

    Range rx, ry;
    for (const auto& s : spec.series) {
        for (double v : s.x) rx.add(v);
        for (double v : s.y) ry.add(v);
    }
    for (const auto& m : spec.markers) {
        rx.add(m.x);
        ry.add(m.y);
    }
    for (double v : spec.vlines) rx.add(v);
    rx.pad();
    ry.pad();

    auto X = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto Y = [&](double v) { return mt + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + short_num(W) + "\" height=\"" +
           short_num(H) + "\" viewBox=\"0 0 " + short_num(W) + " " + short_num(H) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!spec.title.empty())
        svg += "<text x=\"" + short_num(W / 2) +
               "\" y=\"26\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" +
               escape(spec.title) + "</text>\n";

    // Grid and ticks.
    for (double t : ticks(rx, 6)) {
        double x = X(t);
        svg += "<line x1=\"" + short_num(x) + "\" y1=\"" + short_num(mt) + "\" x2=\"" +
               short_num(x) + "\" y2=\"" + short_num(mt + ph) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + short_num(x) + "\" y=\"" + short_num(mt + ph + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               short_num(t) + "</text>\n";
    }
    for (double t : ticks(ry, 6)) {
        double y = Y(t);
        svg += "<line x1=\"" + short_num(ml) + "\" y1=\"" + short_num(y) + "\" x2=\"" +
               short_num(ml + pw) + "\" y2=\"" + short_num(y) +
               "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + short_num(ml - 6) + "\" y=\"" + short_num(y + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               short_num(t) + "</text>\n";
    }

    // Axes.
    svg += "<rect x=\"" + short_num(ml) + "\" y=\"" + short_num(mt) + "\" width=\"" +
           short_num(pw) + "\" height=\"" + short_num(ph) +
           "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    if (!spec.xlabel.empty())
        svg += "<text x=\"" + short_num(ml + pw / 2) + "\" y=\"" + short_num(H - 10) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
               escape(spec.xlabel) + "</text>\n";
    if (!spec.ylabel.empty())
        svg += "<text x=\"16\" y=\"" + short_num(mt + ph / 2) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
               "transform=\"rotate(-90 16 " +
               short_num(mt + ph / 2) + ")\">" + escape(spec.ylabel) + "</text>\n";

    for (double v : spec.vlines) {
        double x = X(v);
        svg += "<line x1=\"" + short_num(x) + "\" y1=\"" + short_num(mt) + "\" x2=\"" +
               short_num(x) + "\" y2=\"" + short_num(mt + ph) +
               "\" stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"5 4\"/>\n";
    }

    int legend_row = 0;
    for (const auto& s : spec.series) {
        if (s.x.size() != s.y.size()) throw std::invalid_argument("render_svg_plot: x/y mismatch");
        std::string pts;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            pts += short_num(X(s.x[i])) + "," + short_num(Y(s.y[i])) + " ";
        }
        if (!pts.empty()) pts.pop_back();
        svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + s.color +
               "\" stroke-width=\"1.6\"" + (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
        if (!s.label.empty()) {
            double ly = mt + 16 + 18 * legend_row++;
            svg += "<line x1=\"" + short_num(ml + pw - 150) + "\" y1=\"" + short_num(ly - 4) +
                   "\" x2=\"" + short_num(ml + pw - 126) + "\" y2=\"" + short_num(ly - 4) +
                   "\" stroke=\"" + s.color + "\" stroke-width=\"1.6\"" +
                   (s.dashed ? " stroke-dasharray=\"6 4\"" : "") + "/>\n";
            svg += "<text x=\"" + short_num(ml + pw - 120) + "\" y=\"" + short_num(ly) +
                   "\" font-family=\"sans-serif\" font-size=\"11\">" + escape(s.label) +
                   "</text>\n";
        }
    }

    for (const auto& m : spec.markers) {
        svg += "<circle cx=\"" + short_num(X(m.x)) + "\" cy=\"" + short_num(Y(m.y)) +
               "\" r=\"4\" fill=\"" + m.color + "\"/>\n";
        if (!m.label.empty())
            svg += "<text x=\"" + short_num(X(m.x) + 7) + "\" y=\"" + short_num(Y(m.y) - 7) +
                   "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" + m.color + "\">" +
                   escape(m.label) + "</text>\n";
    }

    svg += "</svg>\n";
    return svg;
}

}  // namespace gelfand
