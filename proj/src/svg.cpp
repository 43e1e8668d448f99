#include "netmirror/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace netmirror {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else if (c == '&') out += "&amp;";
    else out += c;
  }
  return out;
}

}  // namespace

std::string svg_plot(const std::vector<PlotSeries>& series, const PlotOptions& opt) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const PlotSeries& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;

  const double left = 60, right = 20, top = 30, bottom = 45;
  const double w = opt.width - left - right, h = opt.height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * w; };
  auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * h; };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.width) + "\" height=\"" +
                    std::to_string(opt.height) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
         "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    out += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(top + h + 15) + "\" text-anchor=\"middle\">" + tick(xv) + "</text>\n";
    out += "<text x=\"" + num(left - 5) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" + tick(yv) + "</text>\n";
  }
  out += "<text x=\"" + num(left + w / 2) + "\" y=\"" + num(opt.height - 8.0) + "\" text-anchor=\"middle\">" +
         escape(opt.x_label) + "</text>\n";
  out += "<text x=\"14\" y=\"" + num(top + h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
         num(top + h / 2) + ")\">" + escape(opt.y_label) + "</text>\n";
  if (!opt.title.empty())
    out += "<text x=\"" + num(left + w / 2) + "\" y=\"18\" text-anchor=\"middle\" font-size=\"13\">" + escape(opt.title) +
           "</text>\n";
  for (double v : opt.vertical_marks)
    if (v >= x0 && v <= x1)
      out += "<line x1=\"" + num(px(v)) + "\" x2=\"" + num(px(v)) + "\" y1=\"" + num(top) + "\" y2=\"" + num(top + h) +
             "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n";

  double legend_y = top + 12;
  for (const PlotSeries& s : series) {
    const std::size_t k = std::min(s.x.size(), s.y.size());
    if (s.line) {
      std::string pts;
      for (std::size_t i = 0; i < k; ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) pts += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
      out += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
    } else {
      for (std::size_t i = 0; i < k; ++i)
        if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
          out += "<circle cx=\"" + num(px(s.x[i])) + "\" cy=\"" + num(py(s.y[i])) + "\" r=\"2.5\" fill=\"" + s.color +
                 "\"/>\n";
    }
    if (!s.label.empty()) {
      out += "<text x=\"" + num(left + 8) + "\" y=\"" + num(legend_y) + "\" fill=\"" + s.color + "\">" + escape(s.label) +
             "</text>\n";
      legend_y += 14;
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace netmirror
