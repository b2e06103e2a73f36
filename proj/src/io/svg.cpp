#include "structprobe/io/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace structprobe::io {

namespace {
constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 60, kRight = 150, kTop = 40, kBottom = 50;
constexpr double kPlotW = kWidth - kLeft - kRight, kPlotH = kHeight - kTop - kBottom;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
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

void open_doc(std::ostringstream& o, const std::string& title) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(kWidth) << "\" height=\"" << num(kHeight)
    << "\" viewBox=\"0 0 " << num(kWidth) << ' ' << num(kHeight) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(kWidth / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << escape(title)
    << "</text>\n";
}

void axes(std::ostringstream& o, const std::string& x_label, const std::string& y_label) {
  o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop + kPlotH) << "\" x2=\"" << num(kLeft + kPlotW)
    << "\" y2=\"" << num(kTop + kPlotH) << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(kLeft) << "\" y2=\""
    << num(kTop + kPlotH) << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << num(kLeft + kPlotW / 2) << "\" y=\"" << num(kHeight - 12) << "\" text-anchor=\"middle\">"
    << escape(x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << num(kTop + kPlotH / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << num(kTop + kPlotH / 2) << ")\">" << escape(y_label) << "</text>\n";
}

void x_tick(std::ostringstream& o, double x, const std::string& label) {
  o << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop + kPlotH) << "\" x2=\"" << num(x) << "\" y2=\""
    << num(kTop + kPlotH + 4) << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + kPlotH + 16) << "\" text-anchor=\"middle\">" << label
    << "</text>\n";
}

void y_tick(std::ostringstream& o, double y, const std::string& label) {
  o << "<line x1=\"" << num(kLeft - 4) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft) << "\" y2=\"" << num(y)
    << "\" stroke=\"black\"/>\n";
  o << "<text x=\"" << num(kLeft - 7) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">" << label
    << "</text>\n";
}
} // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series) {
  std::ostringstream o;
  open_doc(o, title);
  axes(o, x_label, y_label);
  std::size_t n = 1;
  for (const auto& s : series) n = std::max(n, s.y.size());
  auto px = [&](std::size_t i) { return n == 1 ? kLeft + kPlotW / 2 : kLeft + kPlotW * double(i) / double(n - 1); };
  auto py = [&](double v) { return kTop + kPlotH * (1.0 - std::clamp(v, 0.0, 1.0)); };
  for (int t = 0; t <= 5; ++t) y_tick(o, py(t / 5.0), num(t / 5.0));
  const std::size_t step = std::max<std::size_t>(1, (n + 9) / 10);
  for (std::size_t i = 0; i < n; i += step) x_tick(o, px(i), std::to_string(i + 1));
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[k].y.size(); ++i) {
      if (i) o << ' ';
      o << num(px(i)) << ',' << num(py(series[k].y[i]));
    }
    o << "\"/>\n";
    const double ly = kTop + 12 + 18 * double(k);
    o << "<line x1=\"" << num(kLeft + kPlotW + 10) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(kLeft + kPlotW + 30)
      << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << num(kLeft + kPlotW + 35) << "\" y=\"" << num(ly + 4) << "\">" << escape(series[k].label)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string histogram_svg(const std::string& title, const std::string& x_label, const Histogram& h) {
  std::ostringstream o;
  open_doc(o, title);
  axes(o, x_label, "graphs");
  const std::size_t bins = h.counts.size();
  const std::size_t peak = bins ? std::max<std::size_t>(1, *std::max_element(h.counts.begin(), h.counts.end())) : 1;
  const double bar_w = bins ? kPlotW / double(bins) : kPlotW;
  for (std::size_t b = 0; b < bins; ++b) {
    const double height = kPlotH * double(h.counts[b]) / double(peak);
    o << "<rect x=\"" << num(kLeft + bar_w * double(b)) << "\" y=\"" << num(kTop + kPlotH - height) << "\" width=\""
      << num(bar_w) << "\" height=\"" << num(height) << "\" fill=\"#1f77b4\" stroke=\"white\" stroke-width=\"0.5\"/>\n";
  }
  for (int t = 0; t <= 4; ++t) {
    y_tick(o, kTop + kPlotH * (1.0 - t / 4.0), num(double(peak) * t / 4.0));
  }
  if (bins) {
    const std::size_t step = std::max<std::size_t>(1, (bins + 9) / 10);
    for (std::size_t b = 0; b <= bins; b += step) x_tick(o, kLeft + bar_w * double(b), num(h.edges[b]));
  }
  o << "<text x=\"" << num(kLeft + kPlotW + 10) << "\" y=\"" << num(kTop + 12) << "\">bins: " << bins << "</text>\n";
  o << "<text x=\"" << num(kLeft + kPlotW + 10) << "\" y=\"" << num(kTop + 30) << "\">" << escape(h.policy)
    << "</text>\n";
  o << "</svg>\n";
  return o.str();
}

} // namespace structprobe::io
