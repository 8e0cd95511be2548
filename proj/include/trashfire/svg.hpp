#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace trashfire::svg {

/// Minimal plot emission: enough SVG for scatter/forest/bar diagnostics,
/// no styling ambitions.
class Canvas {
public:
  Canvas(double width, double height) : width_(width), height_(height) {
    body_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
          << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
          << height << "\">\n";
    body_ << "<rect width=\"" << width << "\" height=\"" << height
          << "\" fill=\"white\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& color,
            double stroke_width = 1.0, bool dashed = false) {
    body_ << "<line x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\"" << x2
          << "\" y2=\"" << y2 << "\" stroke=\"" << color << "\" stroke-width=\""
          << stroke_width << "\"";
    if (dashed) body_ << " stroke-dasharray=\"4 3\"";
    body_ << "/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& color) {
    body_ << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"" << r
          << "\" fill=\"" << color << "\"/>\n";
  }

  void rect(double x, double y, double w, double h, const std::string& color) {
    body_ << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w
          << "\" height=\"" << h << "\" fill=\"" << color << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, double size = 11.0,
            const std::string& anchor = "start") {
    body_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-size=\"" << size
          << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">"
          << escape(s) << "</text>\n";
  }

  std::string finish() {
    body_ << "</svg>\n";
    return body_.str();
  }

  double width() const { return width_; }
  double height() const { return height_; }

private:
  static std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
      switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out.push_back(c);
      }
    }
    return out;
  }

  double width_, height_;
  std::ostringstream body_;
};

struct Series {
  std::vector<std::pair<double, double>> points;
  std::string color = "steelblue";
  std::string label;
};

/// Scatter with a unit diagonal, for QQ and calibration plots.
inline std::string scatter_with_diagonal(const std::vector<Series>& series,
                                         const std::string& x_label,
                                         const std::string& y_label) {
  const double w = 420, h = 420, m = 45;
  Canvas canvas(w, h);
  double lo = 0.0, hi = 1.0;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      lo = std::min({lo, x, y});
      hi = std::max({hi, x, y});
    }
  if (!(hi > lo)) hi = lo + 1.0;
  auto sx = [&](double v) { return m + (v - lo) / (hi - lo) * (w - 2 * m); };
  auto sy = [&](double v) { return h - m - (v - lo) / (hi - lo) * (h - 2 * m); };

  canvas.line(m, h - m, w - m, h - m, "black");
  canvas.line(m, m, m, h - m, "black");
  canvas.line(sx(lo), sy(lo), sx(hi), sy(hi), "gray", 1.0, true);
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) canvas.circle(sx(x), sy(y), 2.2, s.color);
  double ly = m;
  for (const auto& s : series) {
    if (s.label.empty()) continue;
    canvas.circle(w - m - 80, ly, 3, s.color);
    canvas.text(w - m - 72, ly + 4, s.label);
    ly += 16;
  }
  canvas.text(w / 2, h - 8, x_label, 12, "middle");
  canvas.text(12, h / 2, y_label, 12, "middle");
  return canvas.finish();
}

struct ForestRow {
  std::string label;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool has_interval = false;
};

/// Horizontal forest plot (coefficient +- interval) with a zero line.
inline std::string forest(const std::vector<ForestRow>& rows, const std::string& title) {
  const double row_h = 22, m = 50, label_w = 170;
  const double w = 560;
  const double h = m * 2 + row_h * static_cast<double>(rows.size());
  Canvas canvas(w, h);
  double lo = 0.0, hi = 0.0;
  for (const auto& r : rows) {
    lo = std::min({lo, r.value, r.has_interval ? r.lower : r.value});
    hi = std::max({hi, r.value, r.has_interval ? r.upper : r.value});
  }
  if (!(hi > lo)) hi = lo + 1.0;
  const double pad = 0.07 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto sx = [&](double v) {
    return m + label_w + (v - lo) / (hi - lo) * (w - 2 * m - label_w);
  };
  canvas.text(w / 2, m - 20, title, 13, "middle");
  canvas.line(sx(0.0), m - 8, sx(0.0), h - m + 8, "gray", 1.0, true);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double y = m + row_h * static_cast<double>(i) + row_h / 2;
    canvas.text(m, y + 4, rows[i].label);
    if (rows[i].has_interval) {
      canvas.line(sx(rows[i].lower), y, sx(rows[i].upper), y, "steelblue", 2.0);
      canvas.line(sx(rows[i].lower), y - 4, sx(rows[i].lower), y + 4, "steelblue", 2.0);
      canvas.line(sx(rows[i].upper), y - 4, sx(rows[i].upper), y + 4, "steelblue", 2.0);
    }
    canvas.circle(sx(rows[i].value), y, 3.2, rows[i].has_interval ? "navy" : "darkorange");
  }
  return canvas.finish();
}

/// Horizontal bars with a reference line (TRASH scores vs the broken
/// threshold at 1).
inline std::string bars_with_threshold(const std::vector<std::pair<std::string, double>>& bars,
                                       double threshold, const std::string& title) {
  const double row_h = 24, m = 50, label_w = 170;
  const double w = 560;
  const double h = m * 2 + row_h * static_cast<double>(bars.size());
  Canvas canvas(w, h);
  double hi = threshold;
  for (const auto& [label, v] : bars) hi = std::max(hi, v);
  hi *= 1.1;
  auto sx = [&](double v) { return m + label_w + v / hi * (w - 2 * m - label_w); };
  canvas.text(w / 2, m - 20, title, 13, "middle");
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double y = m + row_h * static_cast<double>(i) + 4;
    canvas.text(m, y + row_h / 2, bars[i].first);
    const bool broken = bars[i].second > threshold;
    canvas.rect(sx(0), y, sx(bars[i].second) - sx(0), row_h - 8,
                broken ? "firebrick" : "seagreen");
  }
  canvas.line(sx(threshold), m - 8, sx(threshold), h - m + 8, "black", 1.5, true);
  canvas.text(sx(threshold) + 4, m - 10, "broken threshold");
  return canvas.finish();
}

}  // namespace trashfire::svg
