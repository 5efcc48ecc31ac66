#pragma once

#include <charconv>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace detbench {

// Minimal deterministic SVG writer: plain string emission, no library.
// Numbers are written in shortest round-trip form so values embedded in
// geometry can be recovered exactly by parse-back tests.

inline std::string svg_num(double value) {
  char buffer[32];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

struct SvgStyle {
  std::string fill = "none";
  std::string stroke = "black";
  double stroke_width = 1.0;
  std::string dash;       // stroke-dasharray, empty = solid
  double opacity = 1.0;

  std::string str() const {
    std::ostringstream os;
    os << "fill=\"" << fill << "\" stroke=\"" << stroke << "\" stroke-width=\""
       << svg_num(stroke_width) << "\"";
    if (!dash.empty()) os << " stroke-dasharray=\"" << dash << "\"";
    if (opacity != 1.0) os << " opacity=\"" << svg_num(opacity) << "\"";
    return os.str();
  }
};

class SvgCanvas {
 public:
  SvgCanvas(double width, double height,
            const std::map<std::string, std::string>& root_data = {})
      : width_(width), height_(height) {
    os_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << svg_num(width)
        << "\" height=\"" << svg_num(height) << "\" viewBox=\"0 0 " << svg_num(width) << ' '
        << svg_num(height) << "\"";
    for (const auto& [key, value] : root_data) os_ << " data-" << key << "=\"" << value << "\"";
    os_ << ">\n";
    os_ << "<rect x=\"0\" y=\"0\" width=\"" << svg_num(width) << "\" height=\""
        << svg_num(height) << "\" fill=\"white\"/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const SvgStyle& style,
            const std::string& extra = "") {
    os_ << "<line x1=\"" << svg_num(x1) << "\" y1=\"" << svg_num(y1) << "\" x2=\"" << svg_num(x2)
        << "\" y2=\"" << svg_num(y2) << "\" " << style.str();
    if (!extra.empty()) os_ << ' ' << extra;
    os_ << "/>\n";
  }

  void rect(double x, double y, double w, double h, const SvgStyle& style,
            const std::string& extra = "") {
    os_ << "<rect x=\"" << svg_num(x) << "\" y=\"" << svg_num(y) << "\" width=\"" << svg_num(w)
        << "\" height=\"" << svg_num(h) << "\" " << style.str();
    if (!extra.empty()) os_ << ' ' << extra;
    os_ << "/>\n";
  }

  void circle(double cx, double cy, double r, const SvgStyle& style,
              const std::string& extra = "") {
    os_ << "<circle cx=\"" << svg_num(cx) << "\" cy=\"" << svg_num(cy) << "\" r=\"" << svg_num(r)
        << "\" " << style.str();
    if (!extra.empty()) os_ << ' ' << extra;
    os_ << "/>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& points, const SvgStyle& style,
                const std::string& extra = "") {
    os_ << "<polyline points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (i) os_ << ' ';
      os_ << svg_num(points[i].first) << ',' << svg_num(points[i].second);
    }
    os_ << "\" " << style.str();
    if (!extra.empty()) os_ << ' ' << extra;
    os_ << "/>\n";
  }

  void text(double x, double y, const std::string& content, double font_size = 11.0,
            const std::string& anchor = "start", const std::string& fill = "black",
            const std::string& extra = "") {
    os_ << "<text x=\"" << svg_num(x) << "\" y=\"" << svg_num(y)
        << "\" font-family=\"sans-serif\" font-size=\"" << svg_num(font_size)
        << "\" text-anchor=\"" << anchor << "\" fill=\"" << fill << "\"";
    if (!extra.empty()) os_ << ' ' << extra;
    os_ << '>' << escape(content) << "</text>\n";
  }

  void group_begin(const std::string& attrs) { os_ << "<g " << attrs << ">\n"; }
  void group_end() { os_ << "</g>\n"; }
  void raw(const std::string& s) { os_ << s; }

  double width() const { return width_; }
  double height() const { return height_; }

  std::string str() const { return os_.str() + "</svg>\n"; }

  static std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
      switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
      }
    }
    return out;
  }

 private:
  double width_, height_;
  std::ostringstream os_;
};

// Shared palette for per-detector colors (cycled when exhausted).
inline const char* series_color(std::size_t index) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                   "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};
  return kPalette[index % (sizeof(kPalette) / sizeof(kPalette[0]))];
}

// Whisker line style keyed by the detector's invariance-class suffix:
// translation-only dotted, scale dash-dot, affine dashed, otherwise solid.
inline std::string invariance_dash(const std::string& detector) {
  auto ends_with = [&](const char* suffix) {
    const std::string s(suffix);
    return detector.size() >= s.size() &&
           detector.compare(detector.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with("-T")) return "1,3";
  if (ends_with("-S")) return "8,3,1,3";
  if (ends_with("-A")) return "6,3";
  return "";
}

}  // namespace detbench
