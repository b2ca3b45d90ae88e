#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace fplnn::svg {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct Series {
    std::vector<Point> points;
    std::string color;
    std::string label;
    bool markers = false;  ///< draw as discrete markers instead of a polyline
    double width = 1.5;
};

/// Static line/marker plot on a fixed 800×600 viewport.
class Plot {
public:
    static constexpr double kWidth = 800.0;
    static constexpr double kHeight = 600.0;

    Plot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    Plot& line(std::vector<Point> pts, std::string color, std::string label, double width = 1.5) {
        series_.push_back({std::move(pts), std::move(color), std::move(label), false, width});
        return *this;
    }

    Plot& markers(std::vector<Point> pts, std::string color, std::string label) {
        series_.push_back({std::move(pts), std::move(color), std::move(label), true, 1.0});
        return *this;
    }

    [[nodiscard]] std::string render() const {
        double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
        for (const auto& s : series_) {
            for (const auto& p : s.points) {
                if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
                x0 = std::min(x0, p.x);
                x1 = std::max(x1, p.x);
                y0 = std::min(y0, p.y);
                y1 = std::max(y1, p.y);
            }
        }
        if (!std::isfinite(x0)) x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
        pad(x0, x1);
        pad(y0, y1);

        const double left = 70.0, right = kWidth - 150.0, top = 40.0, bottom = kHeight - 60.0;
        auto sx = [&](double x) { return left + (x - x0) / (x1 - x0) * (right - left); };
        auto sy = [&](double y) { return bottom - (y - y0) / (y1 - y0) * (bottom - top); };

        std::ostringstream o;
        o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
        o << "<rect width=\"800\" height=\"600\" fill=\"white\"/>\n";
        o << "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
          << escape(title_) << "</text>\n";
        o << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(right - left)
          << "\" height=\"" << num(bottom - top) << "\" fill=\"none\" stroke=\"black\"/>\n";

        for (double t : ticks(x0, x1)) {
            o << "<line x1=\"" << num(sx(t)) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(sx(t)) << "\" y2=\""
              << num(bottom + 5) << "\" stroke=\"black\"/>";
            o << "<text x=\"" << num(sx(t)) << "\" y=\"" << num(bottom + 20)
              << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << label(t) << "</text>\n";
        }
        for (double t : ticks(y0, y1)) {
            o << "<line x1=\"" << num(left - 5) << "\" y1=\"" << num(sy(t)) << "\" x2=\"" << num(left) << "\" y2=\""
              << num(sy(t)) << "\" stroke=\"black\"/>";
            o << "<text x=\"" << num(left - 8) << "\" y=\"" << num(sy(t) + 4)
              << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << label(t) << "</text>\n";
        }
        o << "<text x=\"" << num((left + right) / 2) << "\" y=\"" << num(kHeight - 20)
          << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << escape(x_label_)
          << "</text>\n";
        o << "<text x=\"18\" y=\"" << num((top + bottom) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
          << num((top + bottom) / 2) << ")\" font-family=\"sans-serif\" font-size=\"13\">" << escape(y_label_)
          << "</text>\n";

        double legend_y = top + 10;
        for (const auto& s : series_) {
            if (s.markers) {
                for (const auto& p : s.points) {
                    if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
                    o << "<circle cx=\"" << num(sx(p.x)) << "\" cy=\"" << num(sy(p.y)) << "\" r=\"4\" fill=\""
                      << s.color << "\"/>\n";
                }
            } else if (!s.points.empty()) {
                o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << num(s.width)
                  << "\" points=\"";
                bool first = true;
                for (const auto& p : s.points) {
                    if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
                    if (!first) o << ' ';
                    o << num(sx(p.x)) << ',' << num(sy(p.y));
                    first = false;
                }
                o << "\"/>\n";
            }
            if (!s.label.empty()) {
                o << "<rect x=\"" << num(right + 12) << "\" y=\"" << num(legend_y - 8) << "\" width=\"12\" height=\"12\" fill=\""
                  << s.color << "\"/>";
                o << "<text x=\"" << num(right + 30) << "\" y=\"" << num(legend_y + 2)
                  << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(s.label) << "</text>\n";
                legend_y += 18;
            }
        }
        o << "</svg>\n";
        return o.str();
    }

private:
    static void pad(double& lo, double& hi) {
        if (hi - lo < 1e-12) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double margin = 0.05 * (hi - lo);
        lo -= margin;
        hi += margin;
    }

    static std::vector<double> ticks(double lo, double hi) {
        const double raw = (hi - lo) / 6.0;
        const double mag = std::pow(10.0, std::floor(std::log10(raw)));
        double step = mag;
        for (double f : {1.0, 2.0, 5.0, 10.0}) {
            if (f * mag >= raw) {
                step = f * mag;
                break;
            }
        }
        std::vector<double> out;
        for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
            out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
        }
        return out;
    }

    static std::string num(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return buf;
    }

    static std::string label(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", v);
        return buf;
    }

    static std::string escape(const std::string& s) {
        std::string out;
        for (char c : s) {
            switch (c) {
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                case '&': out += "&amp;"; break;
                default: out += c;
            }
        }
        return out;
    }

    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
};

}  // namespace fplnn::svg
