#ifndef BEAMTRACE_SVG_HPP
#define BEAMTRACE_SVG_HPP

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamtrace {

// Minimal deterministic SVG line plot: fixed canvas, linear axes, one
// polyline per curve. Coordinates are printed with fixed precision so the
// output is byte-stable for identical data.
class SvgPlot {
  public:
    SvgPlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void add_curve(const std::vector<double>& x, const std::vector<double>& y,
                   const std::string& color, const std::string& dash = "") {
        if (x.size() != y.size() || x.empty())
            throw std::invalid_argument("svg: curve needs matching non-empty x/y");
        curves_.push_back({x, y, color, dash});
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!std::isfinite(x[i]) || !std::isfinite(y[i])) continue;
            x_min_ = std::min(x_min_, x[i]);
            x_max_ = std::max(x_max_, x[i]);
            y_min_ = std::min(y_min_, y[i]);
            y_max_ = std::max(y_max_, y[i]);
        }
    }

    std::string render() const {
        if (curves_.empty()) throw std::invalid_argument("svg: no curves");
        double x_lo = x_min_, x_hi = x_max_, y_lo = y_min_, y_hi = y_max_;
        if (!(x_hi > x_lo)) x_hi = x_lo + 1.0;
        if (!(y_hi > y_lo)) y_hi = y_lo + 1.0;
        const double y_pad = 0.05 * (y_hi - y_lo);
        y_lo -= y_pad;
        y_hi += y_pad;

        auto px = [&](double x) { return ml_ + (x - x_lo) / (x_hi - x_lo) * pw_; };
        auto py = [&](double y) { return mt_ + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph_; };
        auto num = [](double v) {
            char b[32];
            std::snprintf(b, sizeof(b), "%.2f", v);
            return std::string(b);
        };
        auto tick = [](double v) {
            char b[32];
            std::snprintf(b, sizeof(b), "%g", v);
            return std::string(b);
        };

        std::string s;
        s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 900 620\" "
             "font-family=\"monospace\" font-size=\"13\">\n";
        s += "<rect width=\"900\" height=\"620\" fill=\"white\"/>\n";
        s += "<text x=\"450\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" + title_ +
             "</text>\n";
        s += "<rect x=\"" + num(ml_) + "\" y=\"" + num(mt_) + "\" width=\"" + num(pw_) +
             "\" height=\"" + num(ph_) + "\" fill=\"none\" stroke=\"black\"/>\n";

        for (int i = 0; i <= 5; ++i) {
            const double xv = x_lo + (x_hi - x_lo) * i / 5.0;
            const double yv = y_lo + (y_hi - y_lo) * i / 5.0;
            s += "<line x1=\"" + num(px(xv)) + "\" y1=\"" + num(mt_ + ph_) + "\" x2=\"" +
                 num(px(xv)) + "\" y2=\"" + num(mt_ + ph_ + 5) + "\" stroke=\"black\"/>\n";
            s += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(mt_ + ph_ + 20) +
                 "\" text-anchor=\"middle\">" + tick(xv) + "</text>\n";
            s += "<line x1=\"" + num(ml_ - 5) + "\" y1=\"" + num(py(yv)) + "\" x2=\"" + num(ml_) +
                 "\" y2=\"" + num(py(yv)) + "\" stroke=\"black\"/>\n";
            s += "<text x=\"" + num(ml_ - 8) + "\" y=\"" + num(py(yv) + 4) +
                 "\" text-anchor=\"end\">" + tick(yv) + "</text>\n";
        }
        s += "<text x=\"450\" y=\"608\" text-anchor=\"middle\">" + x_label_ + "</text>\n";
        s += "<text x=\"16\" y=\"310\" text-anchor=\"middle\" transform=\"rotate(-90 16 310)\">" +
             y_label_ + "</text>\n";

        for (const auto& c : curves_) {
            // decimate to at most 2000 points per polyline
            const std::size_t n = c.x.size();
            const std::size_t stride = (n + 1999) / 2000;
            s += "<polyline fill=\"none\" stroke=\"" + c.color + "\"";
            if (!c.dash.empty()) s += " stroke-dasharray=\"" + c.dash + "\"";
            s += " points=\"";
            bool first = true;
            for (std::size_t i = 0; i < n; i += stride) {
                if (!std::isfinite(c.x[i]) || !std::isfinite(c.y[i])) continue;
                if (!first) s += ' ';
                s += num(px(c.x[i])) + "," + num(py(c.y[i]));
                first = false;
            }
            if (stride > 1 && (n - 1) % stride != 0 && std::isfinite(c.x[n - 1]) &&
                std::isfinite(c.y[n - 1]))
                s += " " + num(px(c.x[n - 1])) + "," + num(py(c.y[n - 1]));
            s += "\"/>\n";
        }
        s += "</svg>\n";
        return s;
    }

  private:
    struct Curve {
        std::vector<double> x, y;
        std::string color, dash;
    };
    std::string title_, x_label_, y_label_;
    std::vector<Curve> curves_;
    double x_min_ = std::numeric_limits<double>::infinity();
    double x_max_ = -std::numeric_limits<double>::infinity();
    double y_min_ = std::numeric_limits<double>::infinity();
    double y_max_ = -std::numeric_limits<double>::infinity();
    static constexpr double ml_ = 70.0, mt_ = 40.0, pw_ = 790.0, ph_ = 540.0;
};

}  // namespace beamtrace

#endif
