#include "enkf_lab/svg.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>

#include "enkf_lab/errors.hpp"

namespace enkf_lab {

namespace {

constexpr double kWidth = 800.0;
constexpr double kPanelHeight = 360.0;
constexpr double kTitleHeight = 36.0;
constexpr double kMarginLeft = 80.0;
constexpr double kMarginRight = 150.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

constexpr std::array<const char*, 8> kPalette{
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
};

std::string fixed(double v, int precision = 2) {
    if (v == 0.0) v = 0.0;  // no "-0.00"
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
    std::string s(buf, res.ptr);
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string tick_label(double v) {
    if (std::abs(v) < 1e-12) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
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
    double lo;
    double hi;
};

double nice_step(double span, int target_ticks) {
    const double raw = span / target_ticks;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double nice = norm < 1.5 ? 1.0 : norm < 3.0 ? 2.0 : norm < 7.0 ? 5.0 : 10.0;
    return nice * mag;
}

Range padded(double lo, double hi) {
    if (hi - lo <= 0.0) {
        const double pad = std::abs(lo) > 0.0 ? 0.05 * std::abs(lo) : 1.0;
        return {lo - pad, hi + pad};
    }
    return {lo, hi};
}

// Expands the range to whole multiples of the tick step.
Range snap(Range r, double step) {
    return {std::floor(r.lo / step) * step, std::ceil(r.hi / step) * step};
}

void validate(const std::vector<Curve>& curves) {
    if (curves.empty()) throw InvalidInput("svg: no curves to plot");
    for (const Curve& c : curves) {
        if (c.x.empty()) throw InvalidInput("svg: curve '" + c.label + "' has no points");
        if (c.x.size() != c.y.size())
            throw InvalidInput("svg: curve '" + c.label + "' has mismatched x/y lengths");
        for (std::size_t i = 0; i < c.x.size(); ++i)
            if (!std::isfinite(c.x[i]) || !std::isfinite(c.y[i]))
                throw InvalidInput("svg: curve '" + c.label + "' has a non-finite value at index " +
                                   std::to_string(i));
    }
}

void render_panel(std::string& out, const Panel& panel, double top, double height) {
    const double left = kMarginLeft;
    const double right = kWidth - kMarginRight;
    const double plot_top = top + kMarginTop;
    const double bottom = top + height - kMarginBottom;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const Curve& c : panel.curves) {
        for (double v : c.x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
        for (double v : c.y) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
    }
    Range xr = padded(xmin, xmax);
    Range yr = padded(ymin, ymax);
    const double xstep = nice_step(xr.hi - xr.lo, 8);
    const double ystep = nice_step(yr.hi - yr.lo, 6);
    xr = snap(xr, xstep);
    yr = snap(yr, ystep);

    auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * (right - left); };
    auto py = [&](double y) { return bottom - (y - yr.lo) / (yr.hi - yr.lo) * (bottom - plot_top); };

    out += "<g class=\"panel\">\n";
    if (!panel.axes.title.empty())
        out += "<text x=\"" + fixed((left + right) / 2) + "\" y=\"" + fixed(top + 24) +
               "\" text-anchor=\"middle\" font-size=\"16\" font-weight=\"bold\">" +
               escape(panel.axes.title) + "</text>\n";

    out += "<rect x=\"" + fixed(left) + "\" y=\"" + fixed(plot_top) + "\" width=\"" +
           fixed(right - left) + "\" height=\"" + fixed(bottom - plot_top) +
           "\" fill=\"none\" stroke=\"#000\"/>\n";

    for (int i = 0;; ++i) {
        const double v = xr.lo + i * xstep;
        if (v > xr.hi + 1e-9 * xstep) break;
        const double x = px(v);
        out += "<line x1=\"" + fixed(x) + "\" y1=\"" + fixed(bottom) + "\" x2=\"" + fixed(x) +
               "\" y2=\"" + fixed(bottom + 5) + "\" stroke=\"#000\"/>\n";
        out += "<text x=\"" + fixed(x) + "\" y=\"" + fixed(bottom + 18) +
               "\" text-anchor=\"middle\" font-size=\"11\">" + tick_label(v) + "</text>\n";
    }
    for (int i = 0;; ++i) {
        const double v = yr.lo + i * ystep;
        if (v > yr.hi + 1e-9 * ystep) break;
        const double y = py(v);
        out += "<line x1=\"" + fixed(left - 5) + "\" y1=\"" + fixed(y) + "\" x2=\"" + fixed(left) +
               "\" y2=\"" + fixed(y) + "\" stroke=\"#000\"/>\n";
        out += "<text x=\"" + fixed(left - 8) + "\" y=\"" + fixed(y + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">" + tick_label(v) + "</text>\n";
    }
    if (!panel.axes.x_label.empty())
        out += "<text x=\"" + fixed((left + right) / 2) + "\" y=\"" + fixed(bottom + 38) +
               "\" text-anchor=\"middle\" font-size=\"13\">" + escape(panel.axes.x_label) +
               "</text>\n";
    if (!panel.axes.y_label.empty()) {
        const double cy = (plot_top + bottom) / 2;
        out += "<text x=\"20.00\" y=\"" + fixed(cy) + "\" text-anchor=\"middle\" font-size=\"13\" "
               "transform=\"rotate(-90 20.00 " + fixed(cy) + ")\">" + escape(panel.axes.y_label) +
               "</text>\n";
    }

    for (std::size_t k = 0; k < panel.curves.size(); ++k) {
        const Curve& c = panel.curves[k];
        const char* color = kPalette[k % kPalette.size()];
        out += "<polyline fill=\"none\" stroke=\"";
        out += color;
        out += "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < c.x.size(); ++i) {
            if (i) out += ' ';
            out += fixed(px(c.x[i])) + "," + fixed(py(c.y[i]));
        }
        out += "\"/>\n";

        const double ly = plot_top + 16 + 20.0 * static_cast<double>(k);
        out += "<line x1=\"" + fixed(right + 12) + "\" y1=\"" + fixed(ly) + "\" x2=\"" +
               fixed(right + 36) + "\" y2=\"" + fixed(ly) + "\" stroke=\"" + color +
               "\" stroke-width=\"2\"/>\n";
        out += "<text x=\"" + fixed(right + 42) + "\" y=\"" + fixed(ly + 4) + "\" font-size=\"12\">" +
               escape(c.label) + "</text>\n";
    }
    out += "</g>\n";
}

std::string document(const std::vector<Panel>& panels, const std::string& title) {
    for (const Panel& p : panels) validate(p.curves);
    if (panels.empty()) throw InvalidInput("svg: no panels to plot");
    const double header = title.empty() ? 0.0 : kTitleHeight;
    const double height = header + kPanelHeight * static_cast<double>(panels.size());

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fixed(kWidth, 0) +
           "\" height=\"" + fixed(height, 0) + "\" viewBox=\"0 0 " + fixed(kWidth, 0) + " " +
           fixed(height, 0) + "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
    if (!title.empty())
        out += "<text x=\"" + fixed(kWidth / 2) + "\" y=\"26.00\" text-anchor=\"middle\" "
               "font-size=\"18\" font-weight=\"bold\">" + escape(title) + "</text>\n";
    for (std::size_t i = 0; i < panels.size(); ++i)
        render_panel(out, panels[i], header + kPanelHeight * static_cast<double>(i), kPanelHeight);
    out += "</svg>\n";
    return out;
}

}  // namespace

std::string emit_svg(const std::vector<Curve>& curves, const AxesSpec& axes) {
    return document({Panel{axes, curves}}, {});
}

std::string emit_svg_panels(const std::vector<Panel>& panels, const std::string& title) {
    return document(panels, title);
}

}  // namespace enkf_lab
