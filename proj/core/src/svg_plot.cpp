#include "twomem/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace twomem {

namespace {

constexpr double kWidth = 760.0;
constexpr double kHeight = 420.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void pad() {
        if (lo > hi) {
            lo = 0.0;
            hi = 1.0;
        }
        if (lo == hi) {
            lo -= 1.0;
            hi += 1.0;
        }
    }
};

double scale(double v, const Range& r, double out_lo, double out_hi) {
    return out_lo + (v - r.lo) / (r.hi - r.lo) * (out_hi - out_lo);
}

std::vector<double> nice_ticks(const Range& r, int target) {
    const double span = r.hi - r.lo;
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (raw <= m * mag) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> ticks;
    for (double t = std::ceil(r.lo / step) * step; t <= r.hi + step * 1e-9; t += step) {
        ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    }
    return ticks;
}

std::string fmt(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

} // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_line(const std::vector<double>& xs, const std::vector<double>& ys,
                       const std::string& color, const std::string& label) {
    lines_.push_back(Line{xs, ys, color, label});
}

void SvgPlot::add_band(const std::vector<double>& xs, const std::vector<double>& lo,
                       const std::vector<double>& hi, const std::string& color) {
    bands_.push_back(Band{xs, lo, hi, color});
}

std::string SvgPlot::render() const {
    Range xr, yr;
    for (const auto& line : lines_) {
        for (double x : line.xs) xr.include(x);
        for (double y : line.ys) yr.include(y);
    }
    for (const auto& band : bands_) {
        for (double x : band.xs) xr.include(x);
        for (double y : band.lo) yr.include(y);
        for (double y : band.hi) yr.include(y);
    }
    xr.pad();
    yr.pad();

    const double x0 = kMarginLeft, x1 = kWidth - kMarginRight;
    const double y0 = kHeight - kMarginBottom, y1 = kMarginTop;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title_ << "</text>\n";

    // axes and ticks
    svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
        << "\" stroke=\"black\"/>\n";
    for (double t : nice_ticks(xr, 6)) {
        const double px = scale(t, xr, x0, x1);
        svg << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\""
            << y0 + 5 << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << px << "\" y=\"" << y0 + 20
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
            << "</text>\n";
    }
    for (double t : nice_ticks(yr, 6)) {
        const double py = scale(t, yr, y0, y1);
        svg << "<line x1=\"" << x0 - 5 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\"" << py
            << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << x0 - 8 << "\" y=\"" << py + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
            << "</text>\n";
    }
    svg << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label_
        << "</text>\n";
    svg << "<text x=\"16\" y=\"" << (y0 + y1) / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
        << "transform=\"rotate(-90 16 " << (y0 + y1) / 2 << ")\">" << y_label_ << "</text>\n";

    for (const auto& band : bands_) {
        if (band.xs.empty()) continue;
        svg << "<path d=\"M";
        for (std::size_t i = 0; i < band.xs.size(); ++i) {
            svg << (i == 0 ? "" : " L") << scale(band.xs[i], xr, x0, x1) << ' '
                << scale(band.hi[i], yr, y0, y1);
        }
        for (std::size_t i = band.xs.size(); i-- > 0;) {
            svg << " L" << scale(band.xs[i], xr, x0, x1) << ' ' << scale(band.lo[i], yr, y0, y1);
        }
        svg << " Z\" fill=\"" << band.color << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    }

    for (const auto& line : lines_) {
        if (line.xs.empty()) continue;
        svg << "<polyline fill=\"none\" stroke=\"" << line.color << "\" stroke-width=\"1.8\" "
            << "points=\"";
        for (std::size_t i = 0; i < line.xs.size(); ++i) {
            svg << scale(line.xs[i], xr, x0, x1) << ',' << scale(line.ys[i], yr, y0, y1) << ' ';
        }
        svg << "\"/>\n";
    }

    double legend_y = y1 + 8;
    for (const auto& line : lines_) {
        if (line.label.empty()) continue;
        svg << "<line x1=\"" << x1 - 150 << "\" y1=\"" << legend_y << "\" x2=\"" << x1 - 120
            << "\" y2=\"" << legend_y << "\" stroke=\"" << line.color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << x1 - 114 << "\" y=\"" << legend_y + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << line.label << "</text>\n";
        legend_y += 16;
    }

    svg << "</svg>\n";
    return svg.str();
}

void SvgPlot::write(const std::string& path) const { write_file(path, render()); }

SvgBandStrip::SvgBandStrip(std::string title, std::string x_label)
    : title_(std::move(title)), x_label_(std::move(x_label)) {}

void SvgBandStrip::add_row(const std::string& label, const std::vector<double>& xs,
                           const std::vector<std::string>& colors) {
    rows_.push_back(Row{label, xs, colors});
}

std::string SvgBandStrip::render() const {
    const double row_height = 26.0;
    const double height = kMarginTop + rows_.size() * row_height + kMarginBottom;
    const double x0 = 150.0, x1 = kWidth - kMarginRight;

    Range xr;
    for (const auto& row : rows_) {
        for (double x : row.xs) xr.include(x);
    }
    xr.pad();

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << height << "\" viewBox=\"0 0 " << kWidth << ' ' << height << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"15\">" << title_ << "</text>\n";

    for (std::size_t r = 0; r < rows_.size(); ++r) {
        const Row& row = rows_[r];
        const double top = kMarginTop + r * row_height;
        svg << "<text x=\"" << x0 - 8 << "\" y=\"" << top + row_height / 2 + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << row.label
            << "</text>\n";
        for (std::size_t i = 0; i < row.xs.size(); ++i) {
            const double left =
                i == 0 ? x0 : scale((row.xs[i - 1] + row.xs[i]) / 2.0, xr, x0, x1);
            const double right = i + 1 == row.xs.size()
                                     ? x1
                                     : scale((row.xs[i] + row.xs[i + 1]) / 2.0, xr, x0, x1);
            svg << "<rect x=\"" << left << "\" y=\"" << top + 3 << "\" width=\"" << right - left
                << "\" height=\"" << row_height - 6 << "\" fill=\"" << row.colors[i] << "\"/>\n";
        }
    }

    const double axis_y = kMarginTop + rows_.size() * row_height + 8;
    for (double t : nice_ticks(xr, 6)) {
        const double px = scale(t, xr, x0, x1);
        svg << "<text x=\"" << px << "\" y=\"" << axis_y + 12
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(t)
            << "</text>\n";
    }
    svg << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << height - 10
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label_
        << "</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

void SvgBandStrip::write(const std::string& path) const { write_file(path, render()); }

} // namespace twomem
