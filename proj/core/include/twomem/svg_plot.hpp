#pragma once

#include <string>
#include <vector>

namespace twomem {

// Minimal vector-graphics line plot: axes with ticks, optional shaded bands,
// polyline curves, and a legend. Output is a self-contained SVG document;
// the aggregate CSV next to it is the authoritative artifact.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label);

    void add_line(const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::string& color, const std::string& label);
    void add_band(const std::vector<double>& xs, const std::vector<double>& lo,
                  const std::vector<double>& hi, const std::string& color);

    std::string render() const;
    void write(const std::string& path) const;

private:
    struct Line {
        std::vector<double> xs, ys;
        std::string color, label;
    };
    struct Band {
        std::vector<double> xs, lo, hi;
        std::string color;
    };

    std::string title_, x_label_, y_label_;
    std::vector<Line> lines_;
    std::vector<Band> bands_;
};

// A strip of colored cells, one row per run, used for the evaluation
// memory-choice bands.
class SvgBandStrip {
public:
    SvgBandStrip(std::string title, std::string x_label);
    void add_row(const std::string& label, const std::vector<double>& xs,
                 const std::vector<std::string>& colors);
    std::string render() const;
    void write(const std::string& path) const;

private:
    struct Row {
        std::string label;
        std::vector<double> xs;
        std::vector<std::string> colors;
    };
    std::string title_, x_label_;
    std::vector<Row> rows_;
};

} // namespace twomem
