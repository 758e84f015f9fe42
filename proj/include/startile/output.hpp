#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "startile/geometry.hpp"

namespace startile {

inline constexpr const char* kCsvVersion = "# startile-csv v1";

// 12 significant digits, the format of every floating output.
std::string fmt(double v);

/// Minimal CSV writer: a version comment, a header, then rows.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& columns);
    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(const std::string& v);
    void end_row();

private:
    std::ostream& out_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

struct SvgStyle {
    std::string fill = "none";
    std::string stroke = "#222";
    double stroke_width = 1.0;  // in output pixels
    double opacity = 1.0;
};

/// Collects polygons and polylines in world coordinates and writes a
/// y-up SVG scaled to `width` pixels.
class SvgCanvas {
public:
    void polygon(const Polygon& p, const SvgStyle& style);
    void polyline(const std::vector<Point2>& p, const SvgStyle& style);
    void circle(Point2 c, double radius_px, const SvgStyle& style);
    void write(std::ostream& out, double width = 800.0) const;
    std::size_t path_count() const;

private:
    struct Item {
        enum Kind { polygon, polyline, circle } kind;
        std::vector<Point2> points;
        double radius = 0.0;
        SvgStyle style;
    };
    std::vector<Item> items_;
};

// Fill color for prototile type k.
std::string type_color(int k);

}  // namespace startile
