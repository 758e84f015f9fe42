#include "startile/output.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace startile {

std::string fmt(double v) {
    if (v == 0.0) return "0";  // folds -0 too
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& columns) : out_(out), columns_(columns.size()) {
    out_ << kCsvVersion << '\n';
    for (std::size_t k = 0; k < columns.size(); ++k) out_ << (k ? "," : "") << columns[k];
    out_ << '\n';
}

CsvWriter& CsvWriter::cell(double v) { return cell(fmt(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& v) {
    if (filled_ == columns_) throw std::logic_error("CsvWriter: too many cells in row");
    out_ << (filled_ ? "," : "") << v;
    ++filled_;
    return *this;
}

void CsvWriter::end_row() {
    while (filled_ < columns_) cell(std::string());
    out_ << '\n';
    filled_ = 0;
}

void SvgCanvas::polygon(const Polygon& p, const SvgStyle& style) { items_.push_back({Item::polygon, p, 0.0, style}); }

void SvgCanvas::polyline(const std::vector<Point2>& p, const SvgStyle& style) {
    items_.push_back({Item::polyline, p, 0.0, style});
}

void SvgCanvas::circle(Point2 c, double radius_px, const SvgStyle& style) {
    items_.push_back({Item::circle, {c}, radius_px, style});
}

std::size_t SvgCanvas::path_count() const {
    return static_cast<std::size_t>(std::count_if(items_.begin(), items_.end(), [](const Item& i) { return i.kind != Item::circle; }));
}

void SvgCanvas::write(std::ostream& out, double width) const {
    double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
    for (const auto& it : items_)
        for (const auto& p : it.points) {
            x0 = std::min(x0, p.x);
            y0 = std::min(y0, p.y);
            x1 = std::max(x1, p.x);
            y1 = std::max(y1, p.y);
        }
    if (items_.empty()) x0 = y0 = 0, x1 = y1 = 1;
    const double span = std::max({x1 - x0, y1 - y0, 1e-12});
    const double pad = 0.02 * span;
    const double scale = width / (span + 2 * pad);
    const double height = (y1 - y0 + 2 * pad) * scale;
    auto px = [&](Point2 p) { return fmt((p.x - x0 + pad) * scale) + "," + fmt((y1 - p.y + pad) * scale); };

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
        << "\" viewBox=\"0 0 " << fmt(width) << " " << fmt(height) << "\">\n";
    for (const auto& it : items_) {
        const auto& s = it.style;
        const std::string paint = "fill=\"" + s.fill + "\" stroke=\"" + s.stroke + "\" stroke-width=\"" + fmt(s.stroke_width) +
                                  "\"" + (s.opacity < 1 ? " opacity=\"" + fmt(s.opacity) + "\"" : "");
        if (it.kind == Item::circle) {
            const auto xy = px(it.points[0]);
            const auto comma = xy.find(',');
            out << "<circle cx=\"" << xy.substr(0, comma) << "\" cy=\"" << xy.substr(comma + 1) << "\" r=\"" << fmt(it.radius)
                << "\" " << paint << "/>\n";
            continue;
        }
        out << "<path d=\"";
        for (std::size_t k = 0; k < it.points.size(); ++k) out << (k ? " L" : "M") << px(it.points[k]);
        if (it.kind == Item::polygon) out << " Z";
        out << "\" " << paint << "/>\n";
    }
    out << "</svg>\n";
}

std::string type_color(int k) {
    static const char* palette[] = {"#f2c14e", "#5b8e7d", "#bc4b51", "#8cb369", "#4d6cfa", "#f78154", "#9c89b8"};
    return palette[static_cast<std::size_t>(k) % (sizeof palette / sizeof *palette)];
}

}  // namespace startile
