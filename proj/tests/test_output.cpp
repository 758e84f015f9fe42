#include <sstream>

#include "doctest.h"
#include "startile/output.hpp"

using namespace startile;

TEST_CASE("number format") {
    CHECK(fmt(0.0) == "0");
    CHECK(fmt(-0.0) == "0");
    CHECK(fmt(1.0 / 3.0) == "0.333333333333");
    CHECK(fmt(1e-20) == "1e-20");
    CHECK(fmt(123456789012345.0) == "1.23456789012e+14");
}

TEST_CASE("csv writer") {
    std::ostringstream out;
    CsvWriter csv(out, {"a", "b", "c"});
    csv.cell(1).cell(0.5).cell("x").end_row();
    csv.cell(2).end_row();
    CHECK(out.str() == std::string(kCsvVersion) + "\na,b,c\n1,0.5,x\n2,,\n");
    CHECK_THROWS(csv.cell(1).cell(2).cell(3).cell(4));
}

TEST_CASE("svg canvas") {
    SvgCanvas svg;
    svg.polygon({{0, 0}, {1, 0}, {0, 1}}, {"#f00", "#000", 1.0, 1.0});
    svg.polyline({{0, 0}, {1, 1}}, {});
    svg.circle({0.5, 0.5}, 2.0, {});
    CHECK(svg.path_count() == 2);
    std::ostringstream a, b;
    svg.write(a);
    svg.write(b);
    CHECK(a.str() == b.str());
    const std::string s = a.str();
    CHECK(s.rfind("<?xml", 0) == 0);
    CHECK(s.find("</svg>") != std::string::npos);
    std::size_t paths = 0;
    for (auto p = s.find("<path"); p != std::string::npos; p = s.find("<path", p + 1)) ++paths;
    CHECK(paths == 2);
    // y-up: the apex (0, 1) is drawn above the base.
    CHECK(s.find("Z") != std::string::npos);
}
