#include <fstream>
#include <sstream>

#include "plrn/geometry.hpp"

namespace plrn::geo {

namespace {

[[noreturn]] void parse_fail(int line, const std::string& what) {
    throw input_error("domain file, line " + std::to_string(line) + ": " + what);
}

} // namespace

DomainWithHoles read_domain(std::istream& in) {
    std::string line;
    int lineno = 0;
    std::vector<Point> outer;
    std::vector<Polygon> holes;
    bool have_outer = false;

    auto read_block = [&](int count) {
        std::vector<Point> pts;
        pts.reserve(count);
        for (int i = 0; i < count; ++i) {
            if (!std::getline(in, line)) parse_fail(lineno + 1, "unexpected end of file in vertex block");
            ++lineno;
            std::istringstream ls(line);
            Point p;
            if (!(ls >> p.x >> p.y)) parse_fail(lineno, "expected two numbers 'x y'");
            pts.push_back(p);
        }
        return pts;
    };

    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue; // blank line
        if (kw[0] == '#') continue;
        int k = 0;
        if (!(ls >> k) || k < 3) parse_fail(lineno, "expected '" + kw + " <count>=3>'");
        if (kw == "polygon") {
            if (have_outer) parse_fail(lineno, "multiple outer polygons");
            outer = read_block(k);
            have_outer = true;
        } else if (kw == "hole") {
            if (!have_outer) parse_fail(lineno, "hole before outer polygon");
            holes.push_back(Polygon{read_block(k)});
        } else {
            parse_fail(lineno, "unknown keyword '" + kw + "'");
        }
    }
    if (!have_outer) parse_fail(lineno, "missing 'polygon' block");

    // Normalize orientation to CCW before validation.
    if (Polygon{outer}.signed_area() < 0.0) std::reverse(outer.begin(), outer.end());
    return DomainWithHoles::make(ConvexPolygon::make(std::move(outer)), std::move(holes));
}

DomainWithHoles read_domain_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open domain file: " + path);
    return read_domain(in);
}

void write_domain(std::ostream& out, const DomainWithHoles& dom) {
    out << "polygon " << dom.outer.vertices().size() << "\n";
    for (const Point& p : dom.outer.vertices())
        out << format_double(p.x) << " " << format_double(p.y) << "\n";
    for (const auto& h : dom.holes) {
        out << "hole " << h.vertices.size() << "\n";
        for (const Point& p : h.vertices)
            out << format_double(p.x) << " " << format_double(p.y) << "\n";
    }
}

void write_domain_file(const std::string& path, const DomainWithHoles& dom) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open for writing: " + path);
    write_domain(out, dom);
}

} // namespace plrn::geo
