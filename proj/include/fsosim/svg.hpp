#pragma once

// Minimal standalone-SVG writer for the report plots. Output is fully
// deterministic: fixed-precision coordinates, insertion-ordered elements.

#include <sstream>
#include <string>
#include <string_view>

#include "fsosim/csv.hpp"

namespace fsosim {

class SvgWriter {
public:
    SvgWriter(double width, double height) : width_(width), height_(height) {}

    void rect(double x, double y, double w, double h, std::string_view fill, double opacity = 1.0) {
        body_ << "<rect x=\"" << c(x) << "\" y=\"" << c(y) << "\" width=\"" << c(w) << "\" height=\"" << c(h)
              << "\" fill=\"" << fill << '"';
        if (opacity != 1.0) body_ << " fill-opacity=\"" << c(opacity) << '"';
        body_ << "/>\n";
    }

    void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0) {
        body_ << "<line x1=\"" << c(x1) << "\" y1=\"" << c(y1) << "\" x2=\"" << c(x2) << "\" y2=\"" << c(y2)
              << "\" stroke=\"" << stroke << "\" stroke-width=\"" << c(width) << "\"/>\n";
    }

    void polyline(const std::string& points, std::string_view stroke, double width = 1.0) {
        body_ << "<polyline points=\"" << points << "\" fill=\"none\" stroke=\"" << stroke
              << "\" stroke-width=\"" << c(width) << "\"/>\n";
    }

    void circle(double x, double y, double r, std::string_view fill) {
        body_ << "<circle cx=\"" << c(x) << "\" cy=\"" << c(y) << "\" r=\"" << c(r) << "\" fill=\"" << fill
              << "\"/>\n";
    }

    void text(double x, double y, std::string_view s, double size = 10.0, std::string_view anchor = "start") {
        body_ << "<text x=\"" << c(x) << "\" y=\"" << c(y) << "\" font-size=\"" << c(size)
              << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\">" << escape(s) << "</text>\n";
    }

    std::string str() const {
        std::ostringstream os;
        os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << c(width_) << "\" height=\"" << c(height_)
           << "\" viewBox=\"0 0 " << c(width_) << ' ' << c(height_) << "\">\n"
           << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
           << body_.str() << "</svg>\n";
        return os.str();
    }

    static std::string c(double v) { return format_fixed(v, 2); }

    static std::string escape(std::string_view s) {
        std::string out;
        for (char ch : s) {
            switch (ch) {
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                case '&': out += "&amp;"; break;
                default: out += ch;
            }
        }
        return out;
    }

private:
    double width_, height_;
    std::ostringstream body_;
};

}  // namespace fsosim
