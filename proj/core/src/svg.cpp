#include "ivtf/svg.hpp"

#include <cmath>
#include <cstdio>

namespace ivtf::svg {

std::string num(double v)
{
    if (!std::isfinite(v))
        return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s(buf);
    if (s == "-0.000")
        s = "0.000";
    return s;
}

std::string escape(std::string_view text)
{
    std::string out;
    for (const char c : text)
    {
        switch (c)
        {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '"':
            out += "&quot;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

Document::Document(double width, double height) : width_(width), height_(height) {}

void Document::line(double x1, double y1, double x2, double y2, std::string_view stroke, double width,
                    std::string_view dash)
{
    body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" + num(y2) +
             "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + num(width) + "\"";
    if (!dash.empty())
        body_ += " stroke-dasharray=\"" + std::string(dash) + "\"";
    body_ += "/>\n";
}

void Document::rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke)
{
    body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" + num(h) +
             "\" fill=\"" + std::string(fill) + "\" stroke=\"" + std::string(stroke) + "\"/>\n";
}

void Document::circle(double cx, double cy, double r, std::string_view fill, std::string_view stroke)
{
    body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" fill=\"" +
             std::string(fill) + "\" stroke=\"" + std::string(stroke) + "\"/>\n";
}

void Document::polyline(const std::string& points, std::string_view stroke, double width, std::string_view dash)
{
    body_ += "<polyline fill=\"none\" points=\"" + points + "\" stroke=\"" + std::string(stroke) +
             "\" stroke-width=\"" + num(width) + "\"";
    if (!dash.empty())
        body_ += " stroke-dasharray=\"" + std::string(dash) + "\"";
    body_ += "/>\n";
}

void Document::text(double x, double y, std::string_view content, double size, std::string_view anchor,
                    double rotate)
{
    body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-family=\"sans-serif\" font-size=\"" + num(size) +
             "\" text-anchor=\"" + std::string(anchor) + "\"";
    if (rotate != 0.0)
        body_ += " transform=\"rotate(" + num(rotate) + " " + num(x) + " " + num(y) + ")\"";
    body_ += ">" + escape(content) + "</text>\n";
}

std::string Document::str() const
{
    return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) + "\" height=\"" + num(height_) +
           "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
           body_ + "</svg>\n";
}

void axes(Document& doc, const Frame& f, std::string_view x_label, std::string_view y_label, int x_ticks, int y_ticks)
{
    doc.rect(f.left, f.top, f.width, f.height, "none", "black");
    for (int i = 0; i <= x_ticks; ++i)
    {
        const double v = f.x_min + (f.x_max - f.x_min) * i / x_ticks;
        const double x = f.px(v);
        doc.line(x, f.top + f.height, x, f.top + f.height + 4, "black");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2g", v);
        doc.text(x, f.top + f.height + 16, buf, 10, "middle");
    }
    for (int j = 0; j <= y_ticks; ++j)
    {
        const double v = f.y_min + (f.y_max - f.y_min) * j / y_ticks;
        const double y = f.py(v);
        doc.line(f.left - 4, y, f.left, y, "black");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2g", v);
        doc.text(f.left - 6, y + 3, buf, 10, "end");
    }
    doc.text(f.left + f.width / 2, f.top + f.height + 32, x_label, 12, "middle");
    doc.text(f.left - 36, f.top + f.height / 2, y_label, 12, "middle", -90);
}

}  // namespace ivtf::svg
