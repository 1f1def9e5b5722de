#pragma once

#include <string>
#include <string_view>

namespace ivtf::svg {

// Small SVG writer. Coordinates are printed with fixed precision so the same
// drawing always serializes to the same bytes.
class Document
{
  public:
    Document(double width, double height);

    void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0,
              std::string_view dash = {});
    void rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke = "none");
    void circle(double cx, double cy, double r, std::string_view fill, std::string_view stroke = "none");
    void polyline(const std::string& points, std::string_view stroke, double width = 1.0, std::string_view dash = {});
    void text(double x, double y, std::string_view content, double size = 12.0, std::string_view anchor = "start",
              double rotate = 0.0);

    std::string str() const;

  private:
    double width_;
    double height_;
    std::string body_;
};

std::string num(double v);
std::string escape(std::string_view text);

// Maps data coordinates to a plotting rectangle (y grows upwards in data space).
struct Frame
{
    double left, top, width, height;
    double x_min, x_max, y_min, y_max;

    double px(double x) const { return left + (x - x_min) / (x_max - x_min) * width; }
    double py(double y) const { return top + height - (y - y_min) / (y_max - y_min) * height; }
};

void axes(Document& doc, const Frame& f, std::string_view x_label, std::string_view y_label, int x_ticks = 5,
          int y_ticks = 5);

}  // namespace ivtf::svg
