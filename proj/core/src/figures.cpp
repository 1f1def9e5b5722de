#include "ivtf/figures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ivtf/svg.hpp"

namespace ivtf {

namespace {

std::string_view class_color(Significance s)
{
    switch (s)
    {
    case Significance::OnePercent:
        return "#d62728";
    case Significance::FivePercentOnly:
        return "#1f4fd6";
    case Significance::Insignificant:
        break;
    }
    return "#000000";
}

std::string cv_curve(const svg::Frame& f, const CVTable& table)
{
    std::string pts;
    for (int k = 0; k <= 400; ++k)
    {
        const double x = 0.999 * k / 400.0;
        const double big_f = 10.0 * x / (1.0 - x);
        const double cv = cv_lookup(table, big_f);
        if (!std::isfinite(cv))
            continue;
        pts += svg::num(f.px(x)) + "," + svg::num(f.py(standardize_t(cv))) + " ";
    }
    return pts;
}

// Diverging blue-white-red palette on [-lim, lim].
std::string diverging(double v, double lim)
{
    const double s = std::clamp(v / lim, -1.0, 1.0);
    int r = 255, g = 255, b = 255;
    if (s > 0)
    {
        g = b = static_cast<int>(std::lround(255 * (1 - s)));
    }
    else
    {
        r = g = static_cast<int>(std::lround(255 * (1 + s)));
    }
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

}  // namespace

std::string render_significance_figure(std::span<const ComparisonRecord> records, const CVTable& cv5,
                                       const CVTable& cv1)
{
    const double panel = 260, gap = 70, margin = 60;
    svg::Document doc(margin + 3 * panel + 2 * gap + 20, panel + 2 * margin);
    const char* titles[] = {"t", "AR", "tF"};
    for (int p = 0; p < 3; ++p)
    {
        const svg::Frame f{margin + p * (panel + gap), margin, panel, panel, 0, 1, 0, 1};
        svg::axes(doc, f, "(F/10)/(1+F/10)", "(t²/1.96²)/(1+t²/1.96²)");
        doc.text(f.left + panel / 2, margin - 12, titles[p], 14, "middle");
        if (p == 2)
        {
            doc.polyline(cv_curve(f, cv5), "#1f4fd6", 1.2);
            doc.polyline(cv_curve(f, cv1), "#d62728", 1.2);
        }
        else
        {
            doc.line(f.px(0), f.py(standardize_t(1.96)), f.px(1), f.py(standardize_t(1.96)), "#888888", 0.8, "4,3");
        }
        for (const auto& r : records)
        {
            std::optional<Significance> s;
            if (p == 0)
                s = r.t_class;
            else if (p == 1)
                s = r.ar_class;
            else
                s = r.tf_class;
            if (!s)
                continue;
            doc.circle(f.px(r.coords.x), f.py(r.coords.y), 2.5, "none", class_color(*s));
        }
    }
    return doc.str();
}

std::string render_loglength_histogram(const LogLengthReport& report)
{
    svg::Document doc(560, 380);
    double lo = -0.5, hi = 1.0;
    std::size_t peak = 1;
    for (const auto& [k, c] : report.bins)
    {
        lo = std::min(lo, k * report.bin_width);
        hi = std::max(hi, (k + 1) * report.bin_width);
        peak = std::max(peak, c);
    }
    const svg::Frame f{70, 40, 460, 280, lo, hi, 0, static_cast<double>(peak) * 1.1};
    svg::axes(doc, f, "ln(length tF / length AR)", "count");
    for (const auto& [k, c] : report.bins)
    {
        const double x0 = f.px(k * report.bin_width);
        const double x1 = f.px((k + 1) * report.bin_width);
        const double y = f.py(static_cast<double>(c));
        doc.rect(x0, y, x1 - x0, f.py(0) - y, "#7f9fd6", "#1f3f86");
    }
    for (const double ref : {LogLengthReport::reference_95_vs_90(), LogLengthReport::reference_99_vs_95()})
        doc.line(f.px(ref), f.top, f.px(ref), f.top + f.height, "#d62728", 1.0, "5,3");
    char title[64];
    std::snprintf(title, sizeof title, "%g%% level, n = %zu", 100 * report.alpha, report.values.size());
    doc.text(f.left + f.width / 2, 24, title, 13, "middle");
    return doc.str();
}

std::string render_heatmap(const HeatmapGrid& grid)
{
    svg::Document doc(520, 440);
    const svg::Frame f{70, 30, 360, 360, 0, 1, 0, 1};
    double lim = 1e-9;
    for (const auto& v : grid.values)
        if (v)
            lim = std::max(lim, std::abs(*v));
    const double cw = f.width / grid.spec.nx;
    const double ch = f.height / grid.spec.ny;
    for (int j = 0; j < grid.spec.ny; ++j)
    {
        for (int i = 0; i < grid.spec.nx; ++i)
        {
            const auto& v = grid.at(i, j);
            const std::string fill = v ? diverging(*v, lim) : std::string("#dddddd");
            doc.rect(f.left + i * cw, f.top + f.height - (j + 1) * ch, cw, ch, fill);
        }
    }
    svg::axes(doc, f, "|rho|", "(F/10)/(1+F/10)");
    for (int s = 0; s <= 10; ++s)
    {
        const double v = lim * (1.0 - s / 5.0);
        doc.rect(450, f.top + s * 30, 20, 30, diverging(v, lim));
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        doc.text(475, f.top + s * 30 + 18, buf, 10);
    }
    return doc.str();
}

std::string render_power_curve(const PowerCurve& curve)
{
    svg::Document doc(560, 380);
    double lo = -1, hi = 1;
    if (!curve.deviations.empty())
    {
        lo = *std::min_element(curve.deviations.begin(), curve.deviations.end());
        hi = *std::max_element(curve.deviations.begin(), curve.deviations.end());
        if (hi <= lo)
            hi = lo + 1;
    }
    const svg::Frame f{70, 40, 400, 280, lo, hi, 0, 1};
    svg::axes(doc, f, "beta - beta0", "rejection rate");
    doc.line(f.px(lo), f.py(curve.alpha), f.px(hi), f.py(curve.alpha), "#888888", 0.8, "4,3");
    const char* colors[] = {"#d62728", "#1f4fd6", "#2ca02c"};
    for (std::size_t p = 0; p < kProcedures.size(); ++p)
    {
        std::string pts;
        for (std::size_t j = 0; j < curve.deviations.size(); ++j)
            pts += svg::num(f.px(curve.deviations[j])) + "," + svg::num(f.py(curve.rate(kProcedures[p], j))) + " ";
        doc.polyline(pts, colors[p], 1.5);
        doc.line(485, 60 + 18 * p, 505, 60 + 18 * p, colors[p], 2);
        doc.text(510, 64 + 18 * p, to_string(kProcedures[p]), 11);
    }
    char title[96];
    std::snprintf(title, sizeof title, "f0 = %g, rho = %g, n = %ld, reps = %llu", curve.f0, curve.rho,
                  static_cast<long>(curve.n), static_cast<unsigned long long>(curve.reps));
    doc.text(f.left + f.width / 2, 24, title, 13, "middle");
    return doc.str();
}

}  // namespace ivtf
