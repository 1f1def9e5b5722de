#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "ivtf/figures.hpp"
#include "ivtf/svg.hpp"

using namespace ivtf;

namespace {

// Minimal XML check: every element closes in order, attributes are quoted.
bool well_formed(const std::string& doc, std::string* why)
{
    std::vector<std::string> stack;
    std::size_t pos = 0;
    while ((pos = doc.find('<', pos)) != std::string::npos)
    {
        const std::size_t end = doc.find('>', pos);
        if (end == std::string::npos)
        {
            *why = "unterminated tag";
            return false;
        }
        std::string tag = doc.substr(pos + 1, end - pos - 1);
        pos = end + 1;
        if (tag.empty() || tag[0] == '?' || tag[0] == '!')
            continue;
        if (std::count(tag.begin(), tag.end(), '"') % 2 != 0)
        {
            *why = "unbalanced quotes in <" + tag + ">";
            return false;
        }
        if (tag[0] == '/')
        {
            const std::string name = tag.substr(1);
            if (stack.empty() || stack.back() != name)
            {
                *why = "unexpected </" + name + ">";
                return false;
            }
            stack.pop_back();
            continue;
        }
        const bool self_closing = tag.back() == '/';
        const std::string name = tag.substr(0, tag.find_first_of(" /"));
        if (!self_closing)
            stack.push_back(name);
    }
    if (!stack.empty())
    {
        *why = "unclosed <" + stack.back() + ">";
        return false;
    }
    return true;
}

std::size_t count(const std::string& s, const std::string& needle)
{
    std::size_t n = 0;
    for (std::size_t p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1))
        ++n;
    return n;
}

const CVTable& cv(double alpha)
{
    static const CVTable t5 = load_cv_table(std::string(IVTF_TEST_DATA_DIR) + "/cv_tf_05.csv", 0.05);
    static const CVTable t1 = load_cv_table(std::string(IVTF_TEST_DATA_DIR) + "/cv_tf_01.csv", 0.01);
    return alpha == 0.01 ? t1 : t5;
}

std::vector<ComparisonRecord> fixture_records()
{
    std::ifstream in(std::string(IVTF_TEST_FIXTURE_DIR) + "/pipeline_20.csv");
    const IngestResult r = ingest(in);
    return classify_all(r.records, cv(0.05), cv(0.01), 1);
}

}  // namespace

TEST(Svg, EscapesText)
{
    EXPECT_EQ(svg::escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
    svg::Document d(100, 50);
    d.text(10, 10, "5% < 1%");
    std::string why;
    EXPECT_TRUE(well_formed(d.str(), &why)) << why;
    EXPECT_NE(d.str().find("5% &lt; 1%"), std::string::npos);
}

TEST(Figures, SignificanceScatter)
{
    const auto recs = fixture_records();
    const std::string a = render_significance_figure(recs, cv(0.05), cv(0.01));
    const std::string b = render_significance_figure(recs, cv(0.05), cv(0.01));
    EXPECT_EQ(a, b);
    std::string why;
    ASSERT_TRUE(well_formed(a, &why)) << why;
    EXPECT_LT(a.find("<svg"), 64u);
    // One marker per record and panel, except where the AR class is unknown.
    std::size_t markers = 0;
    for (const auto& r : recs)
        markers += 2 + (r.ar_class ? 1 : 0);
    EXPECT_EQ(count(a, "<circle"), markers);
    EXPECT_LT(markers, 3 * recs.size());
    EXPECT_GE(count(a, "<polyline"), 2u);
}

TEST(Figures, HistogramHeatmapPower)
{
    const auto recs = fixture_records();
    std::string why;

    const std::string hist = render_loglength_histogram(loglength_distribution(recs, 0.05));
    ASSERT_TRUE(well_formed(hist, &why)) << why;
    EXPECT_GE(count(hist, "<rect"), 6u);

    const HeatmapGrid grid = heatmap_grid(recs, 0.05, HeatmapSpec{10, 10, 0.08, 3.0});
    const std::string heat = render_heatmap(grid);
    ASSERT_TRUE(well_formed(heat, &why)) << why;
    EXPECT_GE(count(heat, "<rect"), 100u);
    EXPECT_NE(heat.find("#dddddd"), std::string::npos);

    PowerCurve c;
    c.n = 100;
    c.f0 = 2;
    c.rho = 0.5;
    c.reps = 1000;
    c.deviations = {-1, 0, 1};
    for (auto& r : c.rejections)
        r = {500, 50, 600};
    const std::string power = render_power_curve(c);
    ASSERT_TRUE(well_formed(power, &why)) << why;
    EXPECT_EQ(count(power, "<polyline"), 3u);
    EXPECT_EQ(power, render_power_curve(c));
}
