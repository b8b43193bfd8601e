#include "wxbs/svg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wxbs {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 60.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    std::ostringstream ss;
    ss << std::setprecision(6) << v;
    return ss.str();
}

}  // namespace

void writeSvgChart(std::ostream& out, const std::string& title, const std::string& xLabel,
                   const std::string& yLabel, const std::vector<SvgSeries>& series) {
    if (series.empty()) {
        throw std::invalid_argument("writeSvgChart: no series");
    }
    double minX = std::numeric_limits<double>::infinity();
    double maxX = -std::numeric_limits<double>::infinity();
    double minY = 0.0;
    double maxY = -std::numeric_limits<double>::infinity();
    for (const SvgSeries& s : series) {
        if (s.x.size() != s.y.size()) {
            throw std::invalid_argument("writeSvgChart: series length mismatch");
        }
        for (double v : s.x) {
            minX = std::min(minX, v);
            maxX = std::max(maxX, v);
        }
        for (double v : s.y) {
            minY = std::min(minY, v);
            maxY = std::max(maxY, v);
        }
    }
    if (!std::isfinite(minX) || !std::isfinite(maxX)) {
        throw std::invalid_argument("writeSvgChart: series have no points");
    }
    if (maxX <= minX) maxX = minX + 1.0;
    if (maxY <= minY) maxY = minY + 1.0;

    const double plotW = kWidth - kMarginLeft - kMarginRight;
    const double plotH = kHeight - kMarginTop - kMarginBottom;
    const auto px = [&](double x) { return kMarginLeft + (x - minX) / (maxX - minX) * plotW; };
    const auto py = [&](double y) {
        return kHeight - kMarginBottom - (y - minY) / (maxY - minY) * plotH;
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

    // Axes and ticks.
    out << "<g stroke=\"black\" fill=\"none\">\n"
        << "<path d=\"M " << kMarginLeft << ' ' << kMarginTop << " V " << kHeight - kMarginBottom
        << " H " << kWidth - kMarginRight << "\"/>\n</g>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
    constexpr int kTicks = 5;
    for (int i = 0; i <= kTicks; ++i) {
        const double tx = minX + (maxX - minX) * i / kTicks;
        const double ty = minY + (maxY - minY) * i / kTicks;
        out << "<line x1=\"" << px(tx) << "\" y1=\"" << kHeight - kMarginBottom << "\" x2=\""
            << px(tx) << "\" y2=\"" << kHeight - kMarginBottom + 5 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << px(tx) << "\" y=\"" << kHeight - kMarginBottom + 18
            << "\" text-anchor=\"middle\">" << fmt(tx) << "</text>\n";
        out << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << py(ty) << "\" x2=\""
            << kMarginLeft << "\" y2=\"" << py(ty) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << py(ty) + 4
            << "\" text-anchor=\"end\">" << fmt(ty) << "</text>\n";
    }
    out << "<text x=\"" << kMarginLeft + plotW / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\">" << xLabel << "</text>\n";
    out << "<text x=\"14\" y=\"" << kMarginTop + plotH / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " << kMarginTop + plotH / 2
        << ")\">" << yLabel << "</text>\n";
    out << "</g>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const SvgSeries& s = series[si];
        if (s.x.empty()) continue;
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (size_t i = 0; i < s.x.size(); ++i) {
            if (i) out << ' ';
            out << fmt(px(s.x[i])) << ',' << fmt(py(s.y[i]));
        }
        out << "\"/>\n";
        const double ly = kMarginTop + 14.0 * si + 6.0;
        out << "<line x1=\"" << kWidth - kMarginRight - 120 << "\" y1=\"" << ly << "\" x2=\""
            << kWidth - kMarginRight - 100 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"1.5\"/>\n";
        out << "<text x=\"" << kWidth - kMarginRight - 95 << "\" y=\"" << ly + 4
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace wxbs
