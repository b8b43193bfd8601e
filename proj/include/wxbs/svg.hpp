#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wxbs {

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Minimal deterministic line chart: fixed canvas, axes with tick labels and a
// small legend. Intended for recall / precision-recall curves.
void writeSvgChart(std::ostream& out, const std::string& title, const std::string& xLabel,
                   const std::string& yLabel, const std::vector<SvgSeries>& series);

}  // namespace wxbs
