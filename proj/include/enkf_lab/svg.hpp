#pragma once

#include <string>
#include <vector>

namespace enkf_lab {

struct Curve {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

struct AxesSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
};

struct Panel {
    AxesSpec axes;
    std::vector<Curve> curves;
};

/// Standalone SVG 1.1 chart: auto-scaled linear axes with tick labels, one
/// <polyline> per curve and a legend. Output depends only on the input.
/// Throws InvalidInput on empty input, mismatched x/y lengths or a
/// non-finite value (naming the curve and point index).
std::string emit_svg(const std::vector<Curve>& curves, const AxesSpec& axes);

/// Panels stacked vertically in one document, sharing the width.
std::string emit_svg_panels(const std::vector<Panel>& panels, const std::string& title = {});

}  // namespace enkf_lab
