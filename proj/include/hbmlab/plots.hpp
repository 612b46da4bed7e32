// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <string>
#include <vector>

namespace hbmlab {

struct PlotFile {
  std::string name;  // file name, no directory
  std::string svg;
};

/// Static SVG figures computed from the results CSV text alone: error
/// components against sample size per family, per-complexity and per-N
/// panels, and total error against parameter count for both families.
/// Log-scale axes; non-positive values are drawn at the axis floor.
std::vector<PlotFile> render_plots(const std::string& results_csv);

}  // namespace hbmlab
