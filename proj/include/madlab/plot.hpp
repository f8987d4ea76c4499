#pragma once

#include <string>
#include <utility>
#include <vector>

#include "madlab/report_io.hpp"

namespace madlab {

enum class PlotKind { cs_path, width_grid, power_bars, allocation };

std::string to_string(PlotKind kind);
PlotKind plot_kind_from_string(const std::string& name);

// (file name, SVG document) pairs. cs_path reads a trajectories CSV and
// yields one file per treatment/control pair; the other kinds read a summary
// CSV and yield one file. Throws InputError naming missing columns, or if the
// table has no usable rows.
std::vector<std::pair<std::string, std::string>> build_plots(const CsvTable& table, PlotKind kind);

// build_plots() then writes every file into out_dir. Nothing is written if
// building fails. Returns the paths written.
std::vector<std::string> render_plots(const CsvTable& table, PlotKind kind, const std::string& out_dir);

}  // namespace madlab
