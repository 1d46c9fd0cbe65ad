#pragma once

#include <string>
#include <vector>

namespace qmeta {

// Fixed "%.12g" rendering used for every number that reaches an output file,
// so identical runs produce byte-identical artifacts.
std::string format_num(double v);

struct CsvTable {
    std::vector<std::string> header_comments; // emitted as "# ..." lines
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

std::string render_csv(const CsvTable& table);
void write_file(const std::string& path, const std::string& content);

struct PlotSeries {
    std::string name;
    std::string color;
    std::vector<std::pair<double, double>> points;
};

struct PlotSpec {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    std::vector<PlotSeries> series;
    bool logy = false;
};

// Standalone deterministic SVG line plot (no external assets).
std::string render_svg(const PlotSpec& spec);

} // namespace qmeta
