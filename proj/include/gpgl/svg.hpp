#pragma once

#include <algorithm>
#include <cstddef>
#include <sstream>
#include <string>

#include "gpgl/error.hpp"
#include "gpgl/graph.hpp"
#include "gpgl/layout.hpp"

namespace gpgl {

struct SvgStyle {
    double cell = 24.0;    // pixels per grid cell
    double margin = 12.0;  // pixels around the grid
    bool grid_lines = true;
};

/// SVG 1.1 drawing of a grid layout: one unit square per vertex (id
/// "v<index>", labelled with the index), straight edges between cell
/// centres, and optional faint lattice lines. Cell (x, y) has its square's
/// top-left corner at (margin + x * cell, margin + y * cell).
inline std::string render_svg(const Graph& g, const GridLayout& cells, const SvgStyle& style = {}) {
    if (cells.size() != g.num_vertices()) throw InvalidArgument("layout size does not match graph");
    long cols = 0, rows = 0;
    for (const auto& c : cells) {
        cols = std::max(cols, c.x + 1);
        rows = std::max(rows, c.y + 1);
    }
    const double width = 2 * style.margin + static_cast<double>(cols) * style.cell;
    const double height = 2 * style.margin + static_cast<double>(rows) * style.cell;
    auto cx = [&](const Cell& c) { return style.margin + (static_cast<double>(c.x) + 0.5) * style.cell; };
    auto cy = [&](const Cell& c) { return style.margin + (static_cast<double>(c.y) + 0.5) * style.cell; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
    if (style.grid_lines) {
        svg << "<g id=\"lattice\" stroke=\"#dddddd\" stroke-width=\"1\">\n";
        for (long x = 0; x <= cols; ++x) {
            const double px = style.margin + static_cast<double>(x) * style.cell;
            svg << "<line x1=\"" << px << "\" y1=\"" << style.margin << "\" x2=\"" << px << "\" y2=\"" << height - style.margin << "\"/>\n";
        }
        for (long y = 0; y <= rows; ++y) {
            const double py = style.margin + static_cast<double>(y) * style.cell;
            svg << "<line x1=\"" << style.margin << "\" y1=\"" << py << "\" x2=\"" << width - style.margin << "\" y2=\"" << py << "\"/>\n";
        }
        svg << "</g>\n";
    }
    svg << "<g id=\"edges\" stroke=\"#3060a0\" stroke-width=\"1.5\">\n";
    for (const auto& [a, b] : g.edges())
        svg << "<line x1=\"" << cx(cells[a]) << "\" y1=\"" << cy(cells[a]) << "\" x2=\"" << cx(cells[b]) << "\" y2=\""
            << cy(cells[b]) << "\"/>\n";
    svg << "</g>\n<g id=\"vertices\" fill=\"#f0c040\" stroke=\"#805000\" stroke-width=\"1\">\n";
    for (std::size_t v = 0; v < cells.size(); ++v)
        svg << "<rect id=\"v" << v << "\" x=\"" << style.margin + static_cast<double>(cells[v].x) * style.cell << "\" y=\""
            << style.margin + static_cast<double>(cells[v].y) * style.cell << "\" width=\"" << style.cell << "\" height=\""
            << style.cell << "\"/>\n";
    svg << "</g>\n<g id=\"labels\" font-family=\"sans-serif\" font-size=\"" << style.cell * 0.45
        << "\" text-anchor=\"middle\" fill=\"black\">\n";
    for (std::size_t v = 0; v < cells.size(); ++v)
        svg << "<text x=\"" << cx(cells[v]) << "\" y=\"" << cy(cells[v]) + style.cell * 0.16 << "\">" << v << "</text>\n";
    svg << "</g>\n</svg>\n";
    return svg.str();
}

}  // namespace gpgl
