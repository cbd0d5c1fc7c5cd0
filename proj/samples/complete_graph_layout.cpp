// Lays out K_n on the grid, prints the occupied cells as ASCII art and
// writes an SVG next to the binary.
//
//   sample_complete_graph_layout [n] [seed]

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <vector>

#include "gpgl/gpgl.hpp"

int main(int argc, char** argv) {
    const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 32;
    gpgl::LayoutParams p;
    p.seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 0;

    std::vector<gpgl::Edge> edges;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
    const gpgl::Graph g(n, edges);

    const auto res = gpgl::layout_graph(g, p);
    long w = 0, h = 0;
    for (const auto& c : res.cells) {
        w = std::max(w, c.x + 1);
        h = std::max(h, c.y + 1);
    }
    std::vector<std::string> rows(static_cast<std::size_t>(h), std::string(static_cast<std::size_t>(w), '.'));
    for (const auto& c : res.cells) rows[static_cast<std::size_t>(c.y)][static_cast<std::size_t>(c.x)] = '#';
    for (const auto& r : rows) std::printf("%s\n", r.c_str());
    std::printf("vertices %zu  collisions %zu  stress %.4f  iterations %d+%d\n", n, res.diagnostics.vertex_loss,
                res.diagnostics.kk_loss, res.diagnostics.kk_iterations, res.diagnostics.gpgl_iterations);

    std::ofstream("complete_graph.svg") << gpgl::render_svg(g, res.cells);
    return 0;
}
