#pragma once

// Dense H x W x F "image" of a grid layout: vertex features at occupied
// cells, zeros elsewhere, layout anchored at the top-left corner.
//
// Container file: one line of JSON
//   {"height":H,"width":W,"channels":F,"count":N,"dtype":"f32","order":"row-major, channel-last"}
// terminated by '\n', then N*H*W*F little-endian float32 values.

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "gpgl/error.hpp"
#include "gpgl/layout.hpp"

namespace gpgl {

enum class MergeRule { average, max };

inline MergeRule parse_merge_rule(const std::string& s) {
    if (s == "average") return MergeRule::average;
    if (s == "max") return MergeRule::max;
    throw InvalidArgument("unknown merge rule '" + s + "' (expected average or max)");
}

struct Window {
    std::size_t height = 64;
    std::size_t width = 64;
};

struct GridTensor {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::vector<float> data;             // [h][w][c]
    std::vector<std::uint8_t> occupancy; // [h][w]

    float at(std::size_t h, std::size_t w, std::size_t c) const { return data[(h * width + w) * channels + c]; }
    bool occupied(std::size_t h, std::size_t w) const { return occupancy[h * width + w] != 0; }
    std::size_t occupied_count() const {
        return static_cast<std::size_t>(std::count(occupancy.begin(), occupancy.end(), std::uint8_t{1}));
    }
};

struct VertexLossReport {
    std::size_t graph_vertex_count = 0;
    std::size_t grid_cell_count = 0;
    std::size_t lost = 0;
    std::vector<std::vector<std::size_t>> merge_groups;  // only groups of size >= 2
};

/// Places each vertex's feature vector at its cell; vertices sharing a
/// cell are pooled by `merge`. Throws WindowOverflow when a cell falls
/// outside the window.
inline std::pair<GridTensor, VertexLossReport> build_grid_tensor(const GridLayout& gl,
                                                                 const std::vector<std::vector<double>>& features,
                                                                 Window window = {}, MergeRule merge = MergeRule::average) {
    if (features.size() != gl.size()) throw InvalidArgument("one feature vector per vertex is required");
    if (gl.empty()) throw InvalidArgument("empty layout");
    const std::size_t dim = features.front().size();
    if (dim == 0) throw InvalidArgument("feature dimension must be at least 1");
    for (const auto& f : features)
        if (f.size() != dim) throw InvalidArgument("features must share one dimension");

    std::map<Cell, std::vector<std::size_t>> groups;
    for (std::size_t v = 0; v < gl.size(); ++v) {
        const auto& c = gl[v];
        if (c.x < 0 || c.y < 0) throw InvalidArgument("grid layout is not origin-normalized");
        if (static_cast<std::size_t>(c.y) >= window.height || static_cast<std::size_t>(c.x) >= window.width)
            throw WindowOverflow("vertex " + std::to_string(v) + " at (" + std::to_string(c.x) + ", " +
                                 std::to_string(c.y) + ") lies outside the " + std::to_string(window.height) + "x" +
                                 std::to_string(window.width) + " window");
        groups[c].push_back(v);
    }

    GridTensor t{window.height, window.width, dim, std::vector<float>(window.height * window.width * dim, 0.0f),
                 std::vector<std::uint8_t>(window.height * window.width, 0)};
    VertexLossReport report;
    report.graph_vertex_count = gl.size();
    report.grid_cell_count = groups.size();

    std::vector<double> pooled(dim);
    for (const auto& [cell, members] : groups) {
        if (merge == MergeRule::average) {
            std::fill(pooled.begin(), pooled.end(), 0.0);
            for (auto v : members)
                for (std::size_t c = 0; c < dim; ++c) pooled[c] += features[v][c];
            for (auto& x : pooled) x /= static_cast<double>(members.size());
        } else {
            pooled = features[members.front()];
            for (auto v : members)
                for (std::size_t c = 0; c < dim; ++c) pooled[c] = std::max(pooled[c], features[v][c]);
        }
        const auto base = (static_cast<std::size_t>(cell.y) * window.width + static_cast<std::size_t>(cell.x));
        t.occupancy[base] = 1;
        for (std::size_t c = 0; c < dim; ++c) t.data[base * dim + c] = static_cast<float>(pooled[c]);
        if (members.size() > 1) {
            report.lost += members.size() - 1;
            report.merge_groups.push_back(members);
        }
    }
    return {std::move(t), std::move(report)};
}

/// 100 * total lost vertices / total vertices.
inline double vertex_loss_ratio(const std::vector<VertexLossReport>& reports) {
    if (reports.empty()) throw InvalidArgument("vertex_loss_ratio needs at least one report");
    std::size_t lost = 0, total = 0;
    for (const auto& r : reports) {
        lost += r.lost;
        total += r.graph_vertex_count;
    }
    return total == 0 ? 0.0 : 100.0 * static_cast<double>(lost) / static_cast<double>(total);
}

// ---------------------------------------------------------------------------
// container I/O

static_assert(std::endian::native == std::endian::little, "tensor container I/O assumes a little-endian host");

struct TensorContainer {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::size_t count = 0;
    std::vector<float> values;

    std::size_t tensor_size() const { return height * width * channels; }
    const float* tensor(std::size_t i) const { return values.data() + i * tensor_size(); }
};

inline void write_tensor_container(const std::string& path, const std::vector<GridTensor>& tensors) {
    if (tensors.empty()) throw InvalidArgument("no tensors to write");
    const auto& first = tensors.front();
    for (const auto& t : tensors)
        if (t.height != first.height || t.width != first.width || t.channels != first.channels)
            throw ShapeMismatch("all tensors in a container must share one shape");
    nlohmann::ordered_json header = {{"height", first.height}, {"width", first.width},
                                     {"channels", first.channels}, {"count", tensors.size()},
                                     {"dtype", "f32"}, {"order", "row-major, channel-last"}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << header.dump() << '\n';
    for (const auto& t : tensors)
        out.write(reinterpret_cast<const char*>(t.data.data()), static_cast<std::streamsize>(t.data.size() * sizeof(float)));
    if (!out) throw IoError("failed writing " + path);
}

inline TensorContainer read_tensor_container(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path, 1, "missing header line");
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path, 1, e.what());
    }
    if (header.value("dtype", "") != "f32") throw ParseError(path, 1, "unsupported dtype");
    TensorContainer c;
    c.height = header.at("height").get<std::size_t>();
    c.width = header.at("width").get<std::size_t>();
    c.channels = header.at("channels").get<std::size_t>();
    c.count = header.at("count").get<std::size_t>();
    c.values.resize(c.count * c.tensor_size());
    in.read(reinterpret_cast<char*>(c.values.data()), static_cast<std::streamsize>(c.values.size() * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(c.values.size() * sizeof(float)))
        throw ParseError(path, 2, "truncated tensor payload");
    if (in.peek() != std::char_traits<char>::eof()) throw ParseError(path, 2, "trailing bytes after tensor payload");
    return c;
}

}  // namespace gpgl
