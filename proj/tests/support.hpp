#pragma once

// Generators and brute-force reference implementations shared by the tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "gpgl/graph.hpp"
#include "gpgl/layout.hpp"
#include "gpgl/nn/tensor.hpp"
#include "gpgl/random.hpp"

namespace testing_support {

inline gpgl::Graph path(std::size_t n) {
    std::vector<gpgl::Edge> e;
    for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
    return gpgl::Graph(n, e);
}

inline gpgl::Graph cycle(std::size_t n) {
    std::vector<gpgl::Edge> e;
    for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
    return gpgl::Graph(n, e);
}

inline gpgl::Graph complete(std::size_t n) {
    std::vector<gpgl::Edge> e;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
    return gpgl::Graph(n, e);
}

inline gpgl::Graph star(std::size_t leaves) {
    std::vector<gpgl::Edge> e;
    for (std::size_t i = 1; i <= leaves; ++i) e.emplace_back(0, i);
    return gpgl::Graph(leaves + 1, e);
}

// G(n, p) without connectivity guarantees.
inline gpgl::Graph random_graph(std::size_t n, double p, gpgl::Rng& rng) {
    std::vector<gpgl::Edge> e;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (rng.uniform() < p) e.emplace_back(i, j);
    return gpgl::Graph(n, e);
}

// Random spanning tree plus extra random edges; always connected.
inline gpgl::Graph random_connected_graph(std::size_t n, double extra, gpgl::Rng& rng) {
    std::vector<std::vector<bool>> has(n, std::vector<bool>(n, false));
    std::vector<gpgl::Edge> e;
    for (std::size_t v = 1; v < n; ++v) {
        const auto u = static_cast<std::size_t>(rng.below(v));
        e.emplace_back(u, v);
        has[u][v] = has[v][u] = true;
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (!has[i][j] && rng.uniform() < extra) e.emplace_back(i, j);
    return gpgl::Graph(n, e);
}

constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max() / 4;

inline std::vector<std::vector<std::uint64_t>> floyd_warshall(const gpgl::Graph& g) {
    const auto n = g.num_vertices();
    std::vector<std::vector<std::uint64_t>> d(n, std::vector<std::uint64_t>(n, kInf));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
    for (const auto& [a, b] : g.edges()) d[a][b] = d[b][a] = 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    return d;
}

inline gpgl::Layout random_layout(std::size_t n, double spread, gpgl::Rng& rng) {
    gpgl::Layout x(n);
    for (auto& v : x) v = {rng.uniform(-spread, spread), rng.uniform(-spread, spread)};
    return x;
}

// Literal ordered-pair double sums.
inline double naive_kk(const gpgl::Layout& x, const gpgl::DistanceMatrix& s) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (i == j) continue;
            const double d = std::sqrt((x[i].x - x[j].x) * (x[i].x - x[j].x) + (x[i].y - x[j].y) * (x[i].y - x[j].y));
            const double r = d / static_cast<double>(s(i, j)) - 1.0;
            total += 0.5 * r * r;
        }
    return total;
}

inline double naive_separation(const gpgl::Layout& x, double alpha, double lambda) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) {
            if (i == j) continue;
            const double d = std::sqrt((x[i].x - x[j].x) * (x[i].x - x[j].x) + (x[i].y - x[j].y) * (x[i].y - x[j].y));
            total += std::max(0.0, alpha / d - 1.0);
        }
    return lambda * total;
}

inline double naive_total(const gpgl::Layout& x, const gpgl::DistanceMatrix& s, double alpha, double lambda) {
    return naive_kk(x, s) + naive_separation(x, alpha, lambda);
}

// Direct six-loop 3x3 cross-correlation with zero padding; kernel rows are
// (ky * 3 + kx) * cin + ci, columns are output channels.
inline gpgl::nn::Tensor4<double> naive_conv(const gpgl::nn::Tensor4<double>& x, std::span<const double> k,
                                            std::span<const double> b) {
    const auto co_n = b.size();
    gpgl::nn::Tensor4<double> y(x.n, x.h, x.w, co_n);
    for (std::size_t n = 0; n < x.n; ++n)
        for (std::size_t r = 0; r < x.h; ++r)
            for (std::size_t c = 0; c < x.w; ++c)
                for (std::size_t co = 0; co < co_n; ++co) {
                    double acc = b[co];
                    for (int ky = 0; ky < 3; ++ky)
                        for (int kx = 0; kx < 3; ++kx) {
                            const long rr = static_cast<long>(r) + ky - 1, cc = static_cast<long>(c) + kx - 1;
                            if (rr < 0 || cc < 0 || rr >= static_cast<long>(x.h) || cc >= static_cast<long>(x.w)) continue;
                            for (std::size_t ci = 0; ci < x.c; ++ci)
                                acc += x(n, static_cast<std::size_t>(rr), static_cast<std::size_t>(cc), ci) *
                                       k[((static_cast<std::size_t>(ky) * 3 + static_cast<std::size_t>(kx)) * x.c + ci) * co_n + co];
                        }
                    y(n, r, c, co) = acc;
                }
    return y;
}

// 2x2 stride-2 max pool; windows hanging over the border use the cells that exist.
inline gpgl::nn::Tensor4<double> naive_pool(const gpgl::nn::Tensor4<double>& x) {
    gpgl::nn::Tensor4<double> y(x.n, (x.h + 1) / 2, (x.w + 1) / 2, x.c);
    for (std::size_t n = 0; n < x.n; ++n)
        for (std::size_t r = 0; r < y.h; ++r)
            for (std::size_t q = 0; q < y.w; ++q)
                for (std::size_t ch = 0; ch < x.c; ++ch) {
                    double best = -std::numeric_limits<double>::infinity();
                    for (std::size_t dr = 0; dr < 2; ++dr)
                        for (std::size_t dq = 0; dq < 2; ++dq)
                            if (2 * r + dr < x.h && 2 * q + dq < x.w) best = std::max(best, x(n, 2 * r + dr, 2 * q + dq, ch));
                    y(n, r, q, ch) = best;
                }
    return y;
}

}  // namespace testing_support
