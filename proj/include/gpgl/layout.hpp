#pragma once

// Regularized Kamada-Kawai layout on the 2D integer grid.
//
// The continuous objective is the stress of the layout against hop
// distances plus a hinge penalty that pushes every vertex pair at least
// alpha apart, so that rounding to the nearest cell keeps vertices apart.
// Both sums run over ordered pairs (i, j), i != j.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "gpgl/error.hpp"
#include "gpgl/graph.hpp"
#include "gpgl/random.hpp"

namespace gpgl {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    bool operator==(const Vec2&) const = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

/// Continuous positions, one per vertex, in grid-cell units.
using Layout = std::vector<Vec2>;

struct Cell {
    long x = 0;
    long y = 0;
    auto operator<=>(const Cell&) const = default;
};

/// Integer positions, translated so the minimum of each axis is 0.
/// x is the column and y the row when placed in a window.
using GridLayout = std::vector<Cell>;

enum class OptimizerKind { lbfgs, gradient_descent };

struct LayoutParams {
    double alpha = 1.25;
    double lambda = 1000.0;
    double gamma = 0.1;
    bool enable_rescale = false;
    int max_iters = 2000;
    double grad_tol = 1e-4;
    std::uint64_t seed = 0;
    OptimizerKind method = OptimizerKind::lbfgs;

    void validate() const {
        if (!(alpha >= 0.0) || !(lambda >= 0.0) || !(gamma >= 0.0))
            throw InvalidArgument("alpha, lambda and gamma must be non-negative");
        if (max_iters < 1) throw InvalidArgument("max_iters must be at least 1");
        if (!(grad_tol > 0.0)) throw InvalidArgument("grad_tol must be positive");
    }
};

inline double min_pairwise_distance(const Layout& layout) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < layout.size(); ++i)
        for (std::size_t j = i + 1; j < layout.size(); ++j) best = std::min(best, norm(layout[i] - layout[j]));
    return best;
}

/// n points spaced one unit of arc apart on a circle centred at the
/// origin; vertex v sits at slot perm[v] for a seed-determined perm.
inline Layout circular_init(std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InvalidArgument("circular_init needs at least one vertex");
    Layout out(n);
    if (n == 1) return out;
    const auto perm = Rng(seed).permutation(n);
    const double radius = static_cast<double>(n) / (2.0 * std::numbers::pi);
    for (std::size_t v = 0; v < n; ++v) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(perm[v]) / static_cast<double>(n);
        out[v] = {radius * std::cos(theta), radius * std::sin(theta)};
    }
    return out;
}

namespace detail {

inline void require_same_size(const Layout& layout, const DistanceMatrix& s) {
    if (layout.size() != s.size()) throw InvalidArgument("layout and distance matrix sizes differ");
    if (layout.size() < 2) throw InvalidArgument("loss needs at least two vertices");
}

}  // namespace detail

inline double kk_loss(const Layout& layout, const DistanceMatrix& s) {
    detail::require_same_size(layout, s);
    double total = 0.0;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        for (std::size_t j = i + 1; j < layout.size(); ++j) {
            const double r = norm(layout[i] - layout[j]) / s(i, j) - 1.0;
            total += r * r;  // 2 * (1/2) r^2 for the (i,j) and (j,i) terms
        }
    }
    return total;
}

inline double separation_penalty(const Layout& layout, double alpha, double lambda) {
    if (layout.size() < 2) throw InvalidArgument("penalty needs at least two vertices");
    double total = 0.0;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        for (std::size_t j = i + 1; j < layout.size(); ++j) {
            const double d = norm(layout[i] - layout[j]);
            if (d == 0.0) {
                if (alpha > 0.0 && lambda > 0.0) throw CoincidentVertices(i, j);
                continue;
            }
            total += 2.0 * std::max(0.0, alpha / d - 1.0);
        }
    }
    return lambda * total;
}

struct LossAndGrad {
    double value = 0.0;
    double kk = 0.0;
    double separation = 0.0;
    Layout grad;
};

namespace detail {

// Distances below this are treated as coincident by the optimizer.
inline constexpr double coincidence_eps = 1e-9;

// Shared evaluation kernel. Returns nullopt instead of throwing when a
// pair is closer than `eps`, so the line search can reject the step.
inline std::optional<LossAndGrad> evaluate(const Layout& x, const DistanceMatrix& s, double alpha, double lambda,
                                           bool want_grad, double eps) {
    const auto n = x.size();
    LossAndGrad out;
    if (want_grad) out.grad.assign(n, Vec2{});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Vec2 diff = x[i] - x[j];
            const double d = norm(diff);
            if (!(d > eps)) return std::nullopt;
            const double sij = s(i, j);
            const double r = d / sij - 1.0;
            out.kk += r * r;
            double coef = 2.0 * r / (sij * d);
            if (d < alpha) {
                out.separation += 2.0 * (alpha / d - 1.0);
                coef -= 2.0 * lambda * alpha / (d * d * d);
            }
            if (want_grad) {
                const Vec2 g = coef * diff;
                out.grad[i] = out.grad[i] + g;
                out.grad[j] = out.grad[j] - g;
            }
        }
    }
    out.separation *= lambda;
    out.value = out.kk + out.separation;
    return out;
}

inline double max_abs(const Layout& g) {
    double m = 0.0;
    for (const auto& v : g) m = std::max({m, std::abs(v.x), std::abs(v.y)});
    return m;
}

inline bool all_finite(const Layout& x) {
    return std::all_of(x.begin(), x.end(), [](Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); });
}

}  // namespace detail

/// Value and exact analytic gradient of stress + separation penalty.
/// The penalty derivative is -2*lambda*alpha*(x_i - x_j)/d^3 per unordered
/// pair with d < alpha, zero at and beyond the hinge.
inline LossAndGrad gpgl_loss_and_grad(const Layout& layout, const DistanceMatrix& s, const LayoutParams& p) {
    detail::require_same_size(layout, s);
    auto r = detail::evaluate(layout, s, p.alpha, p.lambda, true, 0.0);
    if (!r) {
        for (std::size_t i = 0; i < layout.size(); ++i)
            for (std::size_t j = i + 1; j < layout.size(); ++j)
                if (norm(layout[i] - layout[j]) == 0.0) throw CoincidentVertices(i, j);
    }
    return std::move(*r);
}

/// Uniform zoom by max(1, alpha / beta), beta = max(gamma, min distance).
inline Layout rescale_layout(const Layout& layout, const LayoutParams& p) {
    if (layout.size() < 2) throw InvalidArgument("rescale needs at least two vertices");
    const double beta = std::max(p.gamma, min_pairwise_distance(layout));
    if (beta <= 0.0) return layout;
    const double factor = std::max(1.0, p.alpha / beta);
    Layout out(layout);
    for (auto& v : out) v = factor * v;
    return out;
}

struct MinimizeReport {
    double initial_loss = 0.0;
    double final_loss = 0.0;
    double grad_max_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline double dot(const Layout& a, const Layout& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i].x * b[i].x + a[i].y * b[i].y;
    return s;
}

// Limited-memory inverse-Hessian approximation (two-loop recursion).
class LbfgsMemory {
public:
    explicit LbfgsMemory(std::size_t capacity) : capacity_(capacity) {}

    void clear() { pairs_.clear(); }
    bool empty() const { return pairs_.empty(); }

    void push(Layout step, Layout grad_change) {
        const double sy = dot(step, grad_change);
        if (capacity_ == 0 || !(sy > 1e-12)) return;  // no memory, or curvature condition fails
        if (pairs_.size() == capacity_) pairs_.erase(pairs_.begin());
        pairs_.push_back({std::move(step), std::move(grad_change), 1.0 / sy});
    }

    Layout apply(const Layout& grad) const {
        Layout q = grad;
        std::vector<double> a(pairs_.size());
        for (std::size_t k = pairs_.size(); k-- > 0;) {
            const auto& pr = pairs_[k];
            a[k] = pr.rho * dot(pr.s, q);
            for (std::size_t i = 0; i < q.size(); ++i) q[i] = q[i] - a[k] * pr.y[i];
        }
        const auto& last = pairs_.back();
        const double scale = dot(last.s, last.y) / dot(last.y, last.y);
        for (auto& v : q) v = scale * v;
        for (std::size_t k = 0; k < pairs_.size(); ++k) {
            const auto& pr = pairs_[k];
            const double b = pr.rho * dot(pr.y, q);
            for (std::size_t i = 0; i < q.size(); ++i) q[i] = q[i] + (a[k] - b) * pr.s[i];
        }
        return q;
    }

private:
    struct Pair {
        Layout s;
        Layout y;
        double rho;
    };
    std::size_t capacity_;
    std::vector<Pair> pairs_;
};

}  // namespace detail

/// Descent on the regularized loss with an Armijo backtracking search.
///
/// The search direction is the L-BFGS direction by default and plain
/// steepest descent with OptimizerKind::gradient_descent. Whenever the
/// quasi-Newton direction is not a descent direction or its line search
/// fails, memory is dropped and a steepest-descent step is tried. When
/// even that cannot satisfy Armijo (a hinge kink), a fixed small step is
/// taken. The best iterate seen is returned, so the result never has a
/// larger loss than the start.
inline Layout minimize(const Layout& start, const DistanceMatrix& s, const LayoutParams& p,
                       MinimizeReport* report = nullptr) {
    p.validate();
    detail::require_same_size(start, s);
    constexpr double armijo_c = 1e-4;
    constexpr double shrink = 0.5;
    constexpr int max_backtracks = 40;
    constexpr double fallback_move = 1e-3;  // max per-coordinate displacement of a fallback step

    auto eval = [&](const Layout& x) {
        return detail::evaluate(x, s, p.alpha, p.lambda, true, detail::coincidence_eps);
    };

    auto cur = eval(start);
    if (!cur) {
        for (std::size_t i = 0; i < start.size(); ++i)
            for (std::size_t j = i + 1; j < start.size(); ++j)
                if (norm(start[i] - start[j]) <= detail::coincidence_eps) throw CoincidentVertices(i, j);
    }
    if (!std::isfinite(cur->value)) throw NonFiniteLoss("initial loss is not finite");

    Layout x = start;
    Layout best = start;
    double best_value = cur->value;
    MinimizeReport rep;
    rep.initial_loss = cur->value;

    detail::LbfgsMemory memory(p.method == OptimizerKind::lbfgs ? 10 : 0);
    double gmax = detail::max_abs(cur->grad);
    double sd_step = gmax > 0.0 ? std::min(1.0, 1.0 / gmax) : 1.0;
    Layout trial(x.size());

    // Backtracks along -dir from x; returns the accepted step length or 0.
    auto search = [&](const Layout& dir, double t, std::optional<LossAndGrad>& accepted) {
        const double slope = detail::dot(cur->grad, dir);
        for (int b = 0; b < max_backtracks; ++b, t *= shrink) {
            for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - t * dir[i];
            auto cand = eval(trial);
            if (cand && cand->value <= cur->value - armijo_c * t * slope) {
                accepted = std::move(cand);
                return t;
            }
        }
        return 0.0;
    };

    int it = 0;
    for (; it < p.max_iters; ++it) {
        if (gmax <= p.grad_tol) {
            rep.converged = true;
            break;
        }
        std::optional<LossAndGrad> next;
        bool took_quasi_newton = false;
        if (!memory.empty()) {
            const Layout dir = memory.apply(cur->grad);
            if (detail::dot(cur->grad, dir) > 0.0 && search(dir, 1.0, next) > 0.0) took_quasi_newton = true;
            if (!took_quasi_newton) memory.clear();
        }
        if (!took_quasi_newton) {
            const double t = search(cur->grad, sd_step, next);
            if (t > 0.0) {
                sd_step = std::min(t / shrink, 1e3);
            } else {
                const double tf = fallback_move / gmax;
                for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] - tf * cur->grad[i];
                next = eval(trial);
                if (!next) break;  // even the tiny step collides; stay at the best point
                sd_step = tf;
            }
        }
        if (!std::isfinite(next->value) || !detail::all_finite(trial))
            throw NonFiniteLoss("optimization produced a non-finite loss at iteration " + std::to_string(it));
        if (p.method == OptimizerKind::lbfgs) {
            Layout step(x.size()), dgrad(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                step[i] = trial[i] - x[i];
                dgrad[i] = next->grad[i] - cur->grad[i];
            }
            memory.push(std::move(step), std::move(dgrad));
        }
        x.swap(trial);
        cur = std::move(next);
        gmax = detail::max_abs(cur->grad);
        if (cur->value < best_value) {
            best_value = cur->value;
            best = x;
        }
    }
    if (!rep.converged && gmax <= p.grad_tol) rep.converged = true;
    rep.iterations = it;
    rep.final_loss = best_value;
    if (report) {
        auto fin = detail::evaluate(best, s, p.alpha, p.lambda, true, 0.0);
        rep.grad_max_norm = fin ? detail::max_abs(fin->grad) : std::numeric_limits<double>::infinity();
        *report = rep;
    }
    return best;
}

/// Nearest cell per coordinate (ties away from zero), then shifted so the
/// smallest x and y are 0. Collisions are kept.
inline GridLayout round_layout(const Layout& layout) {
    GridLayout cells(layout.size());
    if (layout.empty()) return cells;
    if (!detail::all_finite(layout)) throw InvalidArgument("cannot round non-finite coordinates");
    long min_x = std::numeric_limits<long>::max();
    long min_y = std::numeric_limits<long>::max();
    for (std::size_t i = 0; i < layout.size(); ++i) {
        cells[i] = {std::lround(layout[i].x), std::lround(layout[i].y)};
        min_x = std::min(min_x, cells[i].x);
        min_y = std::min(min_y, cells[i].y);
    }
    for (auto& c : cells) c = {c.x - min_x, c.y - min_y};
    return cells;
}

struct LayoutDiagnostics {
    double kk_loss = 0.0;
    double separation = 0.0;
    int kk_iterations = 0;
    int gpgl_iterations = 0;
    bool converged = true;
    std::size_t vertex_loss = 0;  // vertices sharing a cell with a lower-indexed vertex
};

inline std::size_t count_collisions(const GridLayout& cells) {
    std::vector<Cell> sorted(cells);
    std::sort(sorted.begin(), sorted.end());
    return static_cast<std::size_t>(sorted.end() - std::unique(sorted.begin(), sorted.end()));
}

struct GridLayoutResult {
    GridLayout cells;
    LayoutDiagnostics diagnostics;
    Layout continuous;
};

/// Half-width of the uniform perturbation added to the circular start, as a
/// fraction of the unit arc spacing.
inline constexpr double init_jitter = 1e-2;

/// The full pipeline for one connected graph: hop distances, shuffled
/// circular start, plain stress minimization, optional zoom, regularized
/// minimization, rounding.
inline GridLayoutResult gpgl_layout(const Graph& g, const LayoutParams& p) {
    p.validate();
    GridLayoutResult out;
    const auto n = g.num_vertices();
    if (n == 0) return out;
    if (n == 1) {
        out.cells = {Cell{0, 0}};
        out.continuous = {Vec2{}};
        return out;
    }
    const auto s = shortest_path_distances(g);
    auto x = circular_init(n, p.seed);
    // An exact circle is a symmetric saddle for vertex-transitive graphs
    // (K_n stays a ring); a tiny seeded jitter lets the solver leave it.
    Rng jitter(p.seed ^ 0x6a09e667f3bcc908ULL);
    for (auto& v : x) v = {v.x + jitter.uniform(-init_jitter, init_jitter), v.y + jitter.uniform(-init_jitter, init_jitter)};

    LayoutParams kk = p;
    kk.lambda = 0.0;
    MinimizeReport kk_rep;
    x = minimize(x, s, kk, &kk_rep);

    if (p.enable_rescale) x = rescale_layout(x, p);

    MinimizeReport rep;
    x = minimize(x, s, p, &rep);

    const auto fin = detail::evaluate(x, s, p.alpha, p.lambda, false, 0.0);
    out.diagnostics.kk_loss = fin ? fin->kk : std::numeric_limits<double>::infinity();
    out.diagnostics.separation = fin ? fin->separation : std::numeric_limits<double>::infinity();
    out.diagnostics.kk_iterations = kk_rep.iterations;
    out.diagnostics.gpgl_iterations = rep.iterations;
    out.diagnostics.converged = rep.converged;
    // The loss is translation invariant; anchor the bounding box at the
    // origin so rounding does not depend on where the solver left the centroid.
    double min_x = x[0].x, min_y = x[0].y;
    for (const auto& v : x) {
        min_x = std::min(min_x, v.x);
        min_y = std::min(min_y, v.y);
    }
    for (auto& v : x) v = {v.x - min_x, v.y - min_y};
    out.cells = round_layout(x);
    out.diagnostics.vertex_loss = count_collisions(out.cells);
    out.continuous = std::move(x);
    return out;
}

/// gpgl_layout for arbitrary graphs: each connected component is laid out
/// on its own and the pieces are packed left to right with one empty
/// column between neighbours.
inline GridLayoutResult layout_graph(const Graph& g, const LayoutParams& p) {
    if (is_connected(g)) return gpgl_layout(g, p);
    GridLayoutResult out;
    out.cells.resize(g.num_vertices());
    out.continuous.resize(g.num_vertices());
    long offset = 0;
    for (const auto& comp : connected_components(g)) {
        auto part = gpgl_layout(comp.graph, p);
        long width = 0;
        for (std::size_t k = 0; k < comp.vertices.size(); ++k) {
            const auto& c = part.cells[k];
            out.cells[comp.vertices[k]] = {c.x + offset, c.y};
            out.continuous[comp.vertices[k]] = part.continuous[k];
            width = std::max(width, c.x + 1);
        }
        offset += width + 1;
        auto& d = out.diagnostics;
        d.kk_loss += part.diagnostics.kk_loss;
        d.separation += part.diagnostics.separation;
        d.kk_iterations += part.diagnostics.kk_iterations;
        d.gpgl_iterations += part.diagnostics.gpgl_iterations;
        d.converged = d.converged && part.diagnostics.converged;
    }
    out.diagnostics.vertex_loss = count_collisions(out.cells);
    return out;
}

}  // namespace gpgl
