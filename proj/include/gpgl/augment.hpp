#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gpgl/error.hpp"
#include "gpgl/graph.hpp"
#include "gpgl/layout.hpp"

namespace gpgl {

struct AugmentedLayout {
    std::uint64_t seed = 0;  // seed that produced `cells` (the retry seed if the first run failed)
    GridLayout cells;
    LayoutDiagnostics diagnostics;
    bool failed = false;
    std::string error;  // kind of the last error when failed
};

/// k layouts of one graph, one per shuffled circular start.
struct AugmentedSet {
    long graph_id = 0;
    std::size_t k = 0;
    std::vector<AugmentedLayout> layouts;

    std::size_t succeeded() const {
        std::size_t n = 0;
        for (const auto& l : layouts) n += l.failed ? 0 : 1;
        return n;
    }
};

// Seed used for the single retry of a failed run.
inline std::uint64_t retry_seed(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ULL; }

/// Runs layout_graph with seeds p.seed, p.seed + 1, ..., p.seed + k - 1.
/// A run that throws is retried once with a perturbed seed and then kept
/// in the set marked as failed.
inline AugmentedSet augment(const Graph& g, const LayoutParams& p, std::size_t k, long graph_id = 0) {
    if (k < 1) throw InvalidArgument("augmentation count must be at least 1");
    p.validate();
    AugmentedSet set{graph_id, k, {}};
    set.layouts.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        LayoutParams run = p;
        run.seed = p.seed + i;
        AugmentedLayout entry;
        entry.seed = run.seed;
        for (int attempt = 0; attempt < 2; ++attempt) {
            try {
                auto res = layout_graph(g, run);
                entry.seed = run.seed;
                entry.cells = std::move(res.cells);
                entry.diagnostics = res.diagnostics;
                entry.failed = false;
                entry.error.clear();
                break;
            } catch (const Error& e) {
                entry.failed = true;
                entry.error = e.kind();
                run.seed = retry_seed(run.seed);
            }
        }
        set.layouts.push_back(std::move(entry));
    }
    return set;
}

}  // namespace gpgl
