#pragma once

#include "pcfit/families.hpp"
#include "pcfit/matrices.hpp"
#include "pcfit/splits.hpp"
#include "pcfit/trees.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pcfit {

struct DiagramCheck {
    std::string name;
    bool holds = false;
    std::string witness;  // empty when the check holds
};

struct AnalysisReport {
    DissimilarityMap input;
    Taxon base = 0;
    CircularOrdering ring;
    // Kalmanson decomposition of the input.
    WeightedSplitSystem decomposition;
    // Splits of the closure missing from the decomposition; their weight is 0.
    std::vector<Split> closure_additions;
    // Through the Gromov product, pyramid, rooted closure and unrooting.
    PCTree tree;
    // Rebuilt from the closed split system directly.
    PCTree projective_tree;
    std::vector<DiagramCheck> checks;

    bool all_hold() const;
    // The decomposition with every closure addition at weight 0.
    WeightedSplitSystem padded_decomposition() const;
};

// The best-fit PC-tree of a Kalmanson map. Without a ring one is searched for
// (up to search_limit taxa); r defaults to the last taxon of the ring.
// Throws NotKalmansonError, SearchRefusedError or DomainError.
AnalysisReport best_fit_pc_tree(const DissimilarityMap& d, std::optional<Taxon> r = std::nullopt,
                                std::optional<CircularOrdering> ring = std::nullopt,
                                std::size_t search_limit = 10);

// Checks every edge of the commuting diagram at base r and ring. A failing
// precondition shows up as failing checks rather than an exception.
std::vector<DiagramCheck> verify_diagram(const DissimilarityMap& d, Taxon r,
                                         const CircularOrdering& ring);

// Graphviz source. P-vertices are circles, C-vertices boxes; edges whose
// split has weight 0 (or no weight) in `weights` are dashed.
std::string to_dot(const PCTree& t, const WeightedSplitSystem* weights = nullptr);

std::string format_report(const AnalysisReport& report);

}  // namespace pcfit
