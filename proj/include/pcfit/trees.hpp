#pragma once

#include "pcfit/families.hpp"
#include "pcfit/splits.hpp"
#include "pcfit/taxa.hpp"

#include <gmpxx.h>

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace pcfit {

enum class NodeKind { Leaf, P, Q, C };

char kind_letter(NodeKind k);

// In a PQTree `adj` lists the children in order. In a PCTree it lists the
// neighbours in rotation order. `taxon` is meaningful for leaves only.
struct TreeNode {
    NodeKind kind = NodeKind::Leaf;
    Taxon taxon = 0;
    std::vector<std::size_t> adj;
};

// Rooted tree with ordered children. P-vertices have >= 2 children and
// Q-vertices >= 3. A rooted X-tree is a PQTree with no Q-vertex.
class PQTree {
public:
    PQTree() = default;
    // Throws DomainError when the nodes do not form a valid PQ-tree over taxa.
    PQTree(TaxonSet taxa, std::vector<TreeNode> nodes, std::size_t root);

    const TaxonSet& taxa() const { return taxa_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const TreeNode& node(std::size_t v) const { return nodes_[v]; }
    std::size_t root() const { return root_; }
    std::size_t size() const { return nodes_.size(); }

    // H_v, the leaves below v.
    const TaxonSubset& leaves_below(std::size_t v) const { return below_[v]; }

private:
    TaxonSet taxa_;
    std::vector<TreeNode> nodes_;
    std::size_t root_ = 0;
    std::vector<TaxonSubset> below_;
};

// Unrooted tree with rotation systems. Internal vertices have degree >= 3,
// C-vertices degree >= 4. One taxon gives a lone leaf, two give a single
// edge between leaves.
class PCTree {
public:
    PCTree() = default;
    PCTree(TaxonSet taxa, std::vector<TreeNode> nodes);

    const TaxonSet& taxa() const { return taxa_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    const TreeNode& node(std::size_t v) const { return nodes_[v]; }
    std::size_t size() const { return nodes_.size(); }
    std::size_t leaf_of(Taxon t) const { return leaf_of_[t]; }

    // Each edge once, as (u, v) with u < v.
    std::vector<std::pair<std::size_t, std::size_t>> edges() const;
    // Leaves reached from u through its neighbour v.
    TaxonSubset side(std::size_t u, std::size_t v) const;

private:
    TaxonSet taxa_;
    std::vector<TreeNode> nodes_;
    std::vector<std::size_t> leaf_of_;
    std::vector<std::size_t> parent_;  // rooted at node 0 for side()
    std::vector<TaxonSubset> below_;
};

// --- hierarchies ----------------------------------------------------------

// Vertex v_A per member, edges by minimal inclusion, root v_X. All P.
PQTree hierarchy_to_tree(const SetFamily& h);
SetFamily tree_to_hierarchy(const PQTree& t);

// --- frontiers ------------------------------------------------------------

LinearOrdering frontier(const PQTree& t);
CircularOrdering frontier(const PCTree& t);

// |con(T)|: the product of k! over P-vertices with k children and 2 over
// Q-vertices. For PC-trees (deg-1)! and 2, halved for whole-tree reflection
// when there are at least three leaves.
mpz_class count_consistent(const PQTree& t);
mpz_class count_consistent(const PCTree& t);

// All frontiers of trees equivalent to t. Throws SearchRefusedError when the
// count exceeds limit. PC frontiers come back canonical and sorted.
std::set<LinearOrdering> enumerate_consistent(const PQTree& t, std::size_t limit = 1'000'000);
std::vector<CircularOrdering> enumerate_consistent(const PCTree& t,
                                                   std::size_t limit = 1'000'000);

// --- interval families ----------------------------------------------------

// Every H_v, plus every union of 2..k-1 consecutive children of a Q-vertex.
SetFamily alpha(const PQTree& t);

// Rebuilds the PQ-tree of a prepyramid that is a rooted family. Throws
// DomainError naming the offending member or pair.
PQTree pq_from_family(const SetFamily& f, const LinearOrdering& order);

// Every edge split, plus the splits cut out by 2..m-2 consecutive neighbour
// subtrees around a C-vertex of degree m.
SplitSystem beta(const PCTree& t);

// Rebuilds the PC-tree of a circular unrooted family certified by ring.
PCTree pc_from_system(const SplitSystem& s, const CircularOrdering& ring);

// --- rooting --------------------------------------------------------------

// Attaches leaf r of `full` to the root; each child order becomes a rotation
// with the parent edge last. Q becomes C. `full` must be t's labels plus r.
PCTree unroot_tree(const PQTree& t, const TaxonSet& full, Taxon r);
PCTree unroot_tree(const PQTree& t, const std::string& r);

// Roots at the neighbour of leaf r and deletes r. C becomes Q.
PQTree root_tree(const PCTree& t, Taxon r);

// --- serialization --------------------------------------------------------
//
//   ((a,b)P,c,d)Q;     rooted
//   ((a,b)P,c,(d,e)P)C!;    unrooted, written from one internal vertex
//
// A group without a kind letter is read as P.

std::string canonical_form(const PQTree& t);
std::string canonical_form(const PCTree& t);

bool trees_equivalent(const PQTree& a, const PQTree& b);
bool trees_equivalent(const PCTree& a, const PCTree& b);

using AnyTree = std::variant<PQTree, PCTree>;

// Labels resolve against taxa, or are taken in order of first appearance.
AnyTree parse_newick(std::string_view text, const TaxonSet* taxa = nullptr);
PQTree parse_pq_tree(std::string_view text, const TaxonSet* taxa = nullptr);
PCTree parse_pc_tree(std::string_view text, const TaxonSet* taxa = nullptr);

}  // namespace pcfit
