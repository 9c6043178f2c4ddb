#include "pcfit/trees.hpp"

#include "pcfit/error.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <optional>

namespace pcfit {

char kind_letter(NodeKind k) {
    switch (k) {
        case NodeKind::P: return 'P';
        case NodeKind::Q: return 'Q';
        case NodeKind::C: return 'C';
        case NodeKind::Leaf: break;
    }
    return '?';
}

namespace {

std::string node_name(std::size_t v) { return "node " + std::to_string(v); }

void check_leaf_cover(const TaxonSet& taxa, const std::vector<TreeNode>& nodes,
                      std::vector<std::size_t>& leaf_of) {
    const std::size_t n = taxa.size();
    leaf_of.assign(n, nodes.size());
    for (std::size_t v = 0; v < nodes.size(); ++v) {
        if (nodes[v].kind != NodeKind::Leaf) {
            continue;
        }
        Taxon t = nodes[v].taxon;
        if (t >= n) {
            throw DomainError(node_name(v) + " has taxon index out of range");
        }
        if (leaf_of[t] != nodes.size()) {
            throw DomainError("taxon " + taxa.label(t) + " labels two leaves");
        }
        leaf_of[t] = v;
    }
    for (Taxon t = 0; t < n; ++t) {
        if (leaf_of[t] == nodes.size()) {
            throw DomainError("taxon " + taxa.label(t) + " labels no leaf");
        }
    }
}

}  // namespace

PQTree::PQTree(TaxonSet taxa, std::vector<TreeNode> nodes, std::size_t root)
    : taxa_(std::move(taxa)), nodes_(std::move(nodes)), root_(root) {
    const std::size_t n = taxa_.size();
    if (n == 0 || root_ >= nodes_.size()) {
        throw DomainError("a PQ-tree needs at least one leaf and a root");
    }
    std::vector<std::size_t> leaf_of;
    check_leaf_cover(taxa_, nodes_, leaf_of);

    below_.assign(nodes_.size(), TaxonSubset(n));
    std::vector<bool> seen(nodes_.size(), false);
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        if (seen[v]) {
            throw DomainError(node_name(v) + " is reached twice");
        }
        seen[v] = true;
        const TreeNode& node = nodes_[v];
        switch (node.kind) {
            case NodeKind::Leaf:
                if (!node.adj.empty()) {
                    throw DomainError("leaf " + taxa_.label(node.taxon) + " has children");
                }
                below_[v].insert(node.taxon);
                return;
            case NodeKind::P:
                if (node.adj.size() < 2) {
                    throw DomainError(node_name(v) + ": P-vertex with fewer than 2 children");
                }
                break;
            case NodeKind::Q:
                if (node.adj.size() < 3) {
                    throw DomainError(node_name(v) + ": Q-vertex with fewer than 3 children");
                }
                break;
            case NodeKind::C:
                throw DomainError(node_name(v) + ": C-vertex in a rooted tree");
        }
        for (std::size_t c : node.adj) {
            if (c >= nodes_.size()) {
                throw DomainError(node_name(v) + " has a child out of range");
            }
            visit(c);
            below_[v] |= below_[c];
        }
    };
    visit(root_);
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
        throw DomainError("some nodes are not reachable from the root");
    }
}

PCTree::PCTree(TaxonSet taxa, std::vector<TreeNode> nodes)
    : taxa_(std::move(taxa)), nodes_(std::move(nodes)) {
    const std::size_t n = taxa_.size();
    if (n == 0 || nodes_.empty()) {
        throw DomainError("a PC-tree needs at least one leaf");
    }
    check_leaf_cover(taxa_, nodes_, leaf_of_);

    std::size_t degree_sum = 0;
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
        const TreeNode& node = nodes_[v];
        const std::size_t deg = node.adj.size();
        degree_sum += deg;
        for (std::size_t w : node.adj) {
            if (w >= nodes_.size() || w == v) {
                throw DomainError(node_name(v) + " has a bad neighbour");
            }
            const auto& back = nodes_[w].adj;
            if (std::count(back.begin(), back.end(), v) != 1 ||
                std::count(node.adj.begin(), node.adj.end(), w) != 1) {
                throw DomainError("edge " + std::to_string(v) + "-" + std::to_string(w) +
                                  " is not listed once at both ends");
            }
        }
        switch (node.kind) {
            case NodeKind::Leaf:
                if (deg != (n == 1 ? 0U : 1U)) {
                    throw DomainError("leaf " + taxa_.label(node.taxon) + " has degree " +
                                      std::to_string(deg));
                }
                break;
            case NodeKind::P:
                if (deg < 3) {
                    throw DomainError(node_name(v) + ": P-vertex of degree below 3");
                }
                break;
            case NodeKind::C:
                if (deg < 4) {
                    throw DomainError(node_name(v) + ": C-vertex of degree below 4");
                }
                break;
            case NodeKind::Q:
                throw DomainError(node_name(v) + ": Q-vertex in an unrooted tree");
        }
    }
    if (degree_sum != 2 * (nodes_.size() - 1)) {
        throw DomainError("the graph is not a tree");
    }

    // Root at node 0: BFS order, then accumulate leaf sets bottom-up.
    parent_.assign(nodes_.size(), nodes_.size());
    std::vector<std::size_t> order{0};
    std::vector<bool> seen(nodes_.size(), false);
    seen[0] = true;
    for (std::size_t k = 0; k < order.size(); ++k) {
        for (std::size_t w : nodes_[order[k]].adj) {
            if (!seen[w]) {
                seen[w] = true;
                parent_[w] = order[k];
                order.push_back(w);
            }
        }
    }
    if (order.size() != nodes_.size()) {
        throw DomainError("the graph is not connected");
    }
    below_.assign(nodes_.size(), TaxonSubset(n));
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        if (nodes_[*it].kind == NodeKind::Leaf) {
            below_[*it].insert(nodes_[*it].taxon);
        }
        if (parent_[*it] != nodes_.size()) {
            below_[parent_[*it]] |= below_[*it];
        }
    }
}

std::vector<std::pair<std::size_t, std::size_t>> PCTree::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t v = 0; v < nodes_.size(); ++v) {
        for (std::size_t w : nodes_[v].adj) {
            if (v < w) {
                out.emplace_back(v, w);
            }
        }
    }
    return out;
}

TaxonSubset PCTree::side(std::size_t u, std::size_t v) const {
    if (parent_[v] == u) {
        return below_[v];
    }
    if (parent_[u] == v) {
        return below_[u].complement();
    }
    throw DomainError(node_name(u) + " and " + node_name(v) + " are not adjacent");
}

// ---------------------------------------------------------------------------

namespace {

// Tree of a laminar family that holds X and every singleton. Children are
// listed by their first position in `order` when given, else by set order.
PQTree laminar_tree(const TaxonSet& taxa, const std::set<TaxonSubset>& members,
                    const LinearOrdering* order, const std::set<TaxonSubset>& q_marks) {
    const std::vector<TaxonSubset> list(members.begin(), members.end());
    std::vector<TreeNode> nodes(list.size());
    std::size_t root = list.size();
    std::vector<std::size_t> parent(list.size(), list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (list[i].count() == 1) {
            nodes[i].kind = NodeKind::Leaf;
            nodes[i].taxon = *list[i].first();
        } else {
            nodes[i].kind = NodeKind::P;
        }
        if (list[i].is_full()) {
            root = i;
            continue;
        }
        for (std::size_t j = 0; j < list.size(); ++j) {
            if (j != i && list[i].is_subset_of(list[j]) &&
                (parent[i] == list.size() || list[j].count() < list[parent[i]].count())) {
                parent[i] = j;
            }
        }
    }
    auto key = [&](std::size_t i) -> std::size_t {
        if (!order) {
            return i;
        }
        std::size_t lo = order->size();
        for (Taxon t : list[i].members()) {
            lo = std::min(lo, order->position(t));
        }
        return lo;
    };
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (parent[i] != list.size()) {
            nodes[parent[i]].adj.push_back(i);
        }
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
        auto& adj = nodes[i].adj;
        std::sort(adj.begin(), adj.end(), [&](auto a, auto b) { return key(a) < key(b); });
        if (q_marks.count(list[i]) && adj.size() >= 3) {
            nodes[i].kind = NodeKind::Q;
        }
    }
    return PQTree(taxa, std::move(nodes), root);
}

std::string pair_message(const SubsetPair& p, const TaxonSet& taxa) {
    return "{" + format_subset(p.first, taxa) + "} and {" + format_subset(p.second, taxa) + "}";
}

}  // namespace

PQTree hierarchy_to_tree(const SetFamily& h) {
    auto check = is_hierarchy(h);
    if (!check) {
        if (check.witness) {
            throw DomainError("not a hierarchy: " + pair_message(*check.witness, h.taxa()) +
                              " overlap");
        }
        throw DomainError("not a hierarchy: X or a singleton is missing");
    }
    return laminar_tree(h.taxa(), h.members(), nullptr, {});
}

SetFamily tree_to_hierarchy(const PQTree& t) {
    SetFamily out(t.taxa());
    for (std::size_t v = 0; v < t.size(); ++v) {
        out.insert(t.leaves_below(v));
    }
    return out;
}

// ---------------------------------------------------------------------------

LinearOrdering frontier(const PQTree& t) {
    std::vector<Taxon> seq;
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        if (t.node(v).kind == NodeKind::Leaf) {
            seq.push_back(t.node(v).taxon);
        }
        for (std::size_t c : t.node(v).adj) {
            visit(c);
        }
    };
    visit(t.root());
    return LinearOrdering(std::move(seq));
}

namespace {

// Neighbours of v after `from` in rotation order, `from` excluded.
std::vector<std::size_t> children_after(const TreeNode& node, std::size_t from) {
    const auto& adj = node.adj;
    const std::size_t deg = adj.size();
    const std::size_t at = std::find(adj.begin(), adj.end(), from) - adj.begin();
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < deg; ++i) {
        out.push_back(adj[(at + i) % deg]);
    }
    return out;
}

mpz_class factorial(std::size_t k) {
    mpz_class out;
    mpz_fac_ui(out.get_mpz_t(), k);
    return out;
}

}  // namespace

CircularOrdering frontier(const PCTree& t) {
    const std::size_t start = t.leaf_of(0);
    std::vector<Taxon> seq{0};
    if (t.taxa().size() == 1) {
        return CircularOrdering(seq);
    }
    std::function<void(std::size_t, std::size_t)> visit = [&](std::size_t v, std::size_t from) {
        if (t.node(v).kind == NodeKind::Leaf) {
            seq.push_back(t.node(v).taxon);
            return;
        }
        for (std::size_t w : children_after(t.node(v), from)) {
            visit(w, v);
        }
    };
    visit(t.node(start).adj.front(), start);
    return CircularOrdering(std::move(seq));
}

mpz_class count_consistent(const PQTree& t) {
    mpz_class out = 1;
    for (const auto& node : t.nodes()) {
        if (node.kind == NodeKind::P) {
            out *= factorial(node.adj.size());
        } else if (node.kind == NodeKind::Q) {
            out *= 2;
        }
    }
    return out;
}

mpz_class count_consistent(const PCTree& t) {
    if (t.taxa().size() <= 2) {
        return 1;
    }
    mpz_class out = 1;
    for (const auto& node : t.nodes()) {
        if (node.kind == NodeKind::P) {
            out *= factorial(node.adj.size() - 1);
        } else if (node.kind == NodeKind::C) {
            out *= 2;
        }
    }
    return out / 2;
}

std::set<LinearOrdering> enumerate_consistent(const PQTree& t, std::size_t limit) {
    if (count_consistent(t) > limit) {
        throw SearchRefusedError("more than " + std::to_string(limit) + " consistent orderings");
    }
    using Seqs = std::vector<std::vector<Taxon>>;
    std::function<Seqs(std::size_t)> expand = [&](std::size_t v) -> Seqs {
        const TreeNode& node = t.node(v);
        if (node.kind == NodeKind::Leaf) {
            return {{node.taxon}};
        }
        std::vector<Seqs> parts;
        for (std::size_t c : node.adj) {
            parts.push_back(expand(c));
        }
        std::vector<std::vector<std::size_t>> arrangements;
        std::vector<std::size_t> perm(parts.size());
        std::iota(perm.begin(), perm.end(), 0);
        if (node.kind == NodeKind::Q) {
            arrangements.push_back(perm);
            arrangements.emplace_back(perm.rbegin(), perm.rend());
        } else {
            do {
                arrangements.push_back(perm);
            } while (std::next_permutation(perm.begin(), perm.end()));
        }
        Seqs out;
        for (const auto& arrangement : arrangements) {
            Seqs acc{{}};
            for (std::size_t i : arrangement) {
                Seqs next;
                for (const auto& prefix : acc) {
                    for (const auto& piece : parts[i]) {
                        auto seq = prefix;
                        seq.insert(seq.end(), piece.begin(), piece.end());
                        next.push_back(std::move(seq));
                    }
                }
                acc = std::move(next);
            }
            out.insert(out.end(), acc.begin(), acc.end());
        }
        return out;
    };
    std::set<LinearOrdering> out;
    for (auto& seq : expand(t.root())) {
        out.emplace(std::move(seq));
    }
    return out;
}

std::vector<CircularOrdering> enumerate_consistent(const PCTree& t, std::size_t limit) {
    if (count_consistent(t) > limit) {
        throw SearchRefusedError("more than " + std::to_string(limit) + " consistent orderings");
    }
    if (t.taxa().size() <= 2) {
        return {frontier(t).canonical()};
    }
    // Every ring is taxon 0 followed by a frontier of the tree rooted there.
    std::set<std::vector<Taxon>> rings;
    for (const auto& line : enumerate_consistent(root_tree(t, 0), 2 * limit)) {
        std::vector<Taxon> seq{0};
        for (Taxon x : line.sequence()) {
            seq.push_back(expanded_index(x, 0));
        }
        rings.insert(CircularOrdering(seq).canonical().sequence());
    }
    std::vector<CircularOrdering> out;
    for (const auto& seq : rings) {
        out.emplace_back(seq);
    }
    return out;
}

// ---------------------------------------------------------------------------

SetFamily alpha(const PQTree& t) {
    SetFamily out(t.taxa());
    for (std::size_t v = 0; v < t.size(); ++v) {
        out.insert(t.leaves_below(v));
        const TreeNode& node = t.node(v);
        if (node.kind != NodeKind::Q) {
            continue;
        }
        const std::size_t k = node.adj.size();
        for (std::size_t i = 0; i < k; ++i) {
            TaxonSubset run = t.leaves_below(node.adj[i]);
            for (std::size_t j = i + 1; j < k && j - i + 1 < k; ++j) {
                run |= t.leaves_below(node.adj[j]);
                out.insert(run);
            }
        }
    }
    return out;
}

PQTree pq_from_family(const SetFamily& f, const LinearOrdering& order) {
    const TaxonSet& taxa = f.taxa();
    const std::size_t n = taxa.size();
    if (order.size() != n) {
        throw DomainError("ordering size does not match the taxa");
    }
    if (n == 0 || !f.contains(TaxonSubset::full(n))) {
        throw DomainError("family lacks the full taxon set");
    }
    for (Taxon t = 0; t < n; ++t) {
        if (!f.contains(TaxonSubset::singleton(n, t))) {
            throw DomainError("family lacks the singleton {" + taxa.label(t) + "}");
        }
    }
    for (const auto& a : f) {
        if (!is_interval(a, order)) {
            throw DomainError("{" + format_subset(a, taxa) + "} is not an interval of " +
                              format_sequence(order.sequence(), taxa));
        }
    }
    if (auto rooted = is_rooted_family(f); !rooted) {
        throw DomainError("not a rooted family: " + pair_message(*rooted.witness, taxa) +
                          " lack a derived set");
    }

    std::set<TaxonSubset> laminar;
    std::set<TaxonSubset> q_marks;
    for (const auto& a : f) {
        bool compatible_with_all = true;
        for (const auto& b : f) {
            if (!a.compatible_with(b)) {
                compatible_with_all = false;
                // Only unions that are vertices of the laminar tree matter.
                if (a < b) {
                    q_marks.insert(a | b);
                }
            }
        }
        if (compatible_with_all) {
            laminar.insert(a);
        }
    }
    std::erase_if(q_marks, [&](const TaxonSubset& u) { return !laminar.count(u); });
    PQTree tree = laminar_tree(taxa, laminar, &order, q_marks);
    if (!(alpha(tree) == f)) {
        throw DomainError("family is not the interval family of any PQ-tree");
    }
    return tree;
}

SplitSystem beta(const PCTree& t) {
    SplitSystem out(t.taxa());
    if (t.taxa().size() < 2) {
        return out;
    }
    for (auto [u, v] : t.edges()) {
        out.insert(Split(t.side(u, v)));
    }
    for (std::size_t v = 0; v < t.size(); ++v) {
        const TreeNode& node = t.node(v);
        if (node.kind != NodeKind::C) {
            continue;
        }
        const std::size_t m = node.adj.size();
        std::vector<TaxonSubset> sides;
        for (std::size_t w : node.adj) {
            sides.push_back(t.side(v, w));
        }
        for (std::size_t i = 0; i < m; ++i) {
            TaxonSubset arc = sides[i];
            for (std::size_t len = 2; len + 2 <= m; ++len) {
                arc |= sides[(i + len - 1) % m];
                out.insert(Split(arc));
            }
        }
    }
    return out;
}

PCTree pc_from_system(const SplitSystem& s, const CircularOrdering& ring) {
    const TaxonSet& taxa = s.taxa();
    const std::size_t n = taxa.size();
    if (ring.size() != n) {
        throw DomainError("ring size does not match the taxa");
    }
    if (!is_circular(s, ring)) {
        throw DomainError("split system is not circular for ring " +
                          format_sequence(ring.sequence(), taxa));
    }
    if (auto unrooted = is_unrooted_family(s); !unrooted) {
        throw DomainError("not an unrooted family: " + format_split(unrooted.witness->first, taxa) +
                          " and " + format_split(unrooted.witness->second, taxa) +
                          " lack a derived split");
    }
    if (n == 1) {
        return PCTree(taxa, {TreeNode{NodeKind::Leaf, 0, {}}});
    }
    const Taxon r = ring[n - 1];
    PQTree rooted = pq_from_family(unroot_family(s, r), ring.cut_at(r));
    return unroot_tree(rooted, taxa, r);
}

// ---------------------------------------------------------------------------

PCTree unroot_tree(const PQTree& t, const TaxonSet& full, Taxon r) {
    if (r >= full.size() || full.size() != t.taxa().size() + 1 ||
        !full.without(r).same_labels(t.taxa())) {
        throw DomainError("unrooting target must be the tree's taxa plus the new leaf");
    }
    const std::vector<Taxon> embed = embedding(t.taxa(), full);
    std::vector<TreeNode> nodes(t.nodes());
    const std::size_t extra = nodes.size();
    for (std::size_t v = 0; v < extra; ++v) {
        TreeNode& node = nodes[v];
        if (node.kind == NodeKind::Leaf) {
            node.taxon = embed[node.taxon];
        } else if (node.kind == NodeKind::Q) {
            node.kind = NodeKind::C;
        }
    }
    for (std::size_t v = 0; v < extra; ++v) {
        for (std::size_t c : t.node(v).adj) {
            nodes[c].adj.push_back(v);
        }
    }
    nodes[t.root()].adj.push_back(extra);
    nodes.push_back(TreeNode{NodeKind::Leaf, r, {t.root()}});
    return PCTree(full, std::move(nodes));
}

PCTree unroot_tree(const PQTree& t, const std::string& r) {
    TaxonSet full = t.taxa().with(r);
    return unroot_tree(t, full, full.size() - 1);
}

PQTree root_tree(const PCTree& t, Taxon r) {
    const std::size_t n = t.taxa().size();
    if (r >= n) {
        throw DomainError("base taxon out of range");
    }
    if (n == 1) {
        throw DomainError("cannot root a one-leaf tree at its only leaf");
    }
    TaxonSet reduced = t.taxa().without(r);
    const std::size_t leaf = t.leaf_of(r);
    std::vector<TreeNode> nodes;
    std::function<std::size_t(std::size_t, std::size_t)> copy = [&](std::size_t v,
                                                                    std::size_t from) {
        const TreeNode& node = t.node(v);
        const std::size_t id = nodes.size();
        nodes.push_back(TreeNode{node.kind, 0, {}});
        if (node.kind == NodeKind::Leaf) {
            nodes[id].taxon = reduced_index(node.taxon, r);
            return id;
        }
        if (node.kind == NodeKind::C) {
            nodes[id].kind = NodeKind::Q;
        }
        for (std::size_t w : children_after(node, from)) {
            std::size_t c = copy(w, v);
            nodes[id].adj.push_back(c);
        }
        return id;
    };
    std::size_t root = copy(t.node(leaf).adj.front(), leaf);
    return PQTree(std::move(reduced), std::move(nodes), root);
}

// ---------------------------------------------------------------------------

namespace {

std::string join(const std::vector<std::string>& parts) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        out += (i ? "," : "") + parts[i];
    }
    return out;
}

std::string group(std::vector<std::string> parts, NodeKind kind) {
    if (kind == NodeKind::P) {
        std::sort(parts.begin(), parts.end());
    } else {
        std::vector<std::string> rev(parts.rbegin(), parts.rend());
        parts = std::min(parts, rev);
    }
    return "(" + join(parts) + ")" + kind_letter(kind);
}

}  // namespace

std::string canonical_form(const PQTree& t) {
    std::function<std::string(std::size_t)> canon = [&](std::size_t v) {
        const TreeNode& node = t.node(v);
        if (node.kind == NodeKind::Leaf) {
            return t.taxa().label(node.taxon);
        }
        std::vector<std::string> parts;
        for (std::size_t c : node.adj) {
            parts.push_back(canon(c));
        }
        return group(std::move(parts), node.kind);
    };
    return canon(t.root()) + ";";
}

std::string canonical_form(const PCTree& t) {
    const TaxonSet& taxa = t.taxa();
    const std::size_t n = taxa.size();
    if (n == 1) {
        return taxa.label(0) + "!;";
    }
    if (n == 2) {
        auto [a, b] = std::minmax(taxa.label(0), taxa.label(1));
        return "(" + a + "," + b + ")!;";
    }
    std::function<std::string(std::size_t, std::size_t)> canon = [&](std::size_t v,
                                                                     std::size_t from) {
        const TreeNode& node = t.node(v);
        if (node.kind == NodeKind::Leaf) {
            return taxa.label(node.taxon);
        }
        std::vector<std::string> parts;
        for (std::size_t w : children_after(node, from)) {
            parts.push_back(canon(w, v));
        }
        return group(std::move(parts), node.kind);
    };
    Taxon least = 0;
    for (Taxon x = 1; x < n; ++x) {
        if (taxa.label(x) < taxa.label(least)) {
            least = x;
        }
    }
    const std::size_t root = t.node(t.leaf_of(least)).adj.front();
    const TreeNode& node = t.node(root);
    std::vector<std::string> parts;
    for (std::size_t w : node.adj) {
        parts.push_back(canon(w, root));
    }
    if (node.kind == NodeKind::P) {
        std::sort(parts.begin(), parts.end());
    } else {
        std::vector<std::string> best = parts;
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t i = 0; i < parts.size(); ++i) {
                std::rotate(parts.begin(), parts.begin() + 1, parts.end());
                best = std::min(best, parts);
            }
            std::reverse(parts.begin(), parts.end());
        }
        parts = std::move(best);
    }
    return "(" + join(parts) + ")" + kind_letter(node.kind) + "!;";
}

bool trees_equivalent(const PQTree& a, const PQTree& b) {
    return canonical_form(a) == canonical_form(b);
}

bool trees_equivalent(const PCTree& a, const PCTree& b) {
    return canonical_form(a) == canonical_form(b);
}

// ---------------------------------------------------------------------------

namespace {

struct Group {
    std::size_t offset = 0;
    std::string label;  // leaves only
    std::vector<Group> children;
    std::optional<NodeKind> kind;
    bool leaf() const { return children.empty(); }
};

class NewickReader {
public:
    explicit NewickReader(std::string_view text) : text_(text) {}

    std::pair<Group, bool> read() {
        Group root = node();
        skip_space();
        bool unrooted = false;
        if (peek() == '!') {
            ++pos_;
            unrooted = true;
        }
        expect(';');
        skip_space();
        if (pos_ != text_.size()) {
            fail("trailing text after ';'");
        }
        return {std::move(root), unrooted};
    }

    [[noreturn]] void fail(const std::string& message, std::optional<std::size_t> at = {}) const {
        const std::size_t offset = at.value_or(pos_);
        std::size_t line = 1, column = 1;
        for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
            if (text_[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ParseError(message, line, column);
    }

private:
    static bool is_label_char(char c) {
        return !std::isspace(static_cast<unsigned char>(c)) &&
               std::string_view(",|();:#!").find(c) == std::string_view::npos;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    void expect(char c) {
        skip_space();
        if (peek() != c) {
            fail(std::string("expected '") + c + "'");
        }
        ++pos_;
    }

    Group node() {
        skip_space();
        Group g;
        g.offset = pos_;
        if (peek() == '(') {
            ++pos_;
            g.children.push_back(node());
            skip_space();
            while (peek() == ',') {
                ++pos_;
                g.children.push_back(node());
                skip_space();
            }
            expect(')');
            skip_space();
            const std::size_t kind_at = pos_;
            std::string letter;
            while (pos_ < text_.size() && is_label_char(text_[pos_])) {
                letter += text_[pos_++];
            }
            if (letter == "P") {
                g.kind = NodeKind::P;
            } else if (letter == "Q") {
                g.kind = NodeKind::Q;
            } else if (letter == "C") {
                g.kind = NodeKind::C;
            } else if (!letter.empty()) {
                fail("unknown vertex kind '" + letter + "'", kind_at);
            }
            return g;
        }
        while (pos_ < text_.size() && is_label_char(text_[pos_])) {
            g.label += text_[pos_++];
        }
        if (g.label.empty()) {
            fail("expected a label or '('");
        }
        return g;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

TaxonSet collect_taxa(const Group& root) {
    std::vector<std::string> labels;
    std::function<void(const Group&)> walk = [&](const Group& g) {
        if (g.leaf()) {
            labels.push_back(g.label);
        }
        for (const auto& c : g.children) {
            walk(c);
        }
    };
    walk(root);
    try {
        return TaxonSet(std::move(labels));
    } catch (const DomainError& e) {
        throw ParseError(e.what(), 1, 0);
    }
}

class TreeBuilder {
public:
    TreeBuilder(const NewickReader& reader, const TaxonSet& taxa) : reader_(reader), taxa_(taxa) {}

    std::size_t add(const Group& g, NodeKind forbidden) {
        const std::size_t id = nodes.size();
        nodes.emplace_back();
        if (g.leaf()) {
            auto t = taxa_.find(g.label);
            if (!t) {
                reader_.fail("unknown label '" + g.label + "'", g.offset);
            }
            nodes[id].taxon = *t;
            return id;
        }
        NodeKind kind = g.kind.value_or(NodeKind::P);
        if (kind == forbidden) {
            reader_.fail(std::string("vertex kind ") + kind_letter(kind) +
                             " is not allowed in this tree",
                         g.offset);
        }
        nodes[id].kind = kind;
        for (const auto& c : g.children) {
            std::size_t child = add(c, forbidden);
            nodes[id].adj.push_back(child);
        }
        return id;
    }

    std::vector<TreeNode> nodes;

private:
    const NewickReader& reader_;
    const TaxonSet& taxa_;
};

PQTree build_pq(const NewickReader& reader, const Group& root, const TaxonSet& taxa) {
    TreeBuilder b(reader, taxa);
    std::size_t r = b.add(root, NodeKind::C);
    try {
        return PQTree(taxa, std::move(b.nodes), r);
    } catch (const DomainError& e) {
        reader.fail(e.what(), root.offset);
    }
}

PCTree build_pc(const NewickReader& reader, const Group& root, const TaxonSet& taxa) {
    TreeBuilder b(reader, taxa);
    b.add(root, NodeKind::Q);
    auto& nodes = b.nodes;
    // Children were listed in order; append the parent edge to make rotations.
    std::vector<std::vector<std::size_t>> children;
    for (const auto& node : nodes) {
        children.push_back(node.adj);
    }
    for (std::size_t v = 0; v < children.size(); ++v) {
        for (std::size_t c : children[v]) {
            nodes[c].adj.push_back(v);
        }
    }
    if (root.children.size() == 2 && root.children[0].leaf() && root.children[1].leaf() &&
        !root.kind) {
        // A bare edge between two leaves.
        nodes = {TreeNode{NodeKind::Leaf, nodes[1].taxon, {1}},
                 TreeNode{NodeKind::Leaf, nodes[2].taxon, {0}}};
    }
    try {
        return PCTree(taxa, std::move(nodes));
    } catch (const DomainError& e) {
        reader.fail(e.what(), root.offset);
    }
}

}  // namespace

AnyTree parse_newick(std::string_view text, const TaxonSet* taxa) {
    NewickReader reader(text);
    auto [root, unrooted] = reader.read();
    TaxonSet set = taxa ? *taxa : collect_taxa(root);
    if (unrooted) {
        return build_pc(reader, root, set);
    }
    return build_pq(reader, root, set);
}

PQTree parse_pq_tree(std::string_view text, const TaxonSet* taxa) {
    AnyTree t = parse_newick(text, taxa);
    if (!std::holds_alternative<PQTree>(t)) {
        throw ParseError("expected a rooted tree, found a '!;' marker", 1, 0);
    }
    return std::get<PQTree>(std::move(t));
}

PCTree parse_pc_tree(std::string_view text, const TaxonSet* taxa) {
    AnyTree t = parse_newick(text, taxa);
    if (!std::holds_alternative<PCTree>(t)) {
        throw ParseError("expected an unrooted tree ending in '!;'", 1, 0);
    }
    return std::get<PCTree>(std::move(t));
}

}  // namespace pcfit
