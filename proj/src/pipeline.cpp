#include "pcfit/pipeline.hpp"

#include "pcfit/error.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace pcfit {

bool AnalysisReport::all_hold() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.holds; });
}

WeightedSplitSystem AnalysisReport::padded_decomposition() const {
    std::map<Split, Rational> weights = decomposition.weights();
    for (const Split& s : closure_additions) {
        weights.emplace(s, 0);
    }
    return WeightedSplitSystem(decomposition.taxa(), std::move(weights));
}

namespace {

template <class M>
std::string first_difference(const M& expected, const M& actual) {
    if (!(expected.taxa() == actual.taxa())) {
        return "taxa differ";
    }
    const std::size_t n = expected.size();
    for (Taxon i = 0; i < n; ++i) {
        for (Taxon j = i; j < n; ++j) {
            if (expected(i, j) != actual(i, j)) {
                return "(" + expected.taxa().label(i) + "," + expected.taxa().label(j) +
                       "): expected " + to_string(expected(i, j)) + ", got " +
                       to_string(actual(i, j));
            }
        }
    }
    return {};
}

std::string first_difference(const SplitSystem& expected, const SplitSystem& actual) {
    for (const Split& s : expected) {
        if (!actual.contains(s)) {
            return "missing " + format_split(s, expected.taxa());
        }
    }
    for (const Split& s : actual) {
        if (!expected.contains(s)) {
            return "extra " + format_split(s, expected.taxa());
        }
    }
    return {};
}

DiagramCheck run_check(const std::string& name, const std::function<std::string()>& body) {
    try {
        std::string witness = body();
        return {name, witness.empty(), witness};
    } catch (const std::exception& e) {
        return {name, false, e.what()};
    }
}

struct AffineRoute {
    SymmetricMatrix gromov;
    LinearOrdering order;
    IndexedFamily pyramid;
    SetFamily closed;
    PQTree rooted;
};

AffineRoute affine_route(const DissimilarityMap& d, Taxon r, const CircularOrdering& ring) {
    AffineRoute a;
    a.gromov = gromov_product(d, r);
    a.order = ring.cut_at(r);
    a.pyramid = maximally_linked_sets(a.gromov, a.order);
    a.closed = rooted_closure(with_singletons(a.pyramid.family()));
    a.rooted = pq_from_family(a.closed, a.order);
    return a;
}

void require_kalmanson(const DissimilarityMap& d, const CircularOrdering& ring) {
    auto k = kalmanson_check(d, ring);
    if (!k) {
        const auto& w = *k.witness;
        throw NotKalmansonError("not Kalmanson for ring " +
                                    format_sequence(ring.sequence(), d.taxa()) + ": quartet " +
                                    format_sequence({w.taxa.begin(), w.taxa.end()}, d.taxa()),
                                w);
    }
}

}  // namespace

std::vector<DiagramCheck> verify_diagram(const DissimilarityMap& d, Taxon r,
                                         const CircularOrdering& ring) {
    const TaxonSet& taxa = d.taxa();
    std::vector<DiagramCheck> out;
    out.push_back(run_check("kalmanson", [&] {
        require_kalmanson(d, ring);
        return std::string();
    }));
    out.push_back(run_check("gromov-inverse", [&] {
        DissimilarityMap back =
            inverse_gromov(gromov_product(d, r), taxa.label(r)).reordered(taxa);
        return first_difference(d, back);
    }));
    out.push_back(run_check("split-evaluation", [&] {
        return first_difference(d, evaluate(kalmanson_decompose(d, ring)));
    }));
    out.push_back(run_check("pyramid-matrix", [&] {
        SymmetricMatrix g = gromov_product(d, r);
        return first_difference(g, family_to_matrix(maximally_linked_sets(g, ring.cut_at(r))));
    }));
    out.push_back(run_check("pyramid-evaluation", [&] {
        SymmetricMatrix g = gromov_product(d, r);
        auto pyramid = maximally_linked_sets(g, ring.cut_at(r));
        return first_difference(d, evaluate(eta_r(pyramid, taxa, r)));
    }));
    out.push_back(run_check("closure-commutes", [&] {
        SymmetricMatrix g = gromov_product(d, r);
        auto pyramid = maximally_linked_sets(g, ring.cut_at(r));
        SplitSystem affine = root_family(rooted_closure(with_singletons(pyramid.family())), taxa, r);
        SplitSystem projective = closure(kalmanson_decompose(d, ring).system());
        return first_difference(projective, affine);
    }));
    out.push_back(run_check("tree-square", [&] {
        AffineRoute a = affine_route(d, r, ring);
        return first_difference(root_family(alpha(a.rooted), taxa, r),
                                beta(unroot_tree(a.rooted, taxa, r)));
    }));
    return out;
}

AnalysisReport best_fit_pc_tree(const DissimilarityMap& d, std::optional<Taxon> r,
                                std::optional<CircularOrdering> ring, std::size_t search_limit) {
    const TaxonSet& taxa = d.taxa();
    const std::size_t n = taxa.size();
    if (n < 2) {
        throw DomainError("a best-fit tree needs at least two taxa");
    }
    if (ring) {
        if (ring->size() != n) {
            throw DomainError("ring size does not match the taxa");
        }
        require_kalmanson(d, *ring);
    } else {
        ring = find_kalmanson_ordering(d, search_limit);
        if (!ring) {
            auto k = kalmanson_check(d, CircularOrdering::identity(n));
            throw NotKalmansonError("not Kalmanson for any ring", *k.witness);
        }
    }
    if (!r) {
        r = (*ring)[n - 1];
    }
    if (*r >= n) {
        throw DomainError("base taxon out of range");
    }

    AnalysisReport report;
    report.input = d;
    report.base = *r;
    report.ring = *ring;
    report.decomposition = kalmanson_decompose(d, *ring);

    const SplitSystem decomposed = report.decomposition.system();
    const SplitSystem closed = closure(decomposed);
    for (const Split& s : closed) {
        if (!decomposed.contains(s)) {
            report.closure_additions.push_back(s);
        }
    }

    AffineRoute affine = affine_route(d, *r, *ring);
    report.tree = unroot_tree(affine.rooted, taxa, *r);
    report.projective_tree = pc_from_system(closed, *ring);

    report.checks = verify_diagram(d, *r, *ring);
    report.checks.push_back(run_check("routes-agree", [&] {
        std::string a = canonical_form(report.tree);
        std::string b = canonical_form(report.projective_tree);
        return a == b ? std::string() : a + " vs " + b;
    }));
    report.checks.push_back(run_check("tree-splits", [&] {
        return first_difference(closed, beta(report.tree));
    }));
    report.checks.push_back(run_check("padded-evaluation", [&] {
        return first_difference(d, evaluate(report.padded_decomposition()));
    }));
    return report;
}

std::string to_dot(const PCTree& t, const WeightedSplitSystem* weights) {
    const TaxonSet& taxa = t.taxa();
    std::ostringstream out;
    out << "graph pctree {\n";
    for (std::size_t v = 0; v < t.size(); ++v) {
        const TreeNode& node = t.node(v);
        out << "  n" << v;
        switch (node.kind) {
            case NodeKind::Leaf:
                out << " [shape=plaintext, label=\"" << taxa.label(node.taxon) << "\"]";
                break;
            case NodeKind::P:
                out << " [shape=circle, label=\"\", width=0.15]";
                break;
            default:
                out << " [shape=box, label=\"\", width=0.2, height=0.2]";
                break;
        }
        out << ";\n";
    }
    for (auto [u, v] : t.edges()) {
        out << "  n" << u << " -- n" << v;
        if (weights) {
            Split s(t.side(u, v));
            auto it = weights->weights().find(s);
            if (it == weights->weights().end() || it->second == 0) {
                out << " [style=dashed]";
            } else {
                out << " [label=\"" << to_string(it->second) << "\"]";
            }
        }
        out << ";\n";
    }
    out << "}\n";
    return out.str();
}

std::string format_report(const AnalysisReport& report) {
    const TaxonSet& taxa = report.input.taxa();
    std::ostringstream out;
    out << "taxa: " << format_sequence(CircularOrdering::identity(taxa.size()).sequence(), taxa)
        << "\n";
    out << "base: " << taxa.label(report.base) << "\n";
    out << "ring: " << format_sequence(report.ring.sequence(), taxa) << "\n";
    out << "splits:\n";
    for (const auto& [s, w] : report.decomposition.weights()) {
        out << "  " << format_split(s, taxa) << " " << to_string(w) << "\n";
    }
    out << "closure additions:";
    if (report.closure_additions.empty()) {
        out << " none";
    }
    out << "\n";
    for (const Split& s : report.closure_additions) {
        out << "  " << format_split(s, taxa) << " 0\n";
    }
    out << "tree: " << canonical_form(report.tree) << "\n";
    out << "checks:\n";
    for (const auto& c : report.checks) {
        out << "  " << c.name << ": " << (c.holds ? "pass" : "FAIL");
        if (!c.holds) {
            out << " (" << c.witness << ")";
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace pcfit
