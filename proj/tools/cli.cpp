#include "cli.hpp"

#include "pcfit/error.hpp"
#include "pcfit/families.hpp"
#include "pcfit/matrices.hpp"
#include "pcfit/pipeline.hpp"
#include "pcfit/splits.hpp"
#include "pcfit/trees.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <sstream>

namespace pcfit {

namespace {

constexpr std::size_t kSearchLimit = 10;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string input;
    std::string ordering;
    std::string base;
    std::string out;
    std::string dot;
    std::string format;
    std::string tree;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out || !(out << text)) {
        throw UsageError("cannot write " + path);
    }
}

void emit(const Options& o, std::ostream& out, const std::string& text) {
    if (o.out.empty()) {
        out << text;
    } else {
        write_file(o.out, text);
    }
}

DissimilarityMap load_map(const Options& o) {
    if (o.input.empty()) {
        throw UsageError("--input is required");
    }
    return parse_dissimilarity(read_file(o.input));
}

std::optional<CircularOrdering> given_ring(const Options& o, const TaxonSet& taxa) {
    if (o.ordering.empty()) {
        return std::nullopt;
    }
    try {
        return CircularOrdering(parse_sequence(o.ordering, taxa));
    } catch (const DomainError& e) {
        throw UsageError(std::string("--ordering: ") + e.what());
    }
}

std::optional<Taxon> given_base(const Options& o, const TaxonSet& taxa) {
    if (o.base.empty()) {
        return std::nullopt;
    }
    auto t = taxa.find(o.base);
    if (!t) {
        throw UsageError("--base: unknown label '" + o.base + "'");
    }
    return t;
}

void require_searchable(const Options& o, const TaxonSet& taxa) {
    if (o.ordering.empty() && taxa.size() > kSearchLimit) {
        throw UsageError("more than " + std::to_string(kSearchLimit) +
                         " taxa: pass --ordering to name a ring");
    }
}

// Supplied ring, checked; otherwise the first one found by search.
CircularOrdering certified_ring(const Options& o, const DissimilarityMap& d) {
    require_searchable(o, d.taxa());
    if (auto ring = given_ring(o, d.taxa())) {
        return *ring;
    }
    auto ring = find_kalmanson_ordering(d, kSearchLimit);
    if (!ring) {
        throw DomainError("not Kalmanson for any ring");
    }
    return *ring;
}

std::string quartet_text(const QuartetWitness& w, const TaxonSet& taxa) {
    return "quartet " + format_sequence({w.taxa.begin(), w.taxa.end()}, taxa) + " sums " +
           to_string(w.sums[0]) + "," + to_string(w.sums[1]) + "," + to_string(w.sums[2]);
}

int cmd_check(const Options& o, std::ostream& out) {
    DissimilarityMap d = load_map(o);
    const TaxonSet& taxa = d.taxa();
    require_searchable(o, taxa);
    out << "taxa: " << taxa.size() << "\n";

    auto ultra = is_ultrametric(d);
    out << "ultrametric: " << (ultra ? "yes" : "no");
    if (!ultra) {
        const auto& t = ultra.witness->taxa;
        out << " (triple " << format_sequence({t.begin(), t.end()}, taxa) << ")";
    }
    out << "\n";

    auto four = four_point_check(d);
    out << "four-point: " << (four ? "yes" : "no");
    if (!four) {
        out << " (" << quartet_text(*four.witness, taxa) << ")";
    }
    out << "\n";

    std::optional<CircularOrdering> ring = given_ring(o, taxa);
    bool kalmanson = false;
    if (ring) {
        auto k = kalmanson_check(d, *ring);
        kalmanson = k.holds;
        out << "kalmanson: " << (kalmanson ? "yes" : "no") << " (ring "
            << format_sequence(ring->sequence(), taxa);
        if (!kalmanson) {
            out << ", " << quartet_text(*k.witness, taxa);
        }
        out << ")\n";
    } else {
        ring = find_kalmanson_ordering(d, kSearchLimit);
        kalmanson = ring.has_value();
        out << "kalmanson: " << (kalmanson ? "yes" : "no");
        if (ring) {
            out << " (ring " << format_sequence(ring->sequence(), taxa) << ")";
        }
        out << "\n";
    }
    return kalmanson ? 0 : 1;
}

int cmd_gromov(const Options& o, std::ostream& out) {
    DissimilarityMap d = load_map(o);
    auto r = given_base(o, d.taxa());
    if (!r) {
        throw UsageError("--base is required");
    }
    emit(o, out, write_matrix(gromov_product(d, *r)));
    return 0;
}

int cmd_decompose(const Options& o, std::ostream& out) {
    DissimilarityMap d = load_map(o);
    CircularOrdering ring = certified_ring(o, d);
    emit(o, out, write_split_system(kalmanson_decompose(d, ring)));
    return 0;
}

int cmd_pyramid(const Options& o, std::ostream& out) {
    DissimilarityMap d = load_map(o);
    CircularOrdering ring = certified_ring(o, d);
    Taxon r = given_base(o, d.taxa()).value_or(ring[ring.size() - 1]);
    IndexedFamily pyramid = maximally_linked_sets(gromov_product(d, r), ring.cut_at(r));
    if (o.format == "splits") {
        emit(o, out, write_split_system(eta_r(pyramid, d.taxa(), r)));
    } else {
        emit(o, out, write_family(pyramid));
    }
    return 0;
}

AnalysisReport analyse(const Options& o, const DissimilarityMap& d) {
    require_searchable(o, d.taxa());
    return best_fit_pc_tree(d, given_base(o, d.taxa()), given_ring(o, d.taxa()), kSearchLimit);
}

int cmd_pctree(const Options& o, std::ostream& out) {
    DissimilarityMap d = load_map(o);
    AnalysisReport report = analyse(o, d);
    if (o.format == "text") {
        emit(o, out, format_report(report));
    } else if (o.format == "splits") {
        emit(o, out, write_split_system(report.padded_decomposition()));
    } else {
        emit(o, out, canonical_form(report.tree) + "\n");
    }
    if (!o.dot.empty()) {
        WeightedSplitSystem weights = report.padded_decomposition();
        write_file(o.dot, to_dot(report.tree, &weights));
    }
    return report.all_hold() ? 0 : 1;
}

int cmd_verify(const Options& o, std::ostream& out) {
    DissimilarityMap d = load_map(o);
    const TaxonSet& taxa = d.taxa();
    CircularOrdering ring = certified_ring(o, d);
    Taxon r = given_base(o, taxa).value_or(ring[ring.size() - 1]);
    std::vector<DiagramCheck> checks = verify_diagram(d, r, ring);
    if (!o.tree.empty()) {
        PCTree given = parse_pc_tree(read_file(o.tree), &taxa);
        DiagramCheck c{"tree-matches", false, {}};
        try {
            AnalysisReport report = best_fit_pc_tree(d, r, ring, kSearchLimit);
            c.holds = trees_equivalent(given, report.tree);
            if (!c.holds) {
                c.witness = "best fit is " + canonical_form(report.tree);
            }
        } catch (const Error& e) {
            c.witness = e.what();
        }
        checks.push_back(c);
    }
    std::ostringstream text;
    text << "base: " << taxa.label(r) << "\n";
    text << "ring: " << format_sequence(ring.sequence(), taxa) << "\n";
    bool ok = true;
    for (const auto& c : checks) {
        text << c.name << ": " << (c.holds ? "pass" : "FAIL");
        if (!c.holds) {
            text << " (" << c.witness << ")";
        }
        text << "\n";
        ok = ok && c.holds;
    }
    emit(o, out, text.str());
    return ok ? 0 : 1;
}

int cmd_export_dot(const Options& o, std::ostream& out) {
    if (o.tree.empty()) {
        throw UsageError("--tree is required");
    }
    if (o.input.empty()) {
        emit(o, out, to_dot(parse_pc_tree(read_file(o.tree))));
        return 0;
    }
    DissimilarityMap d = load_map(o);
    PCTree t = parse_pc_tree(read_file(o.tree), &d.taxa());
    WeightedSplitSystem weights = analyse(o, d).padded_decomposition();
    emit(o, out, to_dot(t, &weights));
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Best-fit PC-trees for Kalmanson dissimilarity maps", "pcfit"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--input", o.input, "dissimilarity matrix file");
        sub->add_option("--ordering", o.ordering, "ring as comma-separated labels");
        sub->add_option("--base", o.base, "base taxon label");
        sub->add_option("--out", o.out, "write the result here instead of standard output");
    };

    std::vector<std::pair<CLI::App*, std::function<int()>>> commands;
    auto add = [&](const std::string& name, const std::string& help, auto fn) {
        CLI::App* sub = app.add_subcommand(name, help);
        add_common(sub);
        commands.emplace_back(sub, [&o, &out, fn] { return fn(o, out); });
        return sub;
    };

    add("check", "ultrametric, four-point and Kalmanson tests", cmd_check);
    add("gromov", "Gromov product at the base taxon", cmd_gromov);
    add("decompose", "weighted circular split system", cmd_decompose);
    add("pyramid", "indexed pyramid of maximally linked sets", cmd_pyramid)
        ->add_option("--format", o.format, "text or splits")
        ->check(CLI::IsMember({"text", "splits"}));
    auto* pctree = add("pctree", "best-fit PC-tree", cmd_pctree);
    pctree->add_option("--format", o.format, "newick, text or splits")
        ->check(CLI::IsMember({"text", "splits", "newick"}));
    pctree->add_option("--dot", o.dot, "also write Graphviz source here");
    add("verify", "check every edge of the commuting diagram", cmd_verify)
        ->add_option("--tree", o.tree, "compare against this PC-tree");
    add("export-dot", "Graphviz source for a PC-tree", cmd_export_dot)
        ->add_option("--tree", o.tree, "PC-tree file");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    try {
        for (auto& [sub, fn] : commands) {
            if (sub->parsed()) {
                return fn();
            }
        }
    } catch (const UsageError& e) {
        err << "usage: " << e.what() << "\n";
        return 2;
    } catch (const SearchRefusedError& e) {
        err << "usage: " << e.what() << "\n";
        return 2;
    } catch (const NotKalmansonError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace pcfit
