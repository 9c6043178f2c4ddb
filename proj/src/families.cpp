#include "pcfit/families.hpp"

#include "closure.hpp"
#include "pcfit/error.hpp"

#include <algorithm>
#include <sstream>

namespace pcfit {

SetFamily::SetFamily(TaxonSet taxa) : taxa_(std::move(taxa)) {}

SetFamily::SetFamily(TaxonSet taxa, const std::vector<TaxonSubset>& members)
    : taxa_(std::move(taxa)) {
    for (const auto& a : members) {
        insert(a);
    }
}

bool SetFamily::insert(const TaxonSubset& a) {
    if (a.universe() != taxa_.size()) {
        throw DomainError("family member over a different taxon count");
    }
    if (a.empty()) {
        throw DomainError("family members must be non-empty");
    }
    return members_.insert(a).second;
}

bool SetFamily::is_subset_of(const SetFamily& other) const {
    return std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                         members_.end());
}

IndexedFamily::IndexedFamily(TaxonSet taxa, std::map<TaxonSubset, Rational> index)
    : taxa_(std::move(taxa)), index_(std::move(index)) {
    for (auto& [a, f] : index_) {
        if (a.universe() != taxa_.size() || a.empty()) {
            throw DomainError("indexed family member is empty or over other taxa");
        }
        f.canonicalize();
    }
}

const Rational& IndexedFamily::operator[](const TaxonSubset& a) const {
    auto it = index_.find(a);
    if (it == index_.end()) {
        throw DomainError("set {" + format_subset(a, taxa_) + "} is not a member");
    }
    return it->second;
}

SetFamily IndexedFamily::family() const {
    SetFamily out(taxa_);
    for (const auto& [a, f] : index_) {
        out.insert(a);
    }
    return out;
}

namespace {

template <class Less>
bool index_respects(const IndexedFamily& f, Less less) {
    for (const auto& [a, fa] : f.index()) {
        for (const auto& [b, fb] : f.index()) {
            if (a != b && a.is_subset_of(b) && !less(fa, fb)) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

bool has_strict_index(const IndexedFamily& f) {
    return index_respects(f, [](const Rational& x, const Rational& y) { return x < y; });
}

bool has_monotone_index(const IndexedFamily& f) {
    return index_respects(f, [](const Rational& x, const Rational& y) { return x <= y; });
}

// ---------------------------------------------------------------------------
// Text format

namespace {

struct FamilyLine {
    std::size_t line;
    std::vector<std::string> labels;
    std::optional<Rational> index;
};

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<FamilyLine> read_family_lines(std::string_view text) {
    std::vector<FamilyLine> out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string body = trim(line);
        if (body.empty() || body.front() == '#') {
            continue;
        }
        FamilyLine parsed{line_no, {}, std::nullopt};
        if (auto colon = body.find(':'); colon != std::string::npos) {
            try {
                parsed.index = parse_rational(trim(body.substr(colon + 1)));
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what(), line_no, colon + 2);
            }
            body = trim(body.substr(0, colon));
        }
        std::stringstream items(body);
        std::string item;
        while (std::getline(items, item, ',')) {
            item = trim(item);
            if (item.empty()) {
                throw ParseError("empty label", line_no, 0);
            }
            parsed.labels.push_back(item);
        }
        if (parsed.labels.empty()) {
            throw ParseError("empty member", line_no, 0);
        }
        out.push_back(std::move(parsed));
    }
    return out;
}

TaxonSet infer_taxa(const std::vector<FamilyLine>& lines) {
    std::vector<std::string> labels;
    std::set<std::string> seen;
    for (const auto& l : lines) {
        for (const auto& label : l.labels) {
            if (seen.insert(label).second) {
                labels.push_back(label);
            }
        }
    }
    return TaxonSet(std::move(labels));
}

TaxonSubset to_subset(const FamilyLine& l, const TaxonSet& taxa) {
    TaxonSubset a(taxa.size());
    try {
        for (const auto& label : l.labels) {
            a.insert(taxa.index_of(label));
        }
    } catch (const DomainError& e) {
        throw ParseError(e.what(), l.line, 0);
    }
    if (a.count() != l.labels.size()) {
        throw ParseError("label repeated within a member", l.line, 0);
    }
    return a;
}

}  // namespace

SetFamily parse_family(std::string_view text, const TaxonSet* taxa) {
    auto lines = read_family_lines(text);
    TaxonSet set = taxa ? *taxa : infer_taxa(lines);
    SetFamily out(set);
    for (const auto& l : lines) {
        out.insert(to_subset(l, set));
    }
    return out;
}

IndexedFamily parse_indexed_family(std::string_view text, const TaxonSet* taxa) {
    auto lines = read_family_lines(text);
    TaxonSet set = taxa ? *taxa : infer_taxa(lines);
    std::map<TaxonSubset, Rational> index;
    for (const auto& l : lines) {
        if (!l.index) {
            throw ParseError("member without an index value", l.line, 0);
        }
        if (!index.emplace(to_subset(l, set), *l.index).second) {
            throw ParseError("member listed twice", l.line, 0);
        }
    }
    return IndexedFamily(set, std::move(index));
}

std::string write_family(const SetFamily& f) {
    std::string out;
    for (const auto& a : f) {
        out += format_subset(a, f.taxa()) + "\n";
    }
    return out;
}

std::string write_family(const IndexedFamily& f) {
    std::string out;
    for (const auto& [a, value] : f.index()) {
        out += format_subset(a, f.taxa()) + ": " + to_string(value) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

bool has_axioms(const SetFamily& f) {
    const std::size_t n = f.taxa().size();
    if (n == 0 || !f.contains(TaxonSubset::full(n))) {
        return false;
    }
    for (Taxon t = 0; t < n; ++t) {
        if (!f.contains(TaxonSubset::singleton(n, t))) {
            return false;
        }
    }
    return true;
}

std::vector<TaxonSubset> derived_sets(const TaxonSubset& a, const TaxonSubset& b) {
    return {a & b, a - b, b - a, a | b};
}

}  // namespace

CheckResult<SubsetPair> is_hierarchy(const SetFamily& f) {
    const std::vector<TaxonSubset> list(f.begin(), f.end());
    for (std::size_t i = 0; i < list.size(); ++i) {
        for (std::size_t j = i + 1; j < list.size(); ++j) {
            if (!list[i].compatible_with(list[j])) {
                return {false, SubsetPair{list[i], list[j]}};
            }
        }
    }
    if (!has_axioms(f)) {
        return {false, std::nullopt};
    }
    return {};
}

bool is_interval(const TaxonSubset& a, const LinearOrdering& order) {
    std::size_t lo = order.size(), hi = 0;
    for (Taxon t : a.members()) {
        lo = std::min(lo, order.position(t));
        hi = std::max(hi, order.position(t));
    }
    return !a.empty() && hi - lo + 1 == a.count();
}

bool is_prepyramid(const SetFamily& f, const LinearOrdering& order) {
    if (order.size() != f.taxa().size()) {
        throw DomainError("linear ordering size does not match the taxa");
    }
    return has_axioms(f) &&
           std::all_of(f.begin(), f.end(), [&](const auto& a) { return is_interval(a, order); });
}

bool is_pyramid(const SetFamily& f, const LinearOrdering& order) {
    if (!is_prepyramid(f, order)) {
        return false;
    }
    for (const auto& a : f) {
        for (const auto& b : f) {
            TaxonSubset c = a & b;
            if (!c.empty() && !f.contains(c)) {
                return false;
            }
        }
    }
    return true;
}

CheckResult<SubsetPair> is_rooted_family(const SetFamily& f) {
    const std::vector<TaxonSubset> list(f.begin(), f.end());
    for (std::size_t i = 0; i < list.size(); ++i) {
        for (std::size_t j = i + 1; j < list.size(); ++j) {
            if (list[i].compatible_with(list[j])) {
                continue;
            }
            for (const auto& d : derived_sets(list[i], list[j])) {
                if (!f.contains(d)) {
                    return {false, SubsetPair{list[i], list[j]}};
                }
            }
        }
    }
    return {};
}

// ---------------------------------------------------------------------------

SetFamily unroot_family(const SplitSystem& s, Taxon r) {
    const std::size_t n = s.taxa().size();
    if (r >= n) {
        throw DomainError("base taxon out of range");
    }
    SetFamily out(s.taxa().without(r));
    for (const Split& split : s) {
        TaxonSubset side = split.side_without(r);
        TaxonSubset reduced(n - 1);
        for (Taxon t : side.members()) {
            reduced.insert(reduced_index(t, r));
        }
        out.insert(reduced);
    }
    return out;
}

SplitSystem root_family(const SetFamily& f, const TaxonSet& full, Taxon r) {
    if (r >= full.size() || full.size() != f.taxa().size() + 1 ||
        !full.without(r).same_labels(f.taxa())) {
        throw DomainError("rooting target must be the family's taxa plus the base taxon");
    }
    std::vector<Taxon> map = embedding(f.taxa(), full);
    SplitSystem out(full);
    for (const auto& a : f) {
        out.insert(Split(lift(a, map, full.size())));
    }
    return out;
}

SplitSystem root_family(const SetFamily& f, const std::string& r) {
    TaxonSet full = f.taxa().with(r);
    return root_family(f, full, full.size() - 1);
}

SetFamily with_singletons(const SetFamily& f) {
    SetFamily out = f;
    const std::size_t n = f.taxa().size();
    if (n == 0) {
        return out;
    }
    out.insert(TaxonSubset::full(n));
    for (Taxon t = 0; t < n; ++t) {
        out.insert(TaxonSubset::singleton(n, t));
    }
    return out;
}

// ---------------------------------------------------------------------------

IndexedFamily maximally_linked_sets(const SymmetricMatrix& m, const LinearOrdering& order) {
    auto robinsonian = is_robinsonian(m, order);
    if (!robinsonian) {
        throw DomainError("matrix is not Robinsonian for the ordering: chain " +
                          format_sequence(robinsonian.witness->chain, m.taxa()));
    }
    const std::size_t n = m.size();
    std::vector<Rational> levels(m.values());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    // Rows grow away from the diagonal, so the linked intervals starting at
    // position a are exactly [a, b] for b up to some reach(a).
    std::map<TaxonSubset, Rational> index;
    for (const Rational& level : levels) {
        std::vector<std::pair<std::size_t, std::size_t>> candidates;
        for (std::size_t a = 0; a < n; ++a) {
            if (m(order[a], order[a]) > level) {
                continue;
            }
            std::size_t b = a;
            while (b + 1 < n && m(order[a], order[b + 1]) <= level) {
                ++b;
            }
            candidates.emplace_back(a, b);
        }
        for (auto [a, b] : candidates) {
            bool maximal = std::none_of(candidates.begin(), candidates.end(), [&](auto other) {
                return other != std::pair{a, b} && other.first <= a && b <= other.second;
            });
            if (maximal) {
                index.emplace(TaxonSubset::range(n, order.sequence(), a, b),
                              m(order[a], order[b]));
            }
        }
    }
    return IndexedFamily(m.taxa(), std::move(index));
}

SymmetricMatrix family_to_matrix(const IndexedFamily& f) {
    const std::size_t n = f.taxa().size();
    std::vector<Rational> values(n * n);
    for (Taxon x = 0; x < n; ++x) {
        for (Taxon y = x; y < n; ++y) {
            const Rational* best = nullptr;
            for (const auto& [a, value] : f.index()) {
                if (a.contains(x) && a.contains(y) && (!best || value < *best)) {
                    best = &value;
                }
            }
            if (!best) {
                throw DomainError("no member covers the pair (" + f.taxa().label(x) + "," +
                                  f.taxa().label(y) + ")");
            }
            values[x * n + y] = *best;
            values[y * n + x] = *best;
        }
    }
    return SymmetricMatrix(f.taxa(), std::move(values));
}

std::map<TaxonSubset, std::vector<TaxonSubset>> predecessors(const SetFamily& f) {
    std::map<TaxonSubset, std::vector<TaxonSubset>> out;
    for (const auto& a : f) {
        std::vector<TaxonSubset> above;
        for (const auto& b : f) {
            if (b != a && a.is_subset_of(b)) {
                above.push_back(b);
            }
        }
        std::vector<TaxonSubset> minimal;
        for (const auto& b : above) {
            bool has_between = std::any_of(above.begin(), above.end(), [&](const auto& c) {
                return c != b && c.is_subset_of(b);
            });
            if (!has_between) {
                minimal.push_back(b);
            }
        }
        out.emplace(a, std::move(minimal));
    }
    return out;
}

TaxonSubset hull(const SetFamily& f, const TaxonSubset& a) {
    std::optional<TaxonSubset> acc;
    for (const auto& b : f) {
        if (a.is_subset_of(b)) {
            acc = acc ? (*acc & b) : b;
        }
    }
    if (!acc) {
        throw DomainError("no member contains {" + format_subset(a, f.taxa()) + "}");
    }
    return *acc;
}

std::map<TaxonSubset, Rational> pyramid_weights(const IndexedFamily& f) {
    const SetFamily members = f.family();
    const auto preds = predecessors(members);
    std::map<TaxonSubset, Rational> out;
    for (const auto& [a, fa] : f.index()) {
        const auto& p = preds.at(a);
        Rational w = -fa;
        if (p.size() == 1) {
            w += f[p[0]];
        } else if (p.size() == 2) {
            TaxonSubset h = hull(members, p[0] | p[1]);
            if (!members.contains(h)) {
                throw DomainError("hull of the predecessors of {" + format_subset(a, f.taxa()) +
                                  "} is not a member");
            }
            w += f[p[0]] + f[p[1]] - f[h];
        } else if (p.size() > 2) {
            throw DomainError("{" + format_subset(a, f.taxa()) + "} has " +
                              std::to_string(p.size()) + " predecessors; not a pyramid");
        }
        if (w < 0) {
            std::string msg = "negative weight " + to_string(w) + " on {" +
                              format_subset(a, f.taxa()) + "}";
            for (const auto& q : p) {
                msg += " pred {" + format_subset(q, f.taxa()) + "}";
            }
            throw DomainError(msg);
        }
        out.emplace(a, w);
    }
    return out;
}

WeightedSplitSystem eta_r(const IndexedFamily& f, const TaxonSet& full, Taxon r) {
    if (r >= full.size() || full.size() != f.taxa().size() + 1 ||
        !full.without(r).same_labels(f.taxa())) {
        throw DomainError("rooting target must be the family's taxa plus the base taxon");
    }
    std::vector<Taxon> map = embedding(f.taxa(), full);
    std::map<Split, Rational> weights;
    for (auto& [a, w] : pyramid_weights(f)) {
        weights.emplace(Split(lift(a, map, full.size())), w);
    }
    return WeightedSplitSystem(full, std::move(weights));
}

SetFamily rooted_closure(const SetFamily& f) {
    auto closed = detail::close_under(
        f.members(),
        [](const TaxonSubset& a, const TaxonSubset& b) { return !a.compatible_with(b); },
        derived_sets);
    return SetFamily(f.taxa(), std::vector<TaxonSubset>(closed.begin(), closed.end()));
}

}  // namespace pcfit
